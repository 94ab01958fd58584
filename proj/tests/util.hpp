#pragma once
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include <mnpl/clifford.hpp>

namespace testutil {

using namespace mnpl;

inline cplx crand(std::mt19937_64& rng, double s = 1.0) {
    std::normal_distribution<double> g(0.0, s);
    double re = g(rng);
    return {re, g(rng)};
}

inline Eigen::VectorXcd vrand(int n, std::mt19937_64& rng, double s = 1.0) {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v[i] = crand(rng, s);
    return v;
}

inline Eigen::MatrixXcd mrand(int n, std::mt19937_64& rng, double s = 1.0) {
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = crand(rng, s);
    return m;
}

inline TwistedSpinorFiber srand_fiber(int n, std::mt19937_64& rng) {
    return TwistedSpinorFiber(vrand(n, rng), vrand(n, rng));
}

inline Eigen::MatrixXcd unitary(int n, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(mrand(n, rng));
    return qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
}

}  // namespace testutil
