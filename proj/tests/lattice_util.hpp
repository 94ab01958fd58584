#pragma once
// Smooth trigonometric test fields, sampled identically at any lattice size.
#include <random>
#include <vector>

#include <mnpl/lattice.hpp>

namespace testutil {

using namespace mnpl;

inline const std::vector<std::array<int, 4>>& low_modes() {
    static const std::vector<std::array<int, 4>> m = {
        {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {1, 1, 0, 0}, {0, 1, 0, 1}, {1, 0, -1, 0}};
    return m;
}

// sum_m C_m cos(m.x) + S_m sin(m.x) with coefficient matrices drawn once per seed
template <int R, class Draw>
MatField<R> smooth_matrix_field(const LatticeGeometry& g, std::uint64_t seed, Draw draw) {
    std::mt19937_64 rng(seed);
    std::vector<std::pair<Mat<R>, Mat<R>>> coef;
    for (std::size_t k = 0; k < low_modes().size(); ++k) {
        Mat<R> c = draw(rng);
        Mat<R> s = draw(rng);
        coef.emplace_back(c, s);
    }
    MatField<R> f(std::size_t(g.sites()));
    for (int s = 0; s < g.sites(); ++s) {
        Mat<R> m = Mat<R>::Zero();
        for (std::size_t k = 0; k < coef.size(); ++k) {
            double ph = 0;
            for (int mu = 0; mu < 4; ++mu) ph += low_modes()[k][mu] * g.x(s, mu);
            m += std::cos(ph) * coef[k].first + std::sin(ph) * coef[k].second;
        }
        f[s] = m;
    }
    return f;
}

template <int R>
LatticeConnection<R> smooth_connection(const LatticeGeometry& g, std::uint64_t seed, double scale = 0.3) {
    LatticeConnection<R> A;
    for (int mu = 0; mu < 4; ++mu)
        A.a[mu] = smooth_matrix_field<R>(g, seed * 7 + mu, [&](std::mt19937_64& r) { return random_skew<R>(scale, r); });
    return A;
}

template <int R>
SpinorField<R> smooth_spinor(const LatticeGeometry& g, std::uint64_t seed) {
    auto draw = [](std::mt19937_64& r) {
        std::normal_distribution<double> d(0.0, 1.0);
        Mat<R> m;
        for (int i = 0; i < R; ++i)
            for (int j = 0; j < R; ++j) {
                double a = d(r), b = d(r);
                m(i, j) = cplx(a, b);
            }
        return m;
    };
    auto fa = smooth_matrix_field<R>(g, seed * 13 + 1, draw);
    auto fb = smooth_matrix_field<R>(g, seed * 13 + 2, draw);
    SpinorField<R> p(fa.size());
    for (std::size_t s = 0; s < fa.size(); ++s) p[s] = SpinorFiber<R>(fa[s].col(0), fb[s].col(0));
    return p;
}

// u = exp(H) with H smooth skew-Hermitian
template <int R>
MatField<R> smooth_gauge(const LatticeGeometry& g, std::uint64_t seed, double scale = 0.5) {
    auto H = smooth_matrix_field<R>(g, seed * 17 + 3, [&](std::mt19937_64& r) { return random_skew<R>(scale, r); });
    MatField<R> u(H.size());
    for (std::size_t s = 0; s < H.size(); ++s) {
        Eigen::SelfAdjointEigenSolver<Mat<R>> es(Mat<R>(-I * H[s]));
        Vec<R> ph = (I * es.eigenvalues().template cast<cplx>()).array().exp();
        u[s] = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    }
    return u;
}

template <int R>
SpinorField<R> fourier_mode(const LatticeGeometry& g, const std::array<int, 4>& k, const SpinorFiber<R>& p0) {
    SpinorField<R> p(std::size_t(g.sites()));
    for (int s = 0; s < g.sites(); ++s) {
        double ph = 0;
        for (int mu = 0; mu < 4; ++mu) ph += k[mu] * g.x(s, mu);
        p[s] = std::exp(I * ph) * p0;
    }
    return p;
}

}  // namespace testutil
