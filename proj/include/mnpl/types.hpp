#pragma once
// Shared scalar/matrix aliases and error types.
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mnpl {

using cplx = std::complex<double>;
inline constexpr int Dyn = Eigen::Dynamic;
inline constexpr cplx I{0.0, 1.0};

template <int R> using Vec = Eigen::Matrix<cplx, R, 1>;
template <int R> using Mat = Eigen::Matrix<cplx, R, R>;
using Mat2 = Eigen::Matrix2cd;

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
// topological data whose dimension formula is not an integer
struct InconsistentData : std::domain_error {
    using std::domain_error::domain_error;
};
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const char* what) {
    if (!ok) [[unlikely]] throw InvalidArgument(what);
}
inline void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument(what);
}

inline void check_tau(double tau) {
    require(tau >= 0.0 && tau <= 1.0, "tau must lie in [0,1]");
}

}  // namespace mnpl
