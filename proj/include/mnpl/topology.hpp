#pragma once
// Characteristic-number arithmetic: expected dimension and a-priori bounds.
#include <algorithm>
#include <cstdint>

#include "types.hpp"

namespace mnpl {

struct TopologicalDatum {
    int n = 1;
    std::int64_t c1E_sq = 0, c2E = 0, c1L_c1E = 0, c1L_sq = 0;
    std::int64_t b1 = 0, b2plus = 0, sign = 0;
};

struct BoundInputs {
    double scalar_curvature_min = 0;
    double trFB_plus_sup = 0;
    double eta_sup = 0;
    double volume = 1;
    double properness_c = 1;
};

inline std::int64_t p1_su(int n, std::int64_t c1E_sq, std::int64_t c2E) {
    require(n >= 1, "rank must be positive");
    if (n == 1) return 0;  // su of a line bundle is zero
    return (n - 1) * c1E_sq - 2 * std::int64_t(n) * c2E;
}

inline std::int64_t expected_dimension(const TopologicalDatum& t) {
    require(t.n >= 1, "rank must be positive");
    require(t.b1 >= 0 && t.b2plus >= 0, "Betti numbers must be nonnegative");
    if (t.n == 1 && t.c2E != 0) throw InconsistentData("a line bundle has c2 = 0");
    const std::int64_t n = t.n;
    // four times the dimension, to keep the n/4 terms exact
    const std::int64_t d4 = -8 * p1_su(t.n, t.c1E_sq, t.c2E) - 4 * n * n * (t.b2plus - t.b1 + 1) -
                            n * t.sign + 4 * (t.c1E_sq - 2 * t.c2E + t.c1L_c1E) + n * t.c1L_sq;
    if (d4 % 4 != 0) throw InconsistentData("dimension formula is not integral for this datum");
    return d4 / 4;
}

inline void check_bounds(const BoundInputs& b) {
    require(b.properness_c > 0, "properness constant must be positive");
    require(b.volume > 0, "volume must be positive");
    require(b.trFB_plus_sup >= 0 && b.eta_sup >= 0, "sup norms must be nonnegative");
}

inline double bound_constant_K(const BoundInputs& b) {
    return -b.scalar_curvature_min / 4.0 + b.trFB_plus_sup / 2.0 + b.eta_sup;
}

// sup |Psi|^2 <= max{0, K/c^2}
inline double spinor_sup_bound(const BoundInputs& b) {
    check_bounds(b);
    return std::max(0.0, bound_constant_K(b) / (b.properness_c * b.properness_c));
}

// ||F+||^2 <= (C K/(2c^2) + sup|eta|)^2 vol ; negative K gives psi = 0, hence K -> 0
inline double curvature_l2_bound(double C, const BoundInputs& b) {
    require(C > 0, "sup constant must be positive");
    check_bounds(b);
    const double K = std::max(0.0, bound_constant_K(b));
    const double r = C * K / (2.0 * b.properness_c * b.properness_c) + b.eta_sup;
    return r * r * b.volume;
}

}  // namespace mnpl
