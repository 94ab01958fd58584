#pragma once
// Sampling + descent estimators for the fiberwise infima/suprema of mu.
#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "clifford.hpp"

namespace mnpl {

struct SearchBudget {
    long samples = 100000;
    int restarts = 10;        // descents started from the best samples
    int descent_steps = 4000;
    double grad_tol = 1e-13;
};

inline void check_budget(const SearchBudget& b) {
    require(b.samples >= 1 && b.restarts >= 1 && b.restarts <= b.samples && b.descent_steps >= 0,
            "invalid search budget");
}

namespace detail {

using Flat = Eigen::VectorXcd;

inline Flat gaussian(int dim, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Flat v(dim);
    for (int k = 0; k < dim; ++k) v[k] = cplx(g(rng), g(rng));
    return v;
}

// keeps the k smallest (value, point) pairs, ties resolved by arrival order
struct BestK {
    int k;
    std::vector<std::pair<double, Flat>> items;
    void offer(double v, const Flat& x) {
        if (int(items.size()) < k) {
            items.emplace_back(v, x);
        } else if (v < items.back().first) {
            items.back() = {v, x};
        } else {
            return;
        }
        std::stable_sort(items.begin(), items.end(),
                         [](auto& a, auto& b) { return a.first < b.first; });
    }
};

// sign = +1 minimizes |mu|^2 on the unit sphere, -1 maximizes it
inline double sphere_objective(const Flat& x, int n, double tau, double sign, Flat* grad) {
    auto psi = TwistedSpinorFiber::from_flat(x);
    auto m = mu(psi, tau);
    if (grad) {
        // d|mu|^2 = 2 Re <{mu}_tau, d(Psi Psi^*)> -> 4 {mu}_tau Psi
        Flat g = (4.0 * sign) * block_brace(m, tau).apply(psi).flat();
        g -= std::real(x.dot(g)) * x;  // tangent to the sphere
        *grad = g;
    }
    (void)n;
    return sign * m.hs_norm_sq();
}

inline double sphere_descent(Flat x, int n, double tau, double sign, const SearchBudget& b) {
    Flat g;
    double f = sphere_objective(x, n, tau, sign, &g);
    double t = 0.25;
    for (int it = 0; it < b.descent_steps; ++it) {
        const double gg = g.squaredNorm();
        if (gg < b.grad_tol * b.grad_tol) break;
        t = std::min(1.0, 2.0 * t);
        bool moved = false;
        while (t > 1e-16) {
            Flat y = (x - t * g).normalized();
            Flat gy;
            double fy = sphere_objective(y, n, tau, sign, &gy);
            if (fy <= f - 1e-4 * t * gg) {
                x = y; f = fy; g = gy; moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) break;
    }
    return f;
}

inline double sphere_search(int n, double tau, double sign, const SearchBudget& b, std::uint64_t seed) {
    require(n >= 1, "rank must be positive");
    check_tau(tau);
    check_budget(b);
    std::mt19937_64 rng(seed);
    BestK best{b.restarts, {}};
    for (long s = 0; s < b.samples; ++s) {
        Flat x = gaussian(2 * n, rng).normalized();
        best.offer(sphere_objective(x, n, tau, sign, nullptr), x);
    }
    double f = best.items.front().first;
    for (auto& [v, x] : best.items) f = std::min(f, sphere_descent(x, n, tau, sign, b));
    return f;
}

}  // namespace detail

// estimate of inf{|mu(Psi,Psi,tau)| : |Psi| = 1}
inline double properness_constant(int n, double tau, const SearchBudget& b, std::uint64_t seed) {
    return std::sqrt(std::max(0.0, detail::sphere_search(n, tau, 1.0, b, seed)));
}

// estimate of sup{|mu(Psi,Psi,tau)| : |Psi| = 1}
inline double mu_sup_constant(int n, double tau, const SearchBudget& b, std::uint64_t seed) {
    return std::sqrt(std::max(0.0, -detail::sphere_search(n, tau, -1.0, b, seed)));
}

namespace detail {

// |{beta alpha^*}_tau - z id|^2 and its gradient w.r.t. (alpha, beta)
inline double identity_objective(const Flat& x, int n, double tau, cplx z, Flat* grad) {
    auto a = x.head(n), bvec = x.tail(n);
    Eigen::MatrixXcd r = brace_tau(bvec * a.adjoint(), tau);
    r.diagonal().array() -= z;
    if (grad) {
        Eigen::MatrixXcd s = brace_tau(r, tau);
        grad->resize(2 * n);
        grad->head(n) = 2.0 * s.adjoint() * bvec;
        grad->tail(n) = 2.0 * s * a;
    }
    return r.squaredNorm();
}

// (alpha, beta) -> (l alpha, beta / l) leaves the objective unchanged
inline void rebalance(Flat& x, int n) {
    const double na = x.head(n).norm(), nb = x.tail(n).norm();
    if (na > 0 && nb > 0) {
        const double l = std::sqrt(nb / na);
        x.head(n) *= l;
        x.tail(n) /= l;
    }
}

inline double identity_descent(Flat x, int n, double tau, cplx z, const SearchBudget& b) {
    Flat g;
    double f = identity_objective(x, n, tau, z, &g);
    double t = 0.1 / std::max(std::abs(z), 1e-300);
    const double gscale = std::max(std::norm(z), 1e-300);
    for (int it = 0; it < b.descent_steps; ++it) {
        const double gg = g.squaredNorm();
        if (gg < b.grad_tol * b.grad_tol * gscale) break;
        t *= 2.0;
        bool moved = false;
        while (t > 1e-300) {
            Flat y = x - t * g;
            rebalance(y, n);
            Flat gy;
            double fy = identity_objective(y, n, tau, z, &gy);
            if (fy <= f - 1e-4 * t * gg) {
                x = y; f = fy; g = gy; moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) break;
    }
    return f;
}

}  // namespace detail

// estimate of inf over (alpha, beta) of |{beta alpha^*}_tau - z id|
inline double identity_obstruction(int n, double tau, cplx z, const SearchBudget& b, std::uint64_t seed) {
    require(n >= 1, "rank must be positive");
    require(tau > 0.0 && tau <= 1.0, "tau must lie in (0,1]");
    check_budget(b);
    if (n == 1) return 0.0;  // tau beta conj(alpha) = z always solvable
    detail::Flat zero = detail::Flat::Zero(2 * n);
    double f = detail::identity_objective(zero, n, tau, z, nullptr);  // alpha = beta = 0
    if (f == 0.0) return 0.0;
    std::mt19937_64 rng(seed);
    const double scale = std::sqrt(std::abs(z));
    detail::BestK best{b.restarts, {}};
    for (long s = 0; s < b.samples; ++s) {
        detail::Flat x = detail::gaussian(2 * n, rng, scale);
        best.offer(detail::identity_objective(x, n, tau, z, nullptr), x);
    }
    f = std::min(f, best.items.front().first);
    for (auto& [v, x] : best.items) f = std::min(f, detail::identity_descent(x, n, tau, z, b));
    return std::sqrt(std::max(0.0, f));
}

}  // namespace mnpl
