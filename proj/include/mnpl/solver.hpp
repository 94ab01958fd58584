#pragma once
// Squared-residual energy of the monopole equations, its exact gradient, and
// gradient flow with backtracking.
#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "lattice.hpp"

namespace mnpl {

template <int R>
struct Configuration {
    SpinorField<R> psi;
    LatticeConnection<R> A;
};

template <int R>
struct EnergyGradient {
    double energy = 0;
    SpinorField<R> psi;       // dE = sum_x Re<g_psi, dpsi> + Re<g_a, da>
    LatticeConnection<R> a;   // skew-Hermitian representer
};

namespace detail {

// per-site residual pieces; r2 = [[R11, R21^*], [R21, -R11]]
template <int R>
struct SiteResidual {
    SpinorFiber<R> r1;
    Mat<R> R11, R21;
};

template <int R>
inline Mat<R> comm(const Mat<R>& x, const Mat<R>& y) {
    return x.lazyProduct(y) - y.lazyProduct(x);  // the generic product path is slow for tiny matrices
}

template <int R>
SiteResidual<R> site_residual(const LatticeGeometry& g, const SpinorField<R>& psi, const LatticeConnection<R>& A,
                              double tau, const SelfDualFormFiber& eta, int s) {
    const double ih = 0.5 / g.h();
    SiteResidual<R> out;
    const auto& p = psi[s];
    std::array<Vec<R>, 4> da, db;
    for (int mu = 0; mu < 4; ++mu) {
        const auto &f = psi[g.fwd(s, mu)], &b = psi[g.bwd(s, mu)];
        da[mu] = ih * (f.alpha - b.alpha) + A.a[mu][s] * p.alpha;
        db[mu] = ih * (f.beta - b.beta) + A.a[mu][s] * p.beta;
    }
    // Pauli Clifford: c1 = s3, c2 = i, c3 = s1, c4 = s2
    out.r1.alpha = da[0] + I * da[1] + db[2] - I * db[3];
    out.r1.beta = -db[0] + I * db[1] + da[2] + I * da[3];

    auto F = [&](int mu, int nu) -> Mat<R> {
        const auto &am = A.a[mu], &an = A.a[nu];
        return ih * (an[g.fwd(s, mu)] - an[g.bwd(s, mu)] - am[g.fwd(s, nu)] + am[g.bwd(s, nu)]) +
               comm<R>(am[s], an[s]);
    };
    const Mat<R> L = F(0, 1) + F(2, 3);
    const Mat<R> X = F(0, 2) - F(1, 3);
    const Mat<R> Y = F(0, 3) + F(1, 2);
    const Mat<R> D1 = 0.5 * (p.alpha * p.alpha.adjoint() - p.beta * p.beta.adjoint());
    const Mat<R> BA = p.beta * p.alpha.adjoint();
    out.R11 = -4.0 * I * L - brace_tau(D1, tau);
    out.R11.diagonal().array() += 4.0 * I * eta.c11;
    out.R21 = 4.0 * (X + I * Y) - brace_tau(BA, tau);
    out.R21.diagonal().array() -= 16.0 * eta.c02;
    return out;
}

template <int R>
double site_energy(const SiteResidual<R>& r) {
    return r.r1.norm_sq() + 2.0 * r.R11.squaredNorm() + 2.0 * r.R21.squaredNorm();
}

inline void check_config(const LatticeGeometry& g, const PerturbationField& eta, double tau) {
    check_perturbation(g, eta);
    check_tau(tau);
}

}  // namespace detail

template <int R>
double energy(const LatticeGeometry& g, const SpinorField<R>& psi, const LatticeConnection<R>& A, double tau,
              const PerturbationField& eta) {
    check_shapes(g, psi, A);
    detail::check_config(g, eta, tau);
    double e = 0;
    for (int s = 0; s < g.sites(); ++s) e += detail::site_energy(detail::site_residual(g, psi, A, tau, eta[s], s));
    return g.weight() * e;
}

template <int R>
EnergyGradient<R> energy_gradient(const LatticeGeometry& g, const SpinorField<R>& psi, const LatticeConnection<R>& A,
                                  double tau, const PerturbationField& eta) {
    check_shapes(g, psi, A);
    detail::check_config(g, eta, tau);
    const int V = g.sites();
    const double w = g.weight(), ih = 0.5 / g.h();
    std::vector<detail::SiteResidual<R>> res(static_cast<std::size_t>(V));
    double e = 0;
    for (int s = 0; s < V; ++s) {
        res[s] = detail::site_residual(g, psi, A, tau, eta[s], s);
        e += detail::site_energy(res[s]);
    }
    EnergyGradient<R> out;
    out.energy = w * e;
    out.psi.resize(std::size_t(V));
    out.a = LatticeConnection<R>(g);

    // u_mu = c_mu^* r1
    std::array<SpinorField<R>, 4> u;
    for (auto& f : u) f.resize(std::size_t(V));
    for (int s = 0; s < V; ++s) {
        const auto& r = res[s].r1;
        u[0][s] = SpinorFiber<R>(r.alpha, -r.beta);
        u[1][s] = SpinorFiber<R>(-I * r.alpha, -I * r.beta);
        u[2][s] = SpinorFiber<R>(r.beta, r.alpha);
        u[3][s] = SpinorFiber<R>(-I * r.beta, I * r.alpha);
    }
    // dE/dF_{mu nu} = coef * (R11 or R21) for the pairs 01,02,03,12,13,23
    static constexpr bool uses_R11[6] = {true, false, false, false, false, true};
    const cplx coef[6] = {16.0 * I, 16.0, -16.0 * I, -16.0 * I, -16.0, 16.0 * I};
    auto Rof = [&](int pr, int s) -> const Mat<R>& { return uses_R11[pr] ? res[s].R11 : res[s].R21; };

    for (int s = 0; s < V; ++s) {
        const auto& p = psi[s];
        // psi: 2 D^* r1 - 4 {r2}_tau psi
        SpinorFiber<R> dr;
        for (int mu = 0; mu < 4; ++mu) {
            const auto &uf = u[mu][g.fwd(s, mu)], &ub = u[mu][g.bwd(s, mu)], &us = u[mu][s];
            dr.alpha -= ih * (uf.alpha - ub.alpha) + A.a[mu][s] * us.alpha;
            dr.beta -= ih * (uf.beta - ub.beta) + A.a[mu][s] * us.beta;
            // connection, Dirac part
            out.a.a[mu][s] += (2.0 * w) * (us.alpha * p.alpha.adjoint() + us.beta * p.beta.adjoint());
        }
        const Mat<R> S11 = brace_tau(res[s].R11, tau), S21 = brace_tau(res[s].R21, tau);
        out.psi[s].alpha = 2.0 * w * dr.alpha - 4.0 * w * (S11 * p.alpha + S21.adjoint() * p.beta);
        out.psi[s].beta = 2.0 * w * dr.beta - 4.0 * w * (S21 * p.alpha - S11 * p.beta);

        // connection, curvature part (adjoint of F = d^c a + [a, a])
        for (int pr = 0; pr < 6; ++pr) {
            const int mu = pair_first[pr], nu = pair_second[pr];
            const cplx c = w * coef[pr];
            const Mat<R> Ws = c * Rof(pr, s);
            out.a.a[nu][s] += (-ih * c) * (Rof(pr, g.fwd(s, mu)) - Rof(pr, g.bwd(s, mu))) +
                              detail::comm<R>(Ws, A.a[mu][s]);
            out.a.a[mu][s] += (ih * c) * (Rof(pr, g.fwd(s, nu)) - Rof(pr, g.bwd(s, nu))) +
                              detail::comm<R>(A.a[nu][s], Ws);
        }
    }
    for (auto& f : out.a.a)
        for (auto& m : f) m = 0.5 * (m - m.adjoint()).eval();
    return out;
}

// ---- flow

struct FlowConfig {
    int steps = 2000;
    double step_size = 0;      // 0: use the stability cap
    int restarts = 1;
    std::uint64_t seed = 0;
    double tolerance = 1e-8;   // stop once energy < tolerance
    double tau = 0;
    int record_every = 1;
    double init_scale = 1e-3;  // perturbation size of restarts
    int stall_window = 500;    // stop if the last window gained less than stall_rtol relative
    double stall_rtol = 1e-6;
    double stop_below = 0;     // >0: stop all runs once energy drops below this
};

enum class FlowStatus { converged, stalled, budget, underflow, below_target };

inline const char* to_string(FlowStatus s) {
    switch (s) {
        case FlowStatus::converged: return "converged";
        case FlowStatus::stalled: return "stalled";
        case FlowStatus::budget: return "budget";
        case FlowStatus::below_target: return "below_target";
        default: return "underflow";
    }
}

struct FlowRunSummary {
    double energy;
    int steps;
    FlowStatus status;
};

template <int R>
struct FlowResult {
    SpinorField<R> psi;
    LatticeConnection<R> A;
    std::vector<double> trace;  // energies of the best run, every record_every steps
    double energy = 0;
    int steps = 0;
    FlowStatus status = FlowStatus::budget;
    std::vector<FlowRunSummary> runs;
    int best_run = 0;
    double step_size = 0;  // effective initial step
};

// the L^2 Hessian of the quadratic part is bounded by 8 s^2 with s the Dirac
// symbol bound (curvature term: |gamma|^2 = 64 times |d+|^2 <= s^2/16, doubled)
inline double stability_cap(const LatticeGeometry& g) {
    const double s = g.dirac_symbol_bound();
    return 2.0 / (8.0 * s * s);
}

template <int R>
using FlowObserver = std::function<void(int step, double energy, const SpinorField<R>&, const LatticeConnection<R>&)>;

inline void check_flow_config(const FlowConfig& c) {
    require(c.steps >= 1, "steps must be >= 1");
    require(c.step_size >= 0 && std::isfinite(c.step_size), "step size must be positive");
    require(c.restarts >= 1, "restarts must be >= 1");
    require(c.tolerance > 0, "tolerance must be positive");
    require(c.record_every >= 1, "record_every must be >= 1");
    require(c.init_scale >= 0, "init_scale must be nonnegative");
    require(c.stall_window >= 1 && c.stall_rtol >= 0, "invalid stall criterion");
    require(c.stop_below >= 0 && std::isfinite(c.stop_below), "stop_below must be nonnegative");
    check_tau(c.tau);
}

namespace detail {

template <int R>
void axpy(Configuration<R>& x, double t, const EnergyGradient<R>& g) {
    for (std::size_t s = 0; s < x.psi.size(); ++s) {
        x.psi[s].alpha -= t * g.psi[s].alpha;
        x.psi[s].beta -= t * g.psi[s].beta;
    }
    for (int mu = 0; mu < 4; ++mu)
        for (std::size_t s = 0; s < x.psi.size(); ++s) x.A.a[mu][s] -= t * g.a.a[mu][s];
}

template <int R>
double grad_norm_sq(const EnergyGradient<R>& g) {
    double t = 0;
    for (auto& p : g.psi) t += p.norm_sq();
    for (auto& f : g.a.a)
        for (auto& m : f) t += m.squaredNorm();
    return t;
}

template <int R>
struct RunResult {
    Configuration<R> x;
    std::vector<double> trace;
    double energy;
    int steps;
    FlowStatus status;
};

// plain gradient descent in the L^2 metric with Armijo backtracking
template <int R>
RunResult<R> flow_run(const LatticeGeometry& g, Configuration<R> x, const PerturbationField& eta,
                      const FlowConfig& cfg, double t0, const FlowObserver<R>& obs) {
    const double w = g.weight();
    RunResult<R> out{{}, {}, 0, 0, FlowStatus::budget};
    auto G = energy_gradient(g, x.psi, x.A, cfg.tau, eta);
    double E = G.energy;
    out.trace.push_back(E);
    if (obs) obs(0, E, x.psi, x.A);
    double t = t0, window_start = E;
    int step = 0;
    for (; step < cfg.steps; ++step) {
        if (E < cfg.tolerance) {
            out.status = FlowStatus::converged;
            break;
        }
        if (E < cfg.stop_below) {
            out.status = FlowStatus::below_target;
            break;
        }
        const double gg = grad_norm_sq(G) / w;  // squared L^2 norm of the L^2 gradient
        t = std::min(t0, 2.0 * t);
        bool accepted = false;
        Configuration<R> y;
        while (t >= t0 * 1e-12) {
            y = x;
            axpy(y, t / w, G);
            // trial steps only need the energy; gradient once accepted
            if (energy(g, y.psi, y.A, cfg.tau, eta) <= E - 1e-4 * t * gg) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            out.status = FlowStatus::underflow;
            break;
        }
        x = std::move(y);
        G = energy_gradient(g, x.psi, x.A, cfg.tau, eta);
        E = G.energy;
        if ((step + 1) % cfg.record_every == 0) out.trace.push_back(E);
        if (obs) obs(step + 1, E, x.psi, x.A);
        if ((step + 1) % cfg.stall_window == 0) {
            if (window_start - E < cfg.stall_rtol * window_start) {
                ++step;
                out.status = E < cfg.tolerance ? FlowStatus::converged : FlowStatus::stalled;
                break;
            }
            window_start = E;
        }
    }
    if (step == cfg.steps && E < cfg.tolerance) out.status = FlowStatus::converged;
    if (out.trace.back() != E) out.trace.push_back(E);
    out.x = std::move(x);
    out.energy = E;
    out.steps = step;
    return out;
}

template <int R>
Configuration<R> perturbed(const LatticeGeometry& g, const Configuration<R>& x0, double scale, std::uint64_t seed, int run) {
    std::seed_seq sq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(run)};
    std::mt19937_64 rng(sq);
    Configuration<R> x = x0;
    auto dp = random_spinor<R>(g, scale, rng);
    auto da = random_connection<R>(g, scale, rng);
    for (std::size_t s = 0; s < x.psi.size(); ++s) x.psi[s] += dp[s];
    for (int mu = 0; mu < 4; ++mu)
        for (std::size_t s = 0; s < x.psi.size(); ++s) x.A.a[mu][s] += da.a[mu][s];
    return x;
}

}  // namespace detail

// Runs from (psi0, A0) and from restarts-1 seeded perturbations of it; returns the best.
template <int R>
FlowResult<R> flow(const LatticeGeometry& g, const SpinorField<R>& psi0, const LatticeConnection<R>& A0,
                   const PerturbationField& eta, const FlowConfig& cfg, const FlowObserver<R>& obs = {},
                   bool perturb_first = false) {
    check_flow_config(cfg);
    check_shapes(g, psi0, A0);
    detail::check_config(g, eta, cfg.tau);
    const double cap = stability_cap(g);
    const double t0 = cfg.step_size > 0 ? std::min(cfg.step_size, cap) : cap;
    FlowResult<R> best;
    best.energy = std::numeric_limits<double>::infinity();
    best.step_size = t0;
    const Configuration<R> x0{psi0, A0};
    for (int r = 0; r < cfg.restarts; ++r) {
        auto start = (r == 0 && !perturb_first) ? x0 : detail::perturbed(g, x0, cfg.init_scale, cfg.seed, r);
        auto run = detail::flow_run(g, std::move(start), eta, cfg, t0, obs);
        best.runs.push_back({run.energy, run.steps, run.status});
        if (run.energy < best.energy) {
            best.energy = run.energy;
            best.psi = std::move(run.x.psi);
            best.A = std::move(run.x.A);
            best.trace = std::move(run.trace);
            best.steps = run.steps;
            best.status = run.status;
            best.best_run = r;
        }
        if (best.energy < cfg.stop_below) break;
    }
    return best;
}

// quantities entering the a-priori bounds: max |psi|^2 and h^4 sum |F+|^2
struct BoundQuantities {
    double max_psi_sq = 0;
    double fplus_l2_sq = 0;
};

template <int R>
BoundQuantities bound_quantities(const LatticeGeometry& g, const SpinorField<R>& psi, const LatticeConnection<R>& A) {
    BoundQuantities q;
    for (auto& p : psi) q.max_psi_sq = std::max(q.max_psi_sq, p.norm_sq());
    auto P = selfdual_projection(curvature(g, A));
    for (auto& c : P.f)
        for (auto& m : c) q.fplus_l2_sq += m.squaredNorm();
    q.fplus_l2_sq *= g.weight();
    return q;
}

// sup over sites of the pointwise form norm of eta
inline double perturbation_sup(const PerturbationField& eta) {
    double m = 0;
    for (auto& e : eta) m = std::max(m, std::sqrt(e.norm_sq()));
    return m;
}

}  // namespace mnpl
