#pragma once
// Kaehler emptiness experiments: perturbation eta with eta^{0,2} = c dzbar1^dzbar2 on the flat torus.

#include <algorithm>
#include <cmath>
#include <string>

#include "estimators.hpp"
#include "lattice.hpp"
#include "solver.hpp"

namespace mnpl {

// imaginary self-dual eta whose (0,2) coefficient is c (the (2,0) partner is -conj c)
inline SelfDualFormFiber kahler_perturbation(cplx c) { return {0.0, -std::conj(c), c}; }

enum class KahlerVerdict { empty, not_empty, no_claim };

inline const char* to_string(KahlerVerdict v) {
    switch (v) {
        case KahlerVerdict::empty: return "empty";
        case KahlerVerdict::not_empty: return "not-empty";
        default: return "no-claim";
    }
}

struct SiteStats {
    double min = 0, mean = 0, max = 0;
};

struct KahlerReport {
    int n = 0;
    double tau = 0;
    cplx c{0};
    // empirical evidence
    double best_energy = 0;
    FlowStatus status = FlowStatus::budget;
    std::vector<FlowRunSummary> runs;
    int best_run = 0;
    // algebraic evidence
    double rho_unit = 0;        // inf |{beta alpha^*}_tau - id|
    double lower_bound = 0;     // rho(|4c|)^2 vol
    double fiber_floor = 0;     // 2 rho(16|c|)^2 vol: energy floor of any config with F^{0,2} = 0
    double threshold = 0;       // max(tolerance, lower_bound / 2)
    KahlerVerdict verdict = KahlerVerdict::no_claim;
    // diagnostics on the best configuration
    SiteStats obstruction;      // |{beta alpha^*}_tau + 16 c id| per site
    double f02_norm_sq = 0;     // ||F^{0,2}||^2
    double dbar_star_beta_sq = 0;
    double doubler_fraction = 0;  // share of |psi|^2 on modes with every k_mu in {0, N/2}
    std::string algebraic_evidence, empirical_evidence;
};

namespace detail {

template <int R>
double doubler_fraction(const LatticeGeometry& g, const SpinorField<R>& psi) {
    double tot = 0, dbl = 0;
    for (auto& p : psi) tot += p.norm_sq();
    if (tot == 0) return 0;
    for (int m = 0; m < 16; ++m) {
        Vec<R> a = Vec<R>::Zero(), b = Vec<R>::Zero();
        for (int s = 0; s < g.sites(); ++s) {
            auto x = g.coords(s);
            int par = 0;
            for (int mu = 0; mu < 4; ++mu)
                if (m >> mu & 1) par += x[mu];
            const double f = par % 2 ? -1.0 : 1.0;
            a += f * psi[s].alpha;
            b += f * psi[s].beta;
        }
        dbl += (a.squaredNorm() + b.squaredNorm()) / g.sites();
    }
    return dbl / tot;
}

}  // namespace detail

// Runs the flow from cfg.restarts random starts with eta^{0,2} = c and compares the best
// energy against the fiberwise bound. With early_stop the restarts end as soon as an
// energy below the verdict threshold is seen (the verdict cannot change afterwards).
template <int R>
KahlerReport kahler_emptiness_experiment(const LatticeGeometry& g, cplx c, FlowConfig cfg,
                                         const SearchBudget& budget = {}, std::uint64_t obstruction_seed = 0,
                                         bool early_stop = true) {
    static_assert(R >= 1, "fixed rank required");
    require(c != cplx(0), "c must be nonzero (run the c = 0 contrast through flow)");
    require(cfg.tau > 0.0 && cfg.tau <= 1.0, "tau must lie in (0,1]");
    check_flow_config(cfg);

    KahlerReport rep;
    rep.n = R;
    rep.tau = cfg.tau;
    rep.c = c;
    rep.rho_unit = identity_obstruction(R, cfg.tau, 1.0, budget, obstruction_seed);
    const double vol = g.volume();
    rep.lower_bound = std::pow(rep.rho_unit * 4.0 * std::abs(c), 2) * vol;
    rep.fiber_floor = 2.0 * std::pow(rep.rho_unit * 16.0 * std::abs(c), 2) * vol;
    rep.threshold = std::max(cfg.tolerance, 0.5 * rep.lower_bound);
    if (early_stop && rep.lower_bound > 0) cfg.stop_below = rep.threshold;

    const auto eta = constant_perturbation(g, kahler_perturbation(c));
    SpinorField<R> psi0(std::size_t(g.sites()), SpinorFiber<R>());
    LatticeConnection<R> A0(g);
    auto res = flow(g, psi0, A0, eta, cfg, {}, true);
    rep.best_energy = res.energy;
    rep.status = res.status;
    rep.runs = res.runs;
    rep.best_run = res.best_run;

    if (rep.lower_bound <= 0) {
        rep.verdict = KahlerVerdict::no_claim;
        rep.algebraic_evidence = "none: fiberwise obstruction vanishes";
    } else {
        rep.verdict = rep.best_energy > rep.threshold ? KahlerVerdict::empty : KahlerVerdict::not_empty;
        rep.algebraic_evidence = "fiberwise obstruction positive (rigorous, given F02 = 0)";
    }
    rep.empirical_evidence = std::string("flow ") + to_string(res.status) + (rep.best_energy > rep.threshold
                                                                                ? ", best energy above threshold"
                                                                                : ", best energy below threshold");

    // diagnostics
    const Mat<R> target = 16.0 * c * Mat<R>::Identity();
    double lo = std::numeric_limits<double>::infinity(), hi = 0, sum = 0;
    for (auto& p : res.psi) {
        double d = (brace_tau(Mat<R>(p.beta * p.alpha.adjoint()), cfg.tau) + target).norm();
        lo = std::min(lo, d);
        hi = std::max(hi, d);
        sum += d;
    }
    rep.obstruction = {lo, sum / g.sites(), hi};
    auto S = selfdual_part(curvature(g, res.A));
    for (auto& m : S.c02) rep.f02_norm_sq += 4.0 * g.weight() * m.squaredNorm();  // |dzbar1^dzbar2|^2 = 4
    auto db = dbar_star(g, res.A, beta_part(res.psi));
    rep.dbar_star_beta_sq = l2_inner(g, db, db).real();
    rep.doubler_fraction = detail::doubler_fraction(g, res.psi);
    return rep;
}

struct StokesPairing {
    cplx pairing{0};  // int <eta02, F02>
    cplx wedge{0};    // int eta20 ^ tr F
    double defect() const { return std::abs(pairing) + std::abs(pairing + wedge); }
};

// Both terms are exact differences summed over the torus, and they cancel each other.
template <int R>
StokesPairing stokes_pairing(const LatticeGeometry& g, const LatticeConnection<R>& A, cplx eta02) {
    auto F = curvature(g, A);
    auto S = selfdual_part(F);
    // components of eta20 = -conj(eta02) dz1^dz2 in pairs 01,02,03,12,13,23
    const cplx k = -std::conj(eta02);
    const std::array<cplx, 6> e = {0.0, k, I * k, I * k, -k, 0.0};
    StokesPairing out;
    for (int s = 0; s < g.sites(); ++s) {
        out.pairing += 4.0 * std::conj(eta02) * S.c02[s].trace();
        std::array<cplx, 6> t;
        for (int p = 0; p < 6; ++p) t[p] = F.f[p][s].trace();
        out.wedge += e[0] * t[5] - e[1] * t[4] + e[2] * t[3] + e[3] * t[2] - e[4] * t[1] + e[5] * t[0];
    }
    out.pairing *= g.weight();
    out.wedge *= g.weight();
    return out;
}

template <int R>
double stokes_pairing_check(const LatticeGeometry& g, const LatticeConnection<R>& A, cplx eta02) {
    return stokes_pairing(g, A, eta02).defect();
}

// max over sites of the mismatch between the monopole residual and its Kaehler form:
// r1 = sqrt2 (dbar alpha + dbar^* beta), r2 = 4 [[f11, f02^*], [f02, -f11]]
template <int R>
double kahler_identity_defect(const LatticeGeometry& g, const SpinorField<R>& psi, const LatticeConnection<R>& A,
                              double tau, const PerturbationField& eta) {
    auto m = monopole_residual(g, psi, A, tau, eta);
    auto k = kahler_residual(g, alpha_part(psi), beta_part(psi), A, tau, eta);
    const double r2 = std::sqrt(2.0);
    double d = 0;
    for (int s = 0; s < g.sites(); ++s) {
        d = std::max(d, (m.r1[s].alpha - r2 * k.dirac.e1[s]).norm());
        d = std::max(d, (m.r1[s].beta - r2 * k.dirac.e2[s]).norm());
        d = std::max(d, (m.r2[s](0, 0) - 4.0 * k.f11[s]).norm());
        d = std::max(d, (m.r2[s](1, 1) + 4.0 * k.f11[s]).norm());
        d = std::max(d, (m.r2[s](1, 0) - 4.0 * k.f02[s]).norm());
        d = std::max(d, (m.r2[s](0, 1) - 4.0 * k.f02[s].adjoint()).norm());
    }
    return d;
}

// relative defects of <dbar a, phi> = <a, dbar^adj phi> and <dbar1 phi, b> = <phi, dbar^* b>
template <int R>
double dbar_adjoint_defect(const LatticeGeometry& g, const LatticeConnection<R>& A, const VecField<R>& a,
                           const VecField<R>& b, const ZeroOneField<R>& phi) {
    const cplx l1 = l2_inner(g, dbar(g, A, a), phi), r1 = l2_inner(g, a, dbar_adjoint(g, A, phi));
    const cplx l2 = l2_inner(g, dbar1(g, A, phi), b), r2 = l2_inner(g, phi, dbar_star(g, A, b));
    return std::max(std::abs(l1 - r1) / std::max(std::abs(l1), 1e-300),
                    std::abs(l2 - r2) / std::max(std::abs(l2), 1e-300));
}

}  // namespace mnpl
