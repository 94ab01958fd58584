// Walk through the library on the flat 4-torus: constants, index count, abelian
// obstruction, and a short flow with a holomorphic (0,2) perturbation.
#include <cstdio>

#include <mnpl/hodge.hpp>
#include <mnpl/kahler.hpp>
#include <mnpl/topology.hpp>

using namespace mnpl;

int main() {
    SearchBudget budget;
    budget.samples = 20000;
    budget.restarts = 4;
    const double c = properness_constant(2, 1.0, budget, 1);
    const double rho = identity_obstruction(2, 1.0, 1.0, budget, 1);
    std::printf("c(2, 1) = %.6f   rho(2, 1, 1) = %.6f\n", c, rho);

    // K3 with the canonical structure and a trivial rank-2 twist
    TopologicalDatum k3{2, 0, 0, 0, 0, 0, 3, -16};
    std::printf("K3, n=2: expected dimension %lld\n", (long long)expected_dimension(k3));

    LatticeGeometry g(8);
    auto eta = constant_perturbation(g, SelfDualFormFiber::from_frame(0.1 * I, 0, 0));
    auto rep = emptiness_check(g, 2, eta, LatticeConnection<2>(g));
    std::printf("abelian check: %s, |h| = %.3f, residual %.4f\n", to_string(rep.verdict), rep.obstruction.norm(),
                rep.residual);

    FlowConfig cfg;
    cfg.tau = 1.0;
    cfg.steps = 400;
    cfg.restarts = 2;
    cfg.seed = 3;
    auto k = kahler_emptiness_experiment<2>(g, 0.05, cfg, budget, 1, false);
    // a short budget: the verdict only says the flow has not yet gone below the threshold
    std::printf("eta02 = 0.05: best energy %.4g (%s, %d runs), threshold %.4g -> %s\n", k.best_energy,
                to_string(k.status), int(k.runs.size()), k.threshold, to_string(k.verdict));
    std::printf("  F02 %.3g, doubler share %.2f\n", k.f02_norm_sq, k.doubler_fraction);
}
