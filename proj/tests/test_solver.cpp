#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include <mnpl/solver.hpp>

#include "lattice_util.hpp"
#include "util.hpp"

using namespace mnpl;
using namespace testutil;

namespace {

template <int R>
Configuration<R> shifted(const Configuration<R>& x, double e, const Configuration<R>& d) {
    Configuration<R> y = x;
    for (std::size_t s = 0; s < y.psi.size(); ++s) y.psi[s] += cplx(e) * d.psi[s];
    for (int mu = 0; mu < 4; ++mu)
        for (std::size_t s = 0; s < y.psi.size(); ++s) y.A.a[mu][s] += e * d.A.a[mu][s];
    return y;
}

template <int R>
double pairing(const EnergyGradient<R>& g, const Configuration<R>& d) {
    double t = 0;
    for (std::size_t s = 0; s < d.psi.size(); ++s) t += std::real(inner(g.psi[s], d.psi[s]));
    for (int mu = 0; mu < 4; ++mu)
        for (std::size_t s = 0; s < d.psi.size(); ++s) t += std::real(hs_inner(g.a.a[mu][s], d.A.a[mu][s]));
    return t;
}

template <int R>
void gradient_check(double tau, std::uint64_t seed) {
    LatticeGeometry g(4);
    std::mt19937_64 rng(seed);
    Configuration<R> x{random_spinor<R>(g, 0.6, rng), random_connection<R>(g, 0.4, rng)};
    auto eta = constant_perturbation(g, SelfDualFormFiber{0.2 * I, cplx(0.05, 0.1), -cplx(0.05, -0.1)});
    auto G = energy_gradient(g, x.psi, x.A, tau, eta);
    EXPECT_NEAR(G.energy, energy(g, x.psi, x.A, tau, eta), 1e-12 * G.energy);
    int worst = 0;
    double worst_err = 0;
    for (int k = 0; k < 100; ++k) {
        Configuration<R> d{random_spinor<R>(g, 1.0, rng), random_connection<R>(g, 1.0, rng)};
        const double e = 1e-5;
        auto p = shifted(x, e, d), m = shifted(x, -e, d);
        const double fd = (energy(g, p.psi, p.A, tau, eta) - energy(g, m.psi, m.A, tau, eta)) / (2 * e);
        const double an = pairing(G, d);
        const double err = std::abs(fd - an) / std::max(std::abs(an), 1e-300);
        if (err > worst_err) { worst_err = err; worst = k; }
    }
    EXPECT_LT(worst_err, 1e-6) << "direction " << worst;
}

}  // namespace

TEST(Energy, Vacuum) {
    LatticeGeometry g(4);
    Configuration<2> x{SpinorField<2>(std::size_t(g.sites())), LatticeConnection<2>(g)};
    auto eta = constant_perturbation(g, {});
    auto G = energy_gradient(g, x.psi, x.A, 0.5, eta);
    EXPECT_EQ(G.energy, 0.0);
    double gn = 0;
    for (auto& p : G.psi) gn += p.norm_sq();
    for (auto& f : G.a.a)
        for (auto& m : f) gn += m.squaredNorm();
    EXPECT_EQ(gn, 0.0);
}

TEST(Energy, MatchesResidualNorm) {
    LatticeGeometry g(4);
    std::mt19937_64 rng(3);
    auto psi = random_spinor<2>(g, 0.5, rng);
    auto A = random_connection<2>(g, 0.5, rng);
    auto eta = constant_perturbation(g, SelfDualFormFiber::from_frame(0.1 * I, 0.2 * I, -0.3 * I));
    auto r = monopole_residual(g, psi, A, 0.4, eta);
    double t = 0;
    for (auto& b : r.r2) t += b.hs_norm_sq();
    t = l2_norm_sq(g, r.r1) + g.weight() * t;
    EXPECT_NEAR(energy(g, psi, A, 0.4, eta), t, 1e-12 * t);
}

TEST(Energy, QuarticFiberExpansion) {
    // A = 0, eta = 0, psi constant: E(t) = t^4 |mu(psi)|^2 vol
    LatticeGeometry g(4);
    LatticeConnection<2> A(g);
    std::mt19937_64 rng(4);
    SpinorFiber<2> p0(Vec<2>(crand(rng), crand(rng)), Vec<2>(crand(rng), crand(rng)));
    auto eta = constant_perturbation(g, {});
    for (double tau : {0.0, 1.0})
        for (double t : {0.5, 1.0, 2.0}) {
            SpinorField<2> psi(std::size_t(g.sites()), cplx(t) * p0);
            const double want = std::pow(t, 4) * mu(p0, tau).hs_norm_sq() * LatticeGeometry::volume();
            EXPECT_NEAR(energy(g, psi, A, tau, eta), want, 1e-10 * want);
        }
}

TEST(Gradient, FiniteDifferences) {
    gradient_check<1>(0.0, 1);
    gradient_check<1>(1.0, 2);
    gradient_check<2>(0.0, 3);
    gradient_check<2>(1.0, 4);
    gradient_check<3>(0.5, 5);
}

TEST(Flow, VacuumStays) {
    LatticeGeometry g(4);
    SpinorField<2> psi(std::size_t(g.sites()));
    LatticeConnection<2> A(g);
    FlowConfig c;
    c.steps = 5;
    auto r = flow(g, psi, A, constant_perturbation(g, {}), c);
    EXPECT_EQ(r.energy, 0.0);
    EXPECT_EQ(r.status, FlowStatus::converged);
}

TEST(Flow, SmallStartReachesVacuumMonotonically) {
    LatticeGeometry g(8);
    std::mt19937_64 rng(6);
    auto psi = random_spinor<2>(g, 1e-3, rng);
    auto A = random_connection<2>(g, 1e-3, rng);
    FlowConfig c;
    c.steps = 3000;
    c.tolerance = 1e-7;
    c.tau = 0.0;
    auto t0 = std::chrono::steady_clock::now();
    auto r = flow(g, psi, A, constant_perturbation(g, {}), c);
    auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("energy %.3e after %d steps (%s), %.2fs\n", r.energy, r.steps, to_string(r.status), dt);
    EXPECT_LT(r.energy, 1e-7);
    for (std::size_t k = 1; k < r.trace.size(); ++k) EXPECT_LE(r.trace[k], r.trace[k - 1]);
    auto r2 = flow(g, psi, A, constant_perturbation(g, {}), c);
    EXPECT_EQ(r.trace, r2.trace);
}

TEST(Flow, InvalidConfig) {
    LatticeGeometry g(4);
    SpinorField<1> psi(std::size_t(g.sites()));
    LatticeConnection<1> A(g);
    FlowConfig c;
    c.steps = 0;
    EXPECT_THROW(flow(g, psi, A, constant_perturbation(g, {}), c), InvalidArgument);
}
