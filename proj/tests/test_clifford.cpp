#include <gtest/gtest.h>

#include <cmath>

#include "util.hpp"

using namespace mnpl;
using namespace testutil;

namespace {

// orthonormal basis of sl(C^2): Pauli / sqrt2
std::array<Eigen::Matrix2cd, 3> pauli_basis() {
    Eigen::Matrix2cd x, y, z;
    x << 0, 1, 1, 0;
    y << 0, -I, I, 0;
    z << 1, 0, 0, -1;
    const double r = 1 / std::sqrt(2.0);
    return {r * x, r * y, r * z};
}

// orthogonal projections by expansion in an explicit orthonormal basis
Eigen::MatrixXcd project_sl2_gl(const Eigen::MatrixXcd& X, int n) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (auto& s : pauli_basis())
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, n);
                e(i, j) = 1;
                Eigen::MatrixXcd B = Eigen::kroneckerProduct(s, e);
                out += hs_inner(B, X) * B;
            }
    return out;
}

Eigen::MatrixXcd project_sl2_id(const Eigen::MatrixXcd& X, int n) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Identity(n, n) / std::sqrt(double(n));
    for (auto& s : pauli_basis()) {
        Eigen::MatrixXcd B = Eigen::kroneckerProduct(s, e);
        out += hs_inner(B, X) * B;
    }
    return out;
}

}  // namespace

TEST(Projections, Examples) {
    Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    EXPECT_LT(project_traceless(id).norm(), 1e-15);
    EXPECT_LT((project_trace(id) - id).norm(), 1e-15);
    Eigen::Matrix2cd d;
    d << 1, 0, 0, -1;
    EXPECT_LT((project_traceless(d) - d).norm(), 1e-15);
    EXPECT_LT(project_trace(d).norm(), 1e-15);
}

TEST(Projections, AlgebraRandom) {
    std::mt19937_64 rng(1);
    for (int n = 1; n <= 4; ++n)
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::MatrixXcd f = mrand(n, rng);
            Eigen::MatrixXcd p = project_traceless(f), q = project_trace(f);
            EXPECT_LT((p + q - f).norm(), 1e-12);
            EXPECT_LT((project_traceless(p) - p).norm(), 1e-12);
            EXPECT_LT((project_trace(q) - q).norm(), 1e-12);
            EXPECT_LT(project_trace(p).norm(), 1e-12);
            EXPECT_LT(std::abs(hs_inner(p, q)), 1e-12);
        }
}

TEST(Projections, BlockLevel) {
    std::mt19937_64 rng(2);
    for (int n = 1; n <= 4; ++n)
        for (int trial = 0; trial < 10; ++trial) {
            auto X = BlockEndomorphism<>::from_dense(mrand(2 * n, rng));
            auto P = block_P(X), Q = block_Q(X);
            EXPECT_LT((block_P(P) - P).hs_norm(), 1e-12);
            EXPECT_LT((block_Q(Q) - Q).hs_norm(), 1e-12);
            EXPECT_LT(block_P(Q).hs_norm(), 1e-12);
            EXPECT_LT(block_Q(P).hs_norm(), 1e-12);
            // P + Q is the projection onto sl(C^2) (x) gl(C^n)
            EXPECT_LT(((P + Q).dense() - project_sl2_gl(X.dense(), n)).norm(), 1e-12);
            EXPECT_LT((Q.dense() - project_sl2_id(X.dense(), n)).norm(), 1e-12);
        }
}

TEST(BraceTau, Examples) {
    Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    EXPECT_LT(brace_tau(id, 0.0).norm(), 1e-15);
    EXPECT_LT((brace_tau(id, 1.0) - id).norm(), 1e-15);
    Eigen::Matrix2cd f, want;
    f << 2, 0, 0, 0;
    want << 1.5, 0, 0, -0.5;
    EXPECT_LT((brace_tau(f, 0.5) - want).norm(), 1e-15);
    EXPECT_THROW(brace_tau(f, 1.5), InvalidArgument);
}

TEST(BlockEndomorphism, MatchesDense) {
    std::mt19937_64 rng(3);
    for (int n = 1; n <= 3; ++n) {
        Eigen::MatrixXcd a = mrand(2 * n, rng), b = mrand(2 * n, rng);
        auto A = BlockEndomorphism<>::from_dense(a), B = BlockEndomorphism<>::from_dense(b);
        EXPECT_LT(((A * B).dense() - a * b).norm(), 1e-12);
        EXPECT_LT((A.adjoint().dense() - a.adjoint()).norm(), 1e-12);
        EXPECT_LT(std::abs(A.trace() - a.trace()), 1e-12);
        double ss = 0;
        for (int i = 0; i < 2 * n; ++i)
            for (int j = 0; j < 2 * n; ++j) ss += std::norm(a(i, j));
        EXPECT_NEAR(A.hs_norm(), std::sqrt(ss), 1e-12);
        // gl(C^2) (x) gl(C^n) agrees with the block layout
        Eigen::Matrix2cd s = mrand(2, rng);
        Eigen::MatrixXcd e = mrand(n, rng);
        auto K = BlockEndomorphism<>::from_dense(Eigen::kroneckerProduct(s, e));
        EXPECT_LT((K(1, 0) - s(1, 0) * e).norm(), 1e-12);
        auto psi = srand_fiber(n, rng);
        EXPECT_LT((A.apply(psi).flat() - a * psi.flat()).norm(), 1e-12);
    }
}

TEST(SpinorFiber, FlatIsometry) {
    std::mt19937_64 rng(4);
    auto p = srand_fiber(3, rng);
    EXPECT_NEAR(p.flat().squaredNorm(), p.norm_sq(), 1e-12);
    auto q = TwistedSpinorFiber::from_flat(p.flat());
    EXPECT_LT((q.flat() - p.flat()).norm(), 0.0 + 1e-15);
    EXPECT_THROW(TwistedSpinorFiber::from_flat(Eigen::VectorXcd(3)), InvalidArgument);
}

TEST(Mu, Examples) {
    TwistedSpinorFiber zero(2);
    EXPECT_EQ(mu(zero, 0.3).hs_norm(), 0.0);
    TwistedSpinorFiber e(Eigen::VectorXcd::Ones(1), Eigen::VectorXcd::Zero(1));
    auto m = mu(e, 1.0);
    EXPECT_NEAR(m(0, 0)(0, 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(m(1, 1)(0, 0).real(), -0.5, 1e-15);
    EXPECT_EQ(std::abs(m(0, 1)(0, 0)), 0.0);
    EXPECT_NEAR(m.hs_norm(), 1 / std::sqrt(2.0), 1e-15);
    std::mt19937_64 rng(1);
    auto a = srand_fiber(2, rng), b = srand_fiber(3, rng);
    EXPECT_THROW(mu(a, b, 0.0), InvalidArgument);
}

TEST(Mu, IndependentProjectionOracle) {
    std::mt19937_64 rng(5);
    for (int n = 1; n <= 4; ++n)
        for (double tau : {0.0, 0.4, 1.0})
            for (int t = 0; t < 10; ++t) {
                auto psi = srand_fiber(n, rng), phi = srand_fiber(n, rng);
                Eigen::MatrixXcd X = psi.flat() * phi.flat().adjoint();
                Eigen::MatrixXcd want = project_sl2_gl(X, n) - (1 - tau) * project_sl2_id(X, n);
                EXPECT_LT((mu(psi, phi, tau).dense() - want).norm(), 1e-12);
                auto m = mu(psi, tau);
                EXPECT_LT((m.dense() - m.dense().adjoint()).norm(), 1e-12);  // Hermitian as stored
                EXPECT_LT(std::abs(m(0, 0).trace() + m(1, 1).trace()), 1e-12);
                EXPECT_GE(m.hs_norm() + 1e-12, mu(psi, 0.0).hs_norm());
            }
}

TEST(Mu, KahlerBlocksAgree) {
    std::mt19937_64 rng(6);
    for (int n = 1; n <= 3; ++n)
        for (double tau : {0.0, 0.7, 1.0}) {
            auto psi = srand_fiber(n, rng);
            EXPECT_LT((mu_kahler_blocks(psi.alpha, psi.beta, tau) - mu(psi, tau)).hs_norm(), 1e-12);
        }
    Eigen::VectorXcd a = Eigen::VectorXcd::Ones(1), b = Eigen::VectorXcd::Zero(1);
    auto k = mu_kahler_blocks(a, b, 1.0);
    EXPECT_NEAR(k(0, 0)(0, 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(k(1, 1)(0, 0).real(), -0.5, 1e-15);
    EXPECT_EQ(mu_kahler_blocks(b, b, 0.5).hs_norm(), 0.0);
}

TEST(Mu, UnitaryEquivariance) {
    std::mt19937_64 rng(7);
    for (int n = 1; n <= 4; ++n) {
        auto psi = srand_fiber(n, rng);
        Eigen::MatrixXcd u = unitary(n, rng);
        TwistedSpinorFiber up(u * psi.alpha, u * psi.beta);
        Eigen::MatrixXcd U = Eigen::kroneckerProduct(Eigen::Matrix2cd::Identity(), u);
        for (double tau : {0.0, 0.5, 1.0})
            EXPECT_LT((mu(up, tau).dense() - U * mu(psi, tau).dense() * U.adjoint()).norm(), 1e-12);
    }
}

TEST(ZeroDivisor, Examples) {
    Eigen::Vector2cd e1(1, 0), e2(0, 1);
    EXPECT_NEAR(zero_divisor_defect(e1, e2), 1.0, 1e-15);
    EXPECT_NEAR(zero_divisor_defect(e1, e1), std::sqrt(0.5), 1e-15);
    EXPECT_EQ(zero_divisor_defect(Eigen::Vector2cd(3.0, I), Eigen::Vector2cd::Zero()), 0.0);
    EXPECT_THROW(zero_divisor_defect(Eigen::VectorXcd(2), Eigen::VectorXcd(3)), InvalidArgument);
}

TEST(ZeroDivisor, IdentityAndBound) {
    std::mt19937_64 rng(8);
    for (int n : {1, 2, 3, 5})
        for (int t = 0; t < 200; ++t) {
            auto a = vrand(n, rng), b = vrand(n, rng);
            const double d = zero_divisor_defect(a, b);
            const double want = a.squaredNorm() * b.squaredNorm() - std::norm(b.dot(a)) / n;
            EXPECT_NEAR(d * d, want, 1e-12 * (1 + want));
            EXPECT_GE(d * d + 1e-12, (1.0 - 1.0 / n) * a.squaredNorm() * b.squaredNorm());
        }
}

TEST(Decoupling, ExamplesAndChain) {
    Eigen::Vector2cd e1(1, 0), e2(0, 1);
    EXPECT_NEAR(decoupling_pairing(e1, e1, 0.0), 0.5, 1e-15);
    EXPECT_NEAR(decoupling_pairing(Eigen::Vector2cd(2, 0), Eigen::Vector2cd(0, 3), 0.2), 36.0, 1e-12);
    EXPECT_EQ(decoupling_pairing(Eigen::Vector2cd(1, I), Eigen::Vector2cd::Zero(), 0.3), 0.0);
    std::mt19937_64 rng(9);
    for (int n = 1; n <= 4; ++n)
        for (int t = 0; t < 200; ++t) {
            auto a = vrand(n, rng), b = vrand(n, rng);
            std::uniform_real_distribution<double> u(0, 1);
            const double tau = u(rng);
            const double ab = a.squaredNorm() * b.squaredNorm();
            const double v = decoupling_pairing(a, b, tau);
            EXPECT_NEAR(v, ab - (1 - tau) / n * std::norm(a.dot(b)), 1e-12 * (1 + ab));
            EXPECT_GE(v + 1e-12 * ab, (1 - (1 - tau) / n) * ab);
            EXPECT_LE(v, ab * (1 + 1e-12));
        }
}

TEST(Gamma, Examples) {
    EXPECT_EQ(gamma_selfdual({}).norm(), 0.0);
    SelfDualFormFiber iw{2.0 * I, 0, 0};
    Mat2 want;
    want << 8, 0, 0, -8;
    EXPECT_LT((gamma_selfdual(iw) - want).norm(), 1e-15);
    SelfDualFormFiber e02{0, -1.0, 1.0};  // dzbar1^dzbar2 - dz1^dz2 (imaginary-valued)
    EXPECT_TRUE(e02.is_imaginary());
    Mat2 g = gamma_selfdual(e02);
    EXPECT_NEAR(std::abs(g(1, 0)), 16.0, 1e-14);
    EXPECT_NEAR(g.norm(), gamma_isometry * std::sqrt(e02.norm_sq()), 1e-12);
}

TEST(Gamma, ConformalHermitianAndPauliAgreement) {
    std::mt19937_64 rng(10);
    for (int t = 0; t < 50; ++t) {
        std::array<cplx, 6> f;
        for (auto& c : f) c = crand(rng);
        auto e = selfdual_coordinates(f);
        Mat2 g = gamma_selfdual(e);
        EXPECT_NEAR(g.norm(), gamma_isometry * std::sqrt(e.norm_sq()), 1e-12);
        EXPECT_LT(std::abs(g.trace()), 1e-12);
        // the Pauli Clifford product sees only the self-dual part
        EXPECT_LT((4.0 * clifford_two_form(f) - g).norm(), 1e-12);
        // imaginary self-dual input gives a Hermitian matrix
        std::array<cplx, 3> s{I * crand(rng).real(), I * crand(rng).real(), I * crand(rng).real()};
        auto im = SelfDualFormFiber::from_frame(s[0], s[1], s[2]);
        EXPECT_TRUE(im.is_imaginary());
        Mat2 h = gamma_selfdual(im);
        EXPECT_LT((h - h.adjoint()).norm(), 1e-12);
    }
    // anti-self-dual forms are killed
    std::array<cplx, 6> asd{1, 0, 0, 0, 0, -1};
    EXPECT_LT(clifford_two_form(asd).norm(), 1e-15);
    // dz1^dz2 = omega_2 + i omega_3
    auto dz = selfdual_coordinates({0, 1, I, I, -1, 0});
    EXPECT_NEAR(std::abs(dz.c20 - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(dz.c02), 0.0, 1e-15);
}
