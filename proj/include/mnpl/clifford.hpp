#pragma once
// Fiberwise algebra of C^2 (x) C^n: projections, the quadratic map mu,
// Clifford multiplication of self-dual forms and the Kaehler block form.
#include <array>
#include <cmath>

#include "types.hpp"

namespace mnpl {

// Hilbert-Schmidt pairing, conjugate-linear in the first slot.
template <class A, class B>
cplx hs_inner(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return (a.conjugate().cwiseProduct(b)).sum();
}

template <int R = Dyn>
struct SpinorFiber {
    Vec<R> alpha, beta;

    SpinorFiber() {
        if constexpr (R != Dyn) { alpha.setZero(); beta.setZero(); }
    }
    explicit SpinorFiber(int n) : alpha(Vec<R>::Zero(n)), beta(Vec<R>::Zero(n)) {}
    SpinorFiber(Vec<R> a, Vec<R> b) : alpha(std::move(a)), beta(std::move(b)) {
        if (alpha.size() != beta.size()) throw InvalidArgument("alpha/beta rank mismatch");
    }

    int rank() const { return int(alpha.size()); }
    double norm_sq() const { return alpha.squaredNorm() + beta.squaredNorm(); }
    double norm() const { return std::sqrt(norm_sq()); }

    // Psi = e+ (x) alpha + e- (x) beta, flat index s*n + i
    Eigen::VectorXcd flat() const {
        Eigen::VectorXcd v(2 * rank());
        v << alpha, beta;
        return v;
    }
    static SpinorFiber from_flat(const Eigen::VectorXcd& v) {
        require(v.size() % 2 == 0 && v.size() > 0, "flat spinor needs even length");
        const int n = int(v.size() / 2);
        if constexpr (R != Dyn) require(n == R, "flat spinor rank mismatch");
        return SpinorFiber(v.head(n), v.tail(n));
    }

    SpinorFiber& operator+=(const SpinorFiber& o) { alpha += o.alpha; beta += o.beta; return *this; }
    SpinorFiber& operator-=(const SpinorFiber& o) { alpha -= o.alpha; beta -= o.beta; return *this; }
    SpinorFiber& operator*=(cplx s) { alpha *= s; beta *= s; return *this; }
    friend SpinorFiber operator+(SpinorFiber a, const SpinorFiber& b) { return a += b; }
    friend SpinorFiber operator-(SpinorFiber a, const SpinorFiber& b) { return a -= b; }
    friend SpinorFiber operator*(cplx s, SpinorFiber a) { return a *= s; }
};

using TwistedSpinorFiber = SpinorFiber<Dyn>;

template <int R>
cplx inner(const SpinorFiber<R>& a, const SpinorFiber<R>& b) {
    return a.alpha.dot(b.alpha) + a.beta.dot(b.beta);  // Eigen dot conjugates the left
}

// 2x2 grid of n x n blocks, block (s,t) at b[2s+t].
template <int R = Dyn>
struct BlockEndomorphism {
    std::array<Mat<R>, 4> b;

    BlockEndomorphism() {
        if constexpr (R != Dyn) for (auto& m : b) m.setZero();
    }
    explicit BlockEndomorphism(int n) {
        for (auto& m : b) m = Mat<R>::Zero(n, n);
    }

    int rank() const { return int(b[0].rows()); }
    Mat<R>& operator()(int s, int t) { return b[2 * s + t]; }
    const Mat<R>& operator()(int s, int t) const { return b[2 * s + t]; }

    Eigen::MatrixXcd dense() const {
        const int n = rank();
        Eigen::MatrixXcd d(2 * n, 2 * n);
        for (int s = 0; s < 2; ++s)
            for (int t = 0; t < 2; ++t) d.block(s * n, t * n, n, n) = (*this)(s, t);
        return d;
    }
    static BlockEndomorphism from_dense(const Eigen::MatrixXcd& d) {
        require(d.rows() == d.cols() && d.rows() % 2 == 0, "dense endomorphism must be 2n x 2n");
        const int n = int(d.rows() / 2);
        BlockEndomorphism e(n);
        for (int s = 0; s < 2; ++s)
            for (int t = 0; t < 2; ++t) e(s, t) = d.block(s * n, t * n, n, n);
        return e;
    }

    BlockEndomorphism adjoint() const {
        BlockEndomorphism r(rank());
        for (int s = 0; s < 2; ++s)
            for (int t = 0; t < 2; ++t) r(s, t) = (*this)(t, s).adjoint();
        return r;
    }
    cplx trace() const { return b[0].trace() + b[3].trace(); }
    double hs_norm_sq() const {
        double s = 0;
        for (auto& m : b) s += m.squaredNorm();
        return s;
    }
    double hs_norm() const { return std::sqrt(hs_norm_sq()); }

    SpinorFiber<R> apply(const SpinorFiber<R>& p) const {
        return SpinorFiber<R>(b[0] * p.alpha + b[1] * p.beta, b[2] * p.alpha + b[3] * p.beta);
    }

    BlockEndomorphism& operator+=(const BlockEndomorphism& o) { for (int k = 0; k < 4; ++k) b[k] += o.b[k]; return *this; }
    BlockEndomorphism& operator-=(const BlockEndomorphism& o) { for (int k = 0; k < 4; ++k) b[k] -= o.b[k]; return *this; }
    BlockEndomorphism& operator*=(cplx s) { for (auto& m : b) m *= s; return *this; }
    friend BlockEndomorphism operator+(BlockEndomorphism a, const BlockEndomorphism& o) { return a += o; }
    friend BlockEndomorphism operator-(BlockEndomorphism a, const BlockEndomorphism& o) { return a -= o; }
    friend BlockEndomorphism operator*(cplx s, BlockEndomorphism a) { return a *= s; }
    friend BlockEndomorphism operator*(const BlockEndomorphism& x, const BlockEndomorphism& y) {
        BlockEndomorphism r(x.rank());
        for (int s = 0; s < 2; ++s)
            for (int t = 0; t < 2; ++t) r(s, t) = x(s, 0) * y(0, t) + x(s, 1) * y(1, t);
        return r;
    }
};

template <int R>
cplx hs_inner(const BlockEndomorphism<R>& x, const BlockEndomorphism<R>& y) {
    cplx s = 0;
    for (int k = 0; k < 4; ++k) s += hs_inner(x.b[k], y.b[k]);
    return s;
}

// ---- p, q and {.}_tau on gl(C^n)

template <class M>
auto project_trace(const Eigen::MatrixBase<M>& f) {
    require(f.rows() == f.cols(), "square matrix expected");
    using P = Eigen::Matrix<cplx, M::RowsAtCompileTime, M::ColsAtCompileTime>;
    const auto n = f.rows();
    return P(P::Identity(n, n) * (f.trace() / double(n)));
}

template <class M>
auto project_traceless(const Eigen::MatrixBase<M>& f) {
    using P = Eigen::Matrix<cplx, M::RowsAtCompileTime, M::ColsAtCompileTime>;
    return P(f - project_trace(f));
}

// (f)_0 + (tau/n) tr(f) id
template <class M>
auto brace_tau(const Eigen::MatrixBase<M>& f, double tau) {
    using P = Eigen::Matrix<cplx, M::RowsAtCompileTime, M::ColsAtCompileTime>;
    require(f.rows() == f.cols(), "square matrix expected");
    check_tau(tau);
    P r = f;
    r.diagonal().array() -= (1.0 - tau) * f.trace() / double(f.rows());
    return r;
}

// ---- P = ( )_0 (x) p and Q = ( )_0 (x) q on block endomorphisms

template <int R>
BlockEndomorphism<R> c2_traceless(const BlockEndomorphism<R>& x) {
    BlockEndomorphism<R> r = x;
    Mat<R> d = 0.5 * (x(0, 0) - x(1, 1));
    r(0, 0) = d;
    r(1, 1) = -d;
    return r;
}

template <int R>
BlockEndomorphism<R> block_P(const BlockEndomorphism<R>& x) {
    auto r = c2_traceless(x);
    for (auto& m : r.b) m = project_traceless(m);
    return r;
}

template <int R>
BlockEndomorphism<R> block_Q(const BlockEndomorphism<R>& x) {
    auto r = c2_traceless(x);
    for (auto& m : r.b) m = project_trace(m);
    return r;
}

template <int R>
BlockEndomorphism<R> block_brace(const BlockEndomorphism<R>& x, double tau) {
    auto r = c2_traceless(x);
    for (auto& m : r.b) m = brace_tau(m, tau);
    return r;
}

// Psi Phi^* : Xi -> <Phi, Xi> Psi
template <int R>
BlockEndomorphism<R> outer(const SpinorFiber<R>& psi, const SpinorFiber<R>& phi) {
    require(psi.rank() == phi.rank(), "rank mismatch");
    BlockEndomorphism<R> x(psi.rank());
    x(0, 0) = psi.alpha * phi.alpha.adjoint();
    x(0, 1) = psi.alpha * phi.beta.adjoint();
    x(1, 0) = psi.beta * phi.alpha.adjoint();
    x(1, 1) = psi.beta * phi.beta.adjoint();
    return x;
}

template <int R>
BlockEndomorphism<R> mu(const SpinorFiber<R>& psi, const SpinorFiber<R>& phi, double tau) {
    check_tau(tau);
    return block_brace(outer(psi, phi), tau);
}

template <int R>
BlockEndomorphism<R> mu(const SpinorFiber<R>& psi, double tau) { return mu(psi, psi, tau); }

// Kaehler form: beta is the coefficient against the unit (0,2) frame.
template <class VA, class VB>
auto mu_kahler_blocks(const Eigen::MatrixBase<VA>& alpha, const Eigen::MatrixBase<VB>& beta, double tau) {
    constexpr int R = VA::RowsAtCompileTime;
    require(alpha.size() == beta.size(), "rank mismatch");
    check_tau(tau);
    Mat<R> aa = brace_tau(alpha * alpha.adjoint(), tau);
    Mat<R> bb = brace_tau(beta * beta.adjoint(), tau);
    BlockEndomorphism<R> r(int(alpha.size()));
    r(0, 0) = 0.5 * (aa - bb);
    r(1, 1) = 0.5 * (bb - aa);
    r(0, 1) = brace_tau(alpha * beta.adjoint(), tau);
    r(1, 0) = brace_tau(beta * alpha.adjoint(), tau);
    return r;
}

// |(alpha beta^*)_0|
template <class VA, class VB>
double zero_divisor_defect(const Eigen::MatrixBase<VA>& alpha, const Eigen::MatrixBase<VB>& beta) {
    require(alpha.size() == beta.size() && alpha.size() > 0, "dimension mismatch");
    return project_traceless(alpha * beta.adjoint()).norm();
}

// Re <beta, {beta alpha^*}_tau alpha>
template <class VA, class VB>
double decoupling_pairing(const Eigen::MatrixBase<VA>& alpha, const Eigen::MatrixBase<VB>& beta, double tau) {
    require(alpha.size() == beta.size() && alpha.size() > 0, "dimension mismatch");
    check_tau(tau);
    return std::real(beta.dot(brace_tau(beta * alpha.adjoint(), tau) * alpha));
}

// ---- self-dual forms

// Coordinates in C omega_g (+) Lambda^{2,0} (+) Lambda^{0,2}. c11 is the
// Lambda_g contraction, so omega_g itself has c11 = 2.
struct SelfDualFormFiber {
    cplx c11{0}, c20{0}, c02{0};

    // from coefficients against omega_1, omega_2, omega_3
    static SelfDualFormFiber from_frame(cplx s1, cplx s2, cplx s3) {
        return {2.0 * s1, 0.5 * (s2 - I * s3), 0.5 * (s2 + I * s3)};
    }
    std::array<cplx, 3> frame() const { return {0.5 * c11, c20 + c02, I * (c20 - c02)}; }

    // pointwise form norm^2: sum over mu<nu of |F_mu nu|^2
    double norm_sq() const {
        auto s = frame();
        return 2.0 * (std::norm(s[0]) + std::norm(s[1]) + std::norm(s[2]));
    }
    bool is_imaginary(double tol = 1e-12) const {
        return std::abs(c02 + std::conj(c20)) <= tol && std::abs(c11.real()) <= tol;
    }
};

// Clifford multiplication on S+, Kaehler normalization:
// gamma = 4 [[-i Lambda, -*(eta20 ^ .)], [eta02, i Lambda]] in unit frames,
// scaled so that |gamma(eta)|_HS = 8 |eta| on all of Lambda^2_+.
inline Mat2 gamma_selfdual(const SelfDualFormFiber& e) {
    Mat2 g;
    g << -4.0 * I * e.c11, -16.0 * e.c20, 16.0 * e.c02, 4.0 * I * e.c11;
    return g;
}

inline constexpr double gamma_isometry = 8.0;

// Euclidean Clifford map c_mu : S+ -> S- (Pauli form), mu = 0..3.
inline Mat2 pauli_clifford(int mu) {
    Mat2 c;
    switch (mu) {
        case 0: c << 1, 0, 0, -1; break;
        case 1: c << I, 0, 0, I; break;
        case 2: c << 0, 1, 1, 0; break;
        case 3: c << 0, -I, I, 0; break;
        default: throw InvalidArgument("direction out of range");
    }
    return c;
}

// index of the pair (mu<nu) in the order 01,02,03,12,13,23
inline constexpr int pair_index(int mu, int nu) {
    constexpr int t[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
    return t[mu][nu];
}
inline constexpr int pair_first[6] = {0, 0, 0, 1, 1, 2};
inline constexpr int pair_second[6] = {1, 2, 3, 2, 3, 3};

// Clifford product action of a 2-form on S+: sum_{mu<nu} F_mu nu (-c_mu^* c_nu).
// Kills anti-self-dual forms; on Lambda^2_+ it is gamma_selfdual / 4.
inline Mat2 clifford_two_form(const std::array<cplx, 6>& f) {
    Mat2 r = Mat2::Zero();
    for (int p = 0; p < 6; ++p)
        r -= f[p] * pauli_clifford(pair_first[p]).adjoint() * pauli_clifford(pair_second[p]);
    return r;
}

// self-dual coordinates of a 2-form given by its six components
inline SelfDualFormFiber selfdual_coordinates(const std::array<cplx, 6>& f) {
    // F12=f[0] F13=f[1] F14=f[2] F23=f[3] F24=f[4] F34=f[5]
    cplx s1 = 0.5 * (f[0] + f[5]), s2 = 0.5 * (f[1] - f[4]), s3 = 0.5 * (f[2] + f[3]);
    return SelfDualFormFiber::from_frame(s1, s2, s3);
}

inline std::array<cplx, 6> two_form_components(const SelfDualFormFiber& e) {
    auto s = e.frame();
    return {s[0], s[1], s[2], s[2], -s[1], s[0]};
}

}  // namespace mnpl
