#pragma once
// Site fields on the periodic N^4 lattice of T^4 = (R/2piZ)^4 with trivialized
// bundles: curvature, Dirac and dbar operators, monopole residuals.
//
// Axes 0..3 are x1..x4; z1 = x1 + i x2, z2 = x3 + i x4. Derivatives are
// central differences, so every nabla_mu is exactly anti-self-adjoint in the
// discrete L^2 pairing h^4 sum_x.
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "clifford.hpp"

namespace mnpl {

class LatticeGeometry {
public:
    explicit LatticeGeometry(int N) : N_(N) {
        require(N >= 4 && N % 2 == 0, "lattice size must be even and >= 4");
        h_ = 2.0 * std::numbers::pi / N;
        const int V = sites();
        nb_.resize(std::size_t(V));
        for (int s = 0; s < V; ++s) {
            auto x = coords(s);
            for (int mu = 0; mu < 4; ++mu) {
                auto xp = x, xm = x;
                xp[mu] = (x[mu] + 1) % N;
                xm[mu] = (x[mu] + N - 1) % N;
                nb_[s][2 * mu] = index(xp);
                nb_[s][2 * mu + 1] = index(xm);
            }
        }
    }

    int N() const { return N_; }
    double h() const { return h_; }
    int sites() const { return N_ * N_ * N_ * N_; }
    double weight() const { return h_ * h_ * h_ * h_; }  // L^2 weight per site
    static double volume() { return std::pow(2.0 * std::numbers::pi, 4); }

    int index(const std::array<int, 4>& x) const { return ((x[0] * N_ + x[1]) * N_ + x[2]) * N_ + x[3]; }
    std::array<int, 4> coords(int s) const {
        return {s / (N_ * N_ * N_), (s / (N_ * N_)) % N_, (s / N_) % N_, s % N_};
    }
    double x(int s, int mu) const { return h_ * coords(s)[mu]; }
    int fwd(int s, int mu) const { return nb_[s][2 * mu]; }
    int bwd(int s, int mu) const { return nb_[s][2 * mu + 1]; }

    // max of the Dirac symbol |sum c_mu sin(k_mu h)/h|, sqrt(sum 4/h^2) bounds it
    double dirac_symbol_bound() const { return std::sqrt(4.0 * 4.0 / (h_ * h_)); }

private:
    int N_;
    double h_;
    std::vector<std::array<int, 8>> nb_;
};

template <int R> using VecField = std::vector<Vec<R>>;
template <int R> using MatField = std::vector<Mat<R>>;
template <int R> using SpinorField = std::vector<SpinorFiber<R>>;

template <int R>
struct LatticeConnection {
    std::array<MatField<R>, 4> a;
    LatticeConnection() = default;
    explicit LatticeConnection(const LatticeGeometry& g) {
        for (auto& f : a) f.assign(std::size_t(g.sites()), Mat<R>::Zero());
    }
};

// components ordered 12,13,14,23,24,34 (see pair_index)
template <int R>
struct TwoFormField {
    std::array<MatField<R>, 6> f;
    TwoFormField() = default;
    explicit TwoFormField(const LatticeGeometry& g) {
        for (auto& c : f) c.assign(std::size_t(g.sites()), Mat<R>::Zero());
    }
    Mat<R> at(int s, int mu, int nu) const {
        if (mu == nu) return Mat<R>::Zero();
        return mu < nu ? f[pair_index(mu, nu)][s] : Mat<R>(-f[pair_index(mu, nu)][s]);
    }
};

// matrix-valued self-dual coordinates per site
template <int R>
struct SelfDualField {
    MatField<R> c11, c20, c02;
};

// (0,1)-forms in the unit frame dzbar_j / sqrt2
template <int R>
struct ZeroOneField {
    VecField<R> e1, e2;
};

// scalar imaginary self-dual perturbation eta, one fiber per site
using PerturbationField = std::vector<SelfDualFormFiber>;

inline PerturbationField constant_perturbation(const LatticeGeometry& g, const SelfDualFormFiber& e) {
    return PerturbationField(std::size_t(g.sites()), e);
}

inline void check_perturbation(const LatticeGeometry& g, const PerturbationField& eta) {
    require(int(eta.size()) == g.sites(), "perturbation size mismatch");
    for (auto& e : eta) require(e.is_imaginary(1e-12), "perturbation must be imaginary self-dual");
}

template <int R>
void check_shapes(const LatticeGeometry& g, const SpinorField<R>& psi, const LatticeConnection<R>& A) {
    require(int(psi.size()) == g.sites(), "spinor field size mismatch");
    for (auto& f : A.a) require(int(f.size()) == g.sites(), "connection size mismatch");
}

// ---- covariant derivative nabla_mu = d^c_mu + a_mu on vector fields

template <int R>
VecField<R> nabla(const LatticeGeometry& g, const LatticeConnection<R>& A, int mu, const VecField<R>& v) {
    VecField<R> r(v.size());
    const double ih = 0.5 / g.h();
    for (int s = 0; s < g.sites(); ++s)
        r[s] = ih * (v[g.fwd(s, mu)] - v[g.bwd(s, mu)]) + A.a[mu][s] * v[s];
    return r;
}

template <int R>
SpinorField<R> nabla(const LatticeGeometry& g, const LatticeConnection<R>& A, int mu, const SpinorField<R>& p) {
    SpinorField<R> r(p.size());
    const double ih = 0.5 / g.h();
    for (int s = 0; s < g.sites(); ++s) {
        const auto &f = p[g.fwd(s, mu)], &b = p[g.bwd(s, mu)];
        r[s].alpha = ih * (f.alpha - b.alpha) + A.a[mu][s] * p[s].alpha;
        r[s].beta = ih * (f.beta - b.beta) + A.a[mu][s] * p[s].beta;
    }
    return r;
}

template <int R>
VecField<R> lincomb(cplx a, const VecField<R>& x, cplx b, const VecField<R>& y) {
    VecField<R> r(x.size());
    for (std::size_t s = 0; s < x.size(); ++s) r[s] = a * x[s] + b * y[s];
    return r;
}

template <int R>
double l2_norm_sq(const LatticeGeometry& g, const VecField<R>& v) {
    double t = 0;
    for (auto& x : v) t += x.squaredNorm();
    return g.weight() * t;
}

template <int R>
double l2_norm_sq(const LatticeGeometry& g, const SpinorField<R>& v) {
    double t = 0;
    for (auto& x : v) t += x.norm_sq();
    return g.weight() * t;
}

template <int R>
cplx l2_inner(const LatticeGeometry& g, const VecField<R>& x, const VecField<R>& y) {
    cplx t = 0;
    for (std::size_t s = 0; s < x.size(); ++s) t += x[s].dot(y[s]);
    return g.weight() * t;
}

template <int R>
cplx l2_inner(const LatticeGeometry& g, const ZeroOneField<R>& x, const ZeroOneField<R>& y) {
    return l2_inner(g, x.e1, y.e1) + l2_inner(g, x.e2, y.e2);
}

template <int R>
cplx l2_inner(const LatticeGeometry& g, const SpinorField<R>& x, const SpinorField<R>& y) {
    cplx t = 0;
    for (std::size_t s = 0; s < x.size(); ++s) t += inner(x[s], y[s]);
    return g.weight() * t;
}

// ---- dbar complex  Lambda^00 -> Lambda^01 -> Lambda^02 (unit frames)

namespace detail {
inline const double rs2 = 1.0 / std::sqrt(2.0);
}

// dbar alpha = ((n1 + i n2) alpha, (n3 + i n4) alpha) / sqrt2
template <int R>
ZeroOneField<R> dbar(const LatticeGeometry& g, const LatticeConnection<R>& A, const VecField<R>& alpha) {
    auto n1 = nabla(g, A, 0, alpha), n2 = nabla(g, A, 1, alpha);
    auto n3 = nabla(g, A, 2, alpha), n4 = nabla(g, A, 3, alpha);
    return {lincomb<R>(detail::rs2, n1, I * detail::rs2, n2), lincomb<R>(detail::rs2, n3, I * detail::rs2, n4)};
}

// adjoint of dbar (nabla is anti-self-adjoint): ((-n1 + i n2) phi1 + (-n3 + i n4) phi2) / sqrt2
template <int R>
VecField<R> dbar_adjoint(const LatticeGeometry& g, const LatticeConnection<R>& A, const ZeroOneField<R>& phi) {
    auto a1 = nabla(g, A, 0, phi.e1), a2 = nabla(g, A, 1, phi.e1);
    auto b3 = nabla(g, A, 2, phi.e2), b4 = nabla(g, A, 3, phi.e2);
    VecField<R> r(phi.e1.size());
    for (std::size_t s = 0; s < r.size(); ++s)
        r[s] = detail::rs2 * (-a1[s] + I * a2[s] - b3[s] + I * b4[s]);
    return r;
}

// dbar on (0,1)-forms, coefficient against the unit (0,2) frame dzbar1^dzbar2 / 2
template <int R>
VecField<R> dbar1(const LatticeGeometry& g, const LatticeConnection<R>& A, const ZeroOneField<R>& phi) {
    auto p1 = nabla(g, A, 0, phi.e2), p2 = nabla(g, A, 1, phi.e2);
    auto q3 = nabla(g, A, 2, phi.e1), q4 = nabla(g, A, 3, phi.e1);
    VecField<R> r(phi.e1.size());
    for (std::size_t s = 0; s < r.size(); ++s)
        r[s] = detail::rs2 * (p1[s] + I * p2[s] - q3[s] - I * q4[s]);
    return r;
}

// dbar^* : Lambda^02 -> Lambda^01, the exact adjoint of dbar1
template <int R>
ZeroOneField<R> dbar_star(const LatticeGeometry& g, const LatticeConnection<R>& A, const VecField<R>& beta) {
    auto n1 = nabla(g, A, 0, beta), n2 = nabla(g, A, 1, beta);
    auto n3 = nabla(g, A, 2, beta), n4 = nabla(g, A, 3, beta);
    return {lincomb<R>(detail::rs2, n3, -I * detail::rs2, n4), lincomb<R>(-detail::rs2, n1, I * detail::rs2, n2)};
}

template <int R>
VecField<R> alpha_part(const SpinorField<R>& p) {
    VecField<R> r(p.size());
    for (std::size_t s = 0; s < p.size(); ++s) r[s] = p[s].alpha;
    return r;
}
template <int R>
VecField<R> beta_part(const SpinorField<R>& p) {
    VecField<R> r(p.size());
    for (std::size_t s = 0; s < p.size(); ++s) r[s] = p[s].beta;
    return r;
}
template <int R>
SpinorField<R> make_spinor(const VecField<R>& a, const VecField<R>& b) {
    SpinorField<R> r(a.size());
    for (std::size_t s = 0; s < a.size(); ++s) r[s] = SpinorFiber<R>(a[s], b[s]);
    return r;
}

// ---- Dirac operator sum_mu c_mu nabla_mu : S+ -> S-, Pauli form.
// The S- result (theta1, theta2) is stored in (alpha, beta).

template <int R>
SpinorField<R> dirac(const LatticeGeometry& g, const LatticeConnection<R>& A, const SpinorField<R>& psi) {
    check_shapes(g, psi, A);
    SpinorField<R> r(psi.size());
    for (int mu = 0; mu < 4; ++mu) {
        const Mat2 c = pauli_clifford(mu);
        auto d = nabla(g, A, mu, psi);
        for (std::size_t s = 0; s < r.size(); ++s) {
            r[s].alpha += c(0, 0) * d[s].alpha + c(0, 1) * d[s].beta;
            r[s].beta += c(1, 0) * d[s].alpha + c(1, 1) * d[s].beta;
        }
    }
    return r;
}

// D^* = -sum_mu c_mu^* nabla_mu : S- -> S+
template <int R>
SpinorField<R> dirac_adjoint(const LatticeGeometry& g, const LatticeConnection<R>& A, const SpinorField<R>& th) {
    check_shapes(g, th, A);
    SpinorField<R> r(th.size());
    for (int mu = 0; mu < 4; ++mu) {
        const Mat2 c = pauli_clifford(mu).adjoint();
        auto d = nabla(g, A, mu, th);
        for (std::size_t s = 0; s < r.size(); ++s) {
            r[s].alpha -= c(0, 0) * d[s].alpha + c(0, 1) * d[s].beta;
            r[s].beta -= c(1, 0) * d[s].alpha + c(1, 1) * d[s].beta;
        }
    }
    return r;
}

// Kaehler form sqrt2 (dbar alpha + dbar^* beta), same stencils
template <int R>
SpinorField<R> dirac_kahler(const LatticeGeometry& g, const LatticeConnection<R>& A, const SpinorField<R>& psi) {
    auto da = dbar(g, A, alpha_part(psi));
    auto db = dbar_star(g, A, beta_part(psi));
    const double r2 = std::sqrt(2.0);
    return make_spinor<R>(lincomb<R>(r2, da.e1, r2, db.e1), lincomb<R>(r2, da.e2, r2, db.e2));
}

// nabla^* nabla = -sum_mu nabla_mu nabla_mu
template <int R>
SpinorField<R> covariant_laplacian(const LatticeGeometry& g, const LatticeConnection<R>& A, const SpinorField<R>& psi) {
    SpinorField<R> r(psi.size());
    for (int mu = 0; mu < 4; ++mu) {
        auto d = nabla(g, A, mu, nabla(g, A, mu, psi));
        for (std::size_t s = 0; s < r.size(); ++s) r[s] -= d[s];
    }
    return r;
}

// ---- curvature and its self-dual part

template <int R>
TwoFormField<R> curvature(const LatticeGeometry& g, const LatticeConnection<R>& A) {
    TwoFormField<R> F(g);
    const double ih = 0.5 / g.h();
    for (int p = 0; p < 6; ++p) {
        const int mu = pair_first[p], nu = pair_second[p];
        const auto &am = A.a[mu], &an = A.a[nu];
        for (int s = 0; s < g.sites(); ++s)
            F.f[p][s] = ih * (an[g.fwd(s, mu)] - an[g.bwd(s, mu)] - am[g.fwd(s, nu)] + am[g.bwd(s, nu)]) +
                        am[s] * an[s] - an[s] * am[s];
    }
    return F;
}

// F+ as a two-form field (projection onto span of omega_1..3)
template <int R>
TwoFormField<R> selfdual_projection(const TwoFormField<R>& F) {
    TwoFormField<R> P = F;
    const std::size_t V = F.f[0].size();
    for (std::size_t s = 0; s < V; ++s) {
        Mat<R> s1 = 0.5 * (F.f[0][s] + F.f[5][s]);
        Mat<R> s2 = 0.5 * (F.f[1][s] - F.f[4][s]);
        Mat<R> s3 = 0.5 * (F.f[2][s] + F.f[3][s]);
        P.f[0][s] = s1; P.f[5][s] = s1;
        P.f[1][s] = s2; P.f[4][s] = -s2;
        P.f[2][s] = s3; P.f[3][s] = s3;
    }
    return P;
}

// (Lambda_g F, F^{2,0}, F^{0,2}) coordinates per site
template <int R>
SelfDualField<R> selfdual_part(const TwoFormField<R>& F) {
    const std::size_t V = F.f[0].size();
    SelfDualField<R> S{MatField<R>(V), MatField<R>(V), MatField<R>(V)};
    for (std::size_t s = 0; s < V; ++s) {
        Mat<R> X = F.f[1][s] - F.f[4][s], Y = F.f[2][s] + F.f[3][s];
        S.c11[s] = F.f[0][s] + F.f[5][s];
        S.c20[s] = 0.25 * (X - I * Y);
        S.c02[s] = 0.25 * (X + I * Y);
    }
    return S;
}

// gamma(F+) as a block endomorphism: blocks gamma_st (x) F components
template <int R>
BlockEndomorphism<R> gamma_of(const SelfDualField<R>& S, int s) {
    BlockEndomorphism<R> b;
    b(0, 0) = -4.0 * I * S.c11[s];
    b(1, 1) = 4.0 * I * S.c11[s];
    b(0, 1) = -16.0 * S.c20[s];
    b(1, 0) = 16.0 * S.c02[s];
    return b;
}

template <int R>
BlockEndomorphism<R> scalar_block(const Mat2& m) {
    BlockEndomorphism<R> b;
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) b(s, t) = m(s, t) * Mat<R>::Identity();
    return b;
}

// Clifford product action of a matrix-valued 2-form, sum_{mu<nu} (-c_mu^* c_nu) (x) F_mu nu
template <int R>
SpinorField<R> clifford_action(const TwoFormField<R>& F, const SpinorField<R>& psi) {
    SpinorField<R> r(psi.size());
    for (int p = 0; p < 6; ++p) {
        const Mat2 m = -pauli_clifford(pair_first[p]).adjoint() * pauli_clifford(pair_second[p]);
        for (std::size_t s = 0; s < psi.size(); ++s) {
            Vec<R> fa = F.f[p][s] * psi[s].alpha, fb = F.f[p][s] * psi[s].beta;
            r[s].alpha += m(0, 0) * fa + m(0, 1) * fb;
            r[s].beta += m(1, 0) * fa + m(1, 1) * fb;
        }
    }
    return r;
}

// || D^*D psi - nabla^*nabla psi - (curvature action) psi || / ||psi||
template <int R>
double weitzenbock_defect(const LatticeGeometry& g, const LatticeConnection<R>& A, const SpinorField<R>& psi) {
    const double n0 = l2_norm_sq(g, psi);
    require(n0 > 0, "weitzenbock_defect needs a nonzero spinor");
    auto dd = dirac_adjoint(g, A, dirac(g, A, psi));
    auto lap = covariant_laplacian(g, A, psi);
    auto cf = clifford_action(curvature(g, A), psi);
    for (std::size_t s = 0; s < dd.size(); ++s) dd[s] = dd[s] - lap[s] - cf[s];
    return std::sqrt(l2_norm_sq(g, dd) / n0);
}

// ---- residuals

template <int R>
struct MonopoleResidual {
    SpinorField<R> r1;                       // D psi in S- (x) E
    std::vector<BlockEndomorphism<R>> r2;    // gamma(F+) - mu(psi) - gamma(eta) id
};

template <int R>
MonopoleResidual<R> monopole_residual(const LatticeGeometry& g, const SpinorField<R>& psi,
                                      const LatticeConnection<R>& A, double tau, const PerturbationField& eta) {
    check_shapes(g, psi, A);
    check_perturbation(g, eta);
    check_tau(tau);
    MonopoleResidual<R> res{dirac(g, A, psi), {}};
    auto S = selfdual_part(curvature(g, A));
    res.r2.resize(psi.size());
    for (int s = 0; s < g.sites(); ++s)
        res.r2[s] = gamma_of(S, s) - mu(psi[s], tau) - scalar_block<R>(gamma_selfdual(eta[s]));
    return res;
}

template <int R>
struct KahlerResidual {
    ZeroOneField<R> dirac;  // dbar alpha + dbar^* beta
    MatField<R> f02;        // 4(F02 - eta02) - 1/4 {beta alpha^*}_tau
    MatField<R> f11;        // -i Lambda F - 1/8 {alpha alpha^* - beta beta^*}_tau + i Lambda eta
};

template <int R>
KahlerResidual<R> kahler_residual(const LatticeGeometry& g, const VecField<R>& alpha, const VecField<R>& beta,
                                  const LatticeConnection<R>& A, double tau, const PerturbationField& eta) {
    require(int(alpha.size()) == g.sites() && int(beta.size()) == g.sites(), "field size mismatch");
    check_perturbation(g, eta);
    check_tau(tau);
    auto da = dbar(g, A, alpha);
    auto db = dbar_star(g, A, beta);
    KahlerResidual<R> k{{lincomb<R>(1, da.e1, 1, db.e1), lincomb<R>(1, da.e2, 1, db.e2)}, {}, {}};
    auto S = selfdual_part(curvature(g, A));
    k.f02.resize(alpha.size());
    k.f11.resize(alpha.size());
    for (int s = 0; s < g.sites(); ++s) {
        Mat<R> ba = brace_tau(beta[s] * alpha[s].adjoint(), tau);
        Mat<R> d = brace_tau(alpha[s] * alpha[s].adjoint() - beta[s] * beta[s].adjoint(), tau);
        k.f02[s] = 4.0 * S.c02[s] - 4.0 * eta[s].c02 * Mat<R>::Identity() - 0.25 * ba;
        k.f11[s] = -I * S.c11[s] - 0.125 * d + I * eta[s].c11 * Mat<R>::Identity();
    }
    return k;
}

// ---- gauge action

template <int R>
LatticeConnection<R> gauge_connection(const LatticeGeometry& g, const MatField<R>& u, const LatticeConnection<R>& A) {
    LatticeConnection<R> r(g);
    const double ih = 0.5 / g.h();
    for (int mu = 0; mu < 4; ++mu)
        for (int s = 0; s < g.sites(); ++s) {
            Mat<R> du = ih * (u[g.fwd(s, mu)] - u[g.bwd(s, mu)]);
            Mat<R> m = u[s] * A.a[mu][s] * u[s].adjoint() - du * u[s].adjoint();
            r.a[mu][s] = 0.5 * (m - m.adjoint());  // discrete (du)u^* is only skew up to O(h^2)
        }
    return r;
}

template <int R>
SpinorField<R> gauge_spinor(const MatField<R>& u, const SpinorField<R>& psi) {
    SpinorField<R> r(psi.size());
    for (std::size_t s = 0; s < psi.size(); ++s) r[s] = SpinorFiber<R>(u[s] * psi[s].alpha, u[s] * psi[s].beta);
    return r;
}

template <int R>
TwoFormField<R> gauge_two_form(const MatField<R>& u, const TwoFormField<R>& F) {
    TwoFormField<R> r = F;
    for (int p = 0; p < 6; ++p)
        for (std::size_t s = 0; s < u.size(); ++s) r.f[p][s] = u[s] * F.f[p][s] * u[s].adjoint();
    return r;
}

}  // namespace mnpl

#include <random>

namespace mnpl {

// i.i.d. Gaussian spinor components of standard deviation `scale`
template <int R>
SpinorField<R> random_spinor(const LatticeGeometry& g, double scale, std::mt19937_64& rng) {
    std::normal_distribution<double> d(0.0, scale);
    SpinorField<R> p(std::size_t(g.sites()));
    for (auto& f : p)
        for (int i = 0; i < R; ++i) {
            double a = d(rng), b = d(rng), c = d(rng), e = d(rng);
            f.alpha[i] = cplx(a, b);
            f.beta[i] = cplx(c, e);
        }
    return p;
}

template <int R>
Mat<R> random_skew(double scale, std::mt19937_64& rng) {
    std::normal_distribution<double> d(0.0, scale);
    Mat<R> m;
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < R; ++j) {
            double a = d(rng), b = d(rng);
            m(i, j) = cplx(a, b);
        }
    return 0.5 * (m - m.adjoint());
}

template <int R>
LatticeConnection<R> random_connection(const LatticeGeometry& g, double scale, std::mt19937_64& rng) {
    LatticeConnection<R> A(g);
    for (auto& f : A.a)
        for (auto& m : f) m = random_skew<R>(scale, rng);
    return A;
}

}  // namespace mnpl
