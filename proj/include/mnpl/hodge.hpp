#pragma once
// Abelian d+ on the torus, diagonalized by FFT; harmonic obstruction and emptiness verdicts.

#include <fftw3.h>

#include <Eigen/SVD>
#include <array>
#include <cmath>
#include <mutex>
#include <string>

#include "clifford.hpp"
#include "lattice.hpp"

namespace mnpl {

// coefficients against the constant frame omega_1..3; imaginary for admissible data
struct HarmonicObstruction {
    std::array<cplx, 3> h{};
    // pointwise form norm (|omega_i|^2 = 2)
    double norm() const { return std::sqrt(2.0 * (std::norm(h[0]) + std::norm(h[1]) + std::norm(h[2]))); }
};

using AbelianForm = TwoFormField<1>;
using AbelianConnection = LatticeConnection<1>;

struct HodgeSolution {
    AbelianConnection a;
    HarmonicObstruction obstruction;
    double residual = 0;  // || d+ a - rhs ||
};

// Fourier symbols of a first derivative, d/dx e^{ikx} -> i p(k) e^{ikx}
enum class Stencil { staggered, central, forward };

namespace detail {

class Fft4 {
public:
    explicit Fft4(int N) : n_(std::size_t(N) * N * N * N), buf_(n_) {
        static std::mutex planner;  // fftw's planner is not reentrant
        std::lock_guard<std::mutex> lk(planner);
        const int dims[4] = {N, N, N, N};
        auto* p = reinterpret_cast<fftw_complex*>(buf_.data());
        fwd_ = fftw_plan_dft(4, dims, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft(4, dims, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!fwd_ || !bwd_) throw std::runtime_error("fftw plan failed");
    }
    ~Fft4() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    Fft4(const Fft4&) = delete;
    Fft4& operator=(const Fft4&) = delete;

    std::vector<cplx> forward(const std::vector<cplx>& x) { return run(fwd_, x, 1.0); }
    // normalized inverse
    std::vector<cplx> backward(const std::vector<cplx>& x) { return run(bwd_, x, 1.0 / double(n_)); }

private:
    std::vector<cplx> run(fftw_plan p, const std::vector<cplx>& x, double scale) {
        require(x.size() == n_, "fft size mismatch");
        buf_ = x;
        auto* d = reinterpret_cast<fftw_complex*>(buf_.data());
        fftw_execute_dft(p, d, d);
        if (scale != 1.0)
            for (auto& v : buf_) v *= scale;
        return buf_;
    }
    std::size_t n_;
    std::vector<cplx> buf_;
    fftw_plan fwd_{}, bwd_{};
};

inline cplx symbol(Stencil st, int k, int N, double h) {
    const double pi = std::acos(-1.0);
    switch (st) {
        case Stencil::staggered: {
            const int kk = k <= N / 2 ? k : k - N;
            return 2.0 * std::sin(pi * kk / N) / h;
        }
        case Stencil::central: return std::sin(2.0 * pi * k / N) / h;
        default: return (std::exp(I * (2.0 * pi * k / N)) - 1.0) / (I * h);
    }
}

// self-dual coefficients of d a in Fourier space: s_hat = i S(p) a_hat
inline Eigen::Matrix<cplx, 3, 4> dplus_rows(const std::array<cplx, 4>& p) {
    Eigen::Matrix<cplx, 3, 4> S;
    S << -p[1], p[0], -p[3], p[2],
         -p[2], p[3], p[0], -p[1],
         -p[3], -p[2], p[1], p[0];
    return 0.5 * S;
}

inline std::array<cplx, 4> mode_symbol(const LatticeGeometry& g, Stencil st, int s) {
    auto k = g.coords(s);  // fftw ordering coincides with site ordering
    std::array<cplx, 4> p;
    for (int mu = 0; mu < 4; ++mu) p[mu] = symbol(st, k[mu], g.N(), g.h());
    return p;
}

inline std::vector<cplx> scalar_component(const AbelianForm& F, int pair) {
    std::vector<cplx> v(F.f[pair].size());
    for (std::size_t s = 0; s < v.size(); ++s) v[s] = F.f[pair][s](0, 0);
    return v;
}

inline AbelianForm selfdual_form(const LatticeGeometry& g, const std::array<std::vector<cplx>, 3>& s) {
    AbelianForm F(g);
    for (int x = 0; x < g.sites(); ++x) {
        F.f[0][x](0, 0) = F.f[5][x](0, 0) = s[0][x];
        F.f[1][x](0, 0) = s[1][x];
        F.f[4][x](0, 0) = -s[1][x];
        F.f[2][x](0, 0) = F.f[3][x](0, 0) = s[2][x];
    }
    return F;
}

inline double form_norm_sq(const LatticeGeometry& g, const AbelianForm& F) {
    double t = 0;
    for (int p = 0; p < 6; ++p)
        for (auto& m : F.f[p]) t += std::norm(m(0, 0));
    return g.weight() * t;
}

}  // namespace detail

// Number of cokernel directions of d+ counted mode by mode (3 - rank of the 3x4 symbol).
inline int obstruction_dimension(const LatticeGeometry& g, Stencil st = Stencil::staggered) {
    int count = 0;
    const double scale = 1.0 / g.h();
    for (int s = 0; s < g.sites(); ++s) {
        Eigen::JacobiSVD<Eigen::Matrix<cplx, 3, 4>> svd(detail::dplus_rows(detail::mode_symbol(g, st, s)));
        auto sv = svd.singularValues();
        for (int i = 0; i < 3; ++i)
            if (sv(i) <= 1e-9 * scale) ++count;
    }
    return count;
}

// d+ with the staggered spectral derivative (the operator inverted by abelian_hodge_solve)
inline AbelianForm dplus(const LatticeGeometry& g, const AbelianConnection& a) {
    require(int(a.a[0].size()) == g.sites(), "connection size mismatch");
    detail::Fft4 fft(g.N());
    std::array<std::vector<cplx>, 4> ah;
    for (int mu = 0; mu < 4; ++mu) {
        std::vector<cplx> v(a.a[mu].size());
        for (std::size_t s = 0; s < v.size(); ++s) v[s] = a.a[mu][s](0, 0);
        ah[mu] = fft.forward(v);
    }
    std::array<std::vector<cplx>, 3> sh;
    for (auto& v : sh) v.assign(std::size_t(g.sites()), cplx{0});
    for (int s = 0; s < g.sites(); ++s) {
        auto S = detail::dplus_rows(detail::mode_symbol(g, Stencil::staggered, s));
        Eigen::Matrix<cplx, 4, 1> av(ah[0][s], ah[1][s], ah[2][s], ah[3][s]);
        Eigen::Matrix<cplx, 3, 1> r = I * (S * av);
        for (int i = 0; i < 3; ++i) sh[i][s] = r(i);
    }
    for (auto& v : sh) v = fft.backward(v);
    return detail::selfdual_form(g, sh);
}

// Least-squares solve of d+ a = rhs. The zero mode of rhs has no preimage and is
// returned as the obstruction; every other mode is hit exactly.
inline HodgeSolution abelian_hodge_solve(const LatticeGeometry& g, const AbelianForm& rhs, double tol = 1e-12) {
    for (auto& c : rhs.f) require(int(c.size()) == g.sites(), "rhs size mismatch");
    double scale = 0;
    for (int p = 0; p < 6; ++p)
        for (auto& m : rhs.f[p]) scale = std::max(scale, std::abs(m(0, 0)));
    const double eps = tol * std::max(1.0, scale);
    for (int s = 0; s < g.sites(); ++s) {
        auto f = [&](int p) { return rhs.f[p][s](0, 0); };
        require(std::abs(f(0) - f(5)) <= eps && std::abs(f(1) + f(4)) <= eps && std::abs(f(2) - f(3)) <= eps,
                "rhs is not self-dual");
        for (int p = 0; p < 6; ++p) require(std::abs(f(p).real()) <= eps, "rhs is not imaginary-valued");
    }

    detail::Fft4 fft(g.N());
    std::array<std::vector<cplx>, 3> sh = {fft.forward(detail::scalar_component(rhs, 0)),
                                           fft.forward(detail::scalar_component(rhs, 1)),
                                           fft.forward(detail::scalar_component(rhs, 2))};
    HodgeSolution out;
    out.a = AbelianConnection(g);
    const double V = g.sites();
    for (int i = 0; i < 3; ++i) {
        out.obstruction.h[i] = sh[i][0] / V;
        if (std::abs(out.obstruction.h[i]) <= eps) out.obstruction.h[i] = 0;
    }
    std::array<std::vector<cplx>, 4> ah;
    for (auto& v : ah) v.assign(std::size_t(g.sites()), cplx{0});
    for (int s = 1; s < g.sites(); ++s) {
        const auto p = detail::mode_symbol(g, Stencil::staggered, s);
        double p2 = 0;
        for (auto& q : p) p2 += std::norm(q);
        // S S^T = |p|^2/4 for real p, so i S a = s  <=  a = -i (4/|p|^2) S^T s
        Eigen::Matrix<cplx, 3, 1> sv(sh[0][s], sh[1][s], sh[2][s]);
        Eigen::Matrix<cplx, 4, 1> av = (-I * 4.0 / p2) * (detail::dplus_rows(p).transpose() * sv);
        for (int mu = 0; mu < 4; ++mu) ah[mu][s] = av(mu);
    }
    for (int mu = 0; mu < 4; ++mu) {
        auto v = fft.backward(ah[mu]);
        for (int s = 0; s < g.sites(); ++s) out.a.a[mu][s](0, 0) = v[s];
    }
    auto d = dplus(g, out.a);
    for (int p = 0; p < 6; ++p)
        for (int s = 0; s < g.sites(); ++s) d.f[p][s] -= rhs.f[p][s];
    out.residual = std::sqrt(detail::form_norm_sq(g, d));
    return out;
}

// constant imaginary self-dual form i(s1 omega_1 + s2 omega_2 + s3 omega_3)
inline AbelianForm constant_selfdual(const LatticeGeometry& g, const std::array<cplx, 3>& s) {
    std::array<std::vector<cplx>, 3> v;
    for (int i = 0; i < 3; ++i) v[i].assign(std::size_t(g.sites()), s[i]);
    return detail::selfdual_form(g, v);
}

enum class Verdict { solvable, empty_generic };
inline const char* to_string(Verdict v) { return v == Verdict::solvable ? "solvable" : "empty-generic"; }

struct EmptinessReport {
    Verdict verdict = Verdict::solvable;
    HarmonicObstruction obstruction;
    double residual = 0;
};

// Trace part of the monopole equation: tr F+ = n eta. Solvable iff the harmonic part of
// n eta - tr F+_{A0} vanishes.
template <int R>
EmptinessReport emptiness_check(const LatticeGeometry& g, int n, const PerturbationField& eta,
                                const LatticeConnection<R>& A0, double tol = 1e-8) {
    require(n >= 1, "n must be >= 1");
    check_perturbation(g, eta);
    for (auto& c : A0.a) {
        require(int(c.size()) == g.sites(), "connection size mismatch");
        for (auto& m : c) require(m.rows() == n && m.cols() == n, "connection rank does not match n");
    }
    auto S = selfdual_part(curvature(g, A0));
    std::array<std::vector<cplx>, 3> s;
    for (auto& v : s) v.resize(std::size_t(g.sites()));
    for (int x = 0; x < g.sites(); ++x) {
        require(eta[x].is_imaginary(1e-12), "eta must be imaginary-valued");
        auto e = eta[x].frame();
        SelfDualFormFiber trF{S.c11[x].trace(), S.c20[x].trace(), S.c02[x].trace()};
        auto f = trF.frame();
        for (int i = 0; i < 3; ++i) {
            s[i][x] = double(n) * e[i] - f[i];
            s[i][x] = cplx(0.0, s[i][x].imag());  // drop round-off real parts
        }
    }
    auto sol = abelian_hodge_solve(g, detail::selfdual_form(g, s));
    EmptinessReport r;
    r.obstruction = sol.obstruction;
    r.residual = sol.residual;
    r.verdict = sol.obstruction.norm() > tol ? Verdict::empty_generic : Verdict::solvable;
    return r;
}

// Constant 2-form F_{mu nu} (pairs 01,02,03,12,13,23) split as
// c_omega omega_g + c20 dz1^dz2 + c02 dzbar1^dzbar2 + anti-self-dual part.
struct TypeDecomposition {
    cplx c_omega{0}, c20{0}, c02{0};
    std::array<cplx, 3> anti_selfdual{};  // against omega_1^-, omega_2^-, omega_3^- (all of type (1,1))
    bool type11 = true;
};

inline TypeDecomposition type_decompose(const std::array<cplx, 6>& F, double tol = 1e-12) {
    TypeDecomposition t;
    const cplx s1 = 0.5 * (F[0] + F[5]), s2 = 0.5 * (F[1] - F[4]), s3 = 0.5 * (F[2] + F[3]);
    // dz1^dz2 = omega_2 + i omega_3, dzbar1^dzbar2 = omega_2 - i omega_3
    t.c_omega = s1;
    t.c20 = 0.5 * (s2 - I * s3);
    t.c02 = 0.5 * (s2 + I * s3);
    t.anti_selfdual = {0.5 * (F[0] - F[5]), 0.5 * (F[1] + F[4]), 0.5 * (F[2] - F[3])};
    t.type11 = std::abs(t.c20) <= tol && std::abs(t.c02) <= tol;
    return t;
}

}  // namespace mnpl
