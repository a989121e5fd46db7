#include "th/asymptotics.hpp"

namespace th {

namespace {

Real gate() { return eps_digits(static_cast<int>(precision()) - 5); }

std::size_t kidx(KernelId k) { return static_cast<std::size_t>(k); }

}  // namespace

const char* kernel_name(KernelId k) {
    switch (k) {
        case KernelId::g12: return "g12";
        case KernelId::g14: return "g14";
        case KernelId::g21: return "g21";
        case KernelId::g23: return "g23";
        case KernelId::g32: return "g32";
        case KernelId::g34: return "g34";
        case KernelId::g41: return "g41";
        case KernelId::g43: return "g43";
    }
    return "?";
}

Side kernel_side(KernelId k) {
    switch (k) {
        case KernelId::g12:
        case KernelId::g14:
        case KernelId::g23:
        case KernelId::g43: return Side::inner;
        default: return Side::outer;
    }
}

GKernelSet::GKernelSet(const Model& m, KernelOptions opt) : m_(&m), opt_(opt) {}

Real GKernelSet::r0() const { return admissible_r0(*m_); }

std::array<Complex, 4> GKernelSet::inner_all(const Complex& mu) const {
    const Model& m = *m_;
    Complex mi = Complex(1) / mu;
    Complex al = m.alpha().interior(mu);
    Complex alt = m.alpha().exterior(mi);
    Complex be = m.beta().interior(mu);
    Complex c = m.rho().c_in(mu);
    Complex ph = m.phi().eval_unchecked(mu);
    Complex pht = m.phi().eval_unchecked(mi);
    Complex wt = m.w().eval_unchecked(mi);
    const Complex& a0 = m.alpha0();

    Complex g12, g14, g43;
    Complex g23 = -a0 * wt * be / (pht * alt);
    if (opt_.form == KernelForm::corrected) {
        Complex core = wt * al * al * be * alt;
        g12 = -al / (ph * be) - core * c / ph;
        g14 = core / (ph * a0);
        g43 = -(a0 * a0 / pht) * (Complex(1) / (al * be * alt * alt) + wt * be * c / alt);
    } else {
        g12 = -al / (ph * be) - wt * c / (ph * be * alt);
        g14 = wt / (ph * be * alt * a0);
        g43 = -a0 * a0 * (al * be / pht + be * wt * c / (alt * pht));
    }
    if (opt_.flip_g23) g23 = -g23;
    return {g12, g14, g23, g43};
}

std::array<Complex, 4> GKernelSet::outer_all(const Complex& nu) const {
    const Model& m = *m_;
    Complex ni = Complex(1) / nu;
    Complex al = m.alpha().exterior(nu);
    Complex alt = m.alpha().interior(ni);
    Complex be = m.beta().exterior(nu);
    Complex c = m.rho().c_out(nu);
    Complex ph = m.phi().eval_unchecked(nu);
    Complex pht = m.phi().eval_unchecked(ni);
    Complex ww = m.w().eval_unchecked(nu);
    const Complex& a0 = m.alpha0();

    Complex g21 = ww * be / (ph * al);
    Complex g32 = (Complex(1) / (a0 * pht)) * (alt / be - ww * alt * alt * be * al * c);
    if (opt_.form == KernelForm::legacy) g32 = -g32;
    Complex g34 = ww * alt * alt * be * al / (pht * a0 * a0);
    Complex g41 = -(a0 / ph) * (Complex(1) / (alt * be * al * al) - ww * be * c / al);
    return {g21, g32, g34, g41};
}

Complex GKernelSet::operator()(KernelId k, const Complex& z) const {
    switch (k) {
        case KernelId::g12: return inner_all(z)[0];
        case KernelId::g14: return inner_all(z)[1];
        case KernelId::g23: return inner_all(z)[2];
        case KernelId::g43: return inner_all(z)[3];
        case KernelId::g21: return outer_all(z)[0];
        case KernelId::g32: return outer_all(z)[1];
        case KernelId::g34: return outer_all(z)[2];
        case KernelId::g41: return outer_all(z)[3];
    }
    return Complex();
}

AnnulusFunction GKernelSet::function(KernelId k) const {
    Real r0v = r0();
    GKernelSet self = *this;
    auto f = [self, k](const Complex& z) { return self(k, z); };
    if (kernel_side(k) == Side::inner) return AnnulusFunction(f, r0v, Real(1), kernel_name(k));
    return AnnulusFunction(f, Real(1), Real(1 / r0v), kernel_name(k));
}

Real admissible_r0(const Model& m) {
    Real a = m.r_inner(), b = 1 / m.r_outer();
    return a > b ? a : b;
}

Real default_r_star(const Model& m) { return boost::multiprecision::sqrt(admissible_r0(m)); }

void validate_contour(const Model& m, const ContourConfig& cfg) {
    Real r0 = admissible_r0(m);
    if (!(cfg.r_star > r0 && cfg.r_star < 1))
        throw Error(ErrorKind::Config,
                    "r_star " + cfg.r_star.str(6) + " outside the admissible band (" + r0.str(6) + ", 1)");
}

Complex r1jk_zero(const AnnulusFunction& g, long n, Side side, const ContourConfig& cfg) {
    if (side == Side::inner) return contour_coefficient(g, -n, cfg.r_star, cfg.nodes);
    return contour_coefficient(g, n, Real(1 / cfg.r_star), cfg.nodes);
}

KernelIntegrals::KernelIntegrals(const GKernelSet& g, const ContourConfig& cfg)
    : cfg_(cfg), roots_(cfg.nodes), alpha0_(g.model().alpha0()), c0_(g.model().c0()), form_(g.options().form) {
    validate_contour(g.model(), cfg);
    const std::size_t N = cfg.nodes;
    for (auto& s : samples_) s.resize(N);
    const Real rin = cfg.r_star;
    const Real rout = 1 / cfg.r_star;
    for (std::size_t j = 0; j < N; ++j) {
        auto in = g.inner_all(rin * roots_[j]);
        samples_[kidx(KernelId::g12)][j] = in[0];
        samples_[kidx(KernelId::g14)][j] = in[1];
        samples_[kidx(KernelId::g23)][j] = in[2];
        samples_[kidx(KernelId::g43)][j] = in[3];
        auto out = g.outer_all(rout * roots_[j]);
        samples_[kidx(KernelId::g21)][j] = out[0];
        samples_[kidx(KernelId::g32)][j] = out[1];
        samples_[kidx(KernelId::g34)][j] = out[2];
        samples_[kidx(KernelId::g41)][j] = out[3];
    }
}

Complex KernelIntegrals::R(KernelId k, long n) const {
    if (kernel_side(k) == Side::inner) return contour_coefficient_samples(samples_[kidx(k)], roots_, -n, cfg_.r_star);
    return contour_coefficient_samples(samples_[kidx(k)], roots_, n, Real(1 / cfg_.r_star));
}

Complex energy_cal(const KernelIntegrals& ki, long n) {
    return (Complex(2) / ki.alpha0()) * ki.R(KernelId::g43, n) - ki.c0() * ki.R(KernelId::g23, n);
}

Complex predict_h11(const KernelIntegrals& ki, long n) {
    Complex prev = energy_cal(ki, n - 1);
    if (abs(prev) < gate())
        throw Error(ErrorKind::DegeneratePredictor, "|E(n-1)| below threshold at n=" + std::to_string(n));
    return -ki.alpha0() * energy_cal(ki, n) / prev;
}

int Monitors::first_failed() const {
    for (int i = 0; i < 4; ++i)
        if (!(m[static_cast<std::size_t>(i)] > threshold)) return i + 1;
    return 0;
}

Monitors genericity_monitors(const KernelIntegrals& ki, long n, const Real& threshold) {
    const Complex& a0 = ki.alpha0();
    const Complex& c0 = ki.c0();
    Complex r12 = ki.R(KernelId::g12, n), r14 = ki.R(KernelId::g14, n);
    Complex r32 = ki.R(KernelId::g32, n), r34 = ki.R(KernelId::g34, n);
    Complex r32m = ki.R(KernelId::g32, n - 1);
    Monitors mon;
    mon.threshold = threshold;
    mon.m[0] = abs(r32 * r14);
    mon.m[1] = abs(r32 * r14 - r12 * r34);
    if (ki.form() == KernelForm::corrected)
        mon.m[2] = abs(r12 / a0 + r32m);
    else
        mon.m[2] = abs(r12 / a0 - r32m);
    mon.m[3] = abs(-c0 * a0 * r34 - r32 + r32m);
    return mon;
}

Complex predict_h01(const KernelIntegrals& ki, long n, const H01Options& opt) {
    if (!opt.bypass_monitors) {
        Monitors mon = genericity_monitors(ki, n, opt.threshold);
        if (int f = mon.first_failed()) {
            throw Error(ErrorKind::GenericityFailed,
                        "monitor m" + std::to_string(f) + " = " + mon.m[static_cast<std::size_t>(f - 1)].str(6) +
                            " below " + opt.threshold.str(3) + " at n=" + std::to_string(n));
        }
    }
    const Complex& a0 = ki.alpha0();
    const Complex& c0 = ki.c0();
    Complex r12 = ki.R(KernelId::g12, n), r14 = ki.R(KernelId::g14, n);
    Complex r32 = ki.R(KernelId::g32, n), r34 = ki.R(KernelId::g34, n);
    Complex r32m = ki.R(KernelId::g32, n - 1);
    Complex num, den;
    if (ki.form() == KernelForm::corrected) {
        num = r12 + a0 * r32m;
        den = -c0 * a0 * r34 - r32 + r32m;
    } else {
        num = (a0 * r32m - r12) * (r32 * r14 - r12 * r34);
        den = r32 * r14 * (c0 * a0 * r34 + r32 - r32m);
    }
    if (abs(den) < gate()) throw Error(ErrorKind::DegeneratePredictor, "vanishing denominator in the h01 predictor");
    return num / den;
}

// ---- masked RHP data ----

void MaskedMatrix::set(int i, int j, const Complex& v) {
    m_(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)) = v;
    mask_[static_cast<std::size_t>((i - 1) * 4 + (j - 1))] = true;
}

const Complex& MaskedMatrix::at(int i, int j) const {
    if (!has(i, j))
        throw Error(ErrorKind::MissingData, name_ + "(" + std::to_string(i) + "," + std::to_string(j) + ") not populated");
    return m_.at1(i, j);
}

void MaskedMatrix::fill(const Matrix& m) {
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j) set(i, j, m.at1(i, j));
}

bool MaskedMatrix::full() const {
    for (bool b : mask_)
        if (!b) return false;
    return true;
}

Matrix MaskedMatrix::matrix() const {
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j) at(i, j);
    return m_;
}

const Matrix& w_perm() {
    static const Matrix w = [] {
        Matrix m(4, 4);
        m(0, 1) = Complex(1);
        m(1, 0) = Complex(1);
        m(2, 3) = Complex(1);
        m(3, 2) = Complex(1);
        return m;
    }();
    return w;
}

RHPData exact_rhp(const THSystem& sys, int n) {
    if (n < 2) throw Error(ErrorKind::InvalidParams, "exact RHP data needs n >= 2");
    auto ph = [&](long k) { return sys.phi_k(k + sys.r - 1); };
    auto ww = [&](long k) { return sys.w_k(k + sys.s - 1); };
    const std::size_t dim = static_cast<std::size_t>(2 * n + 2);
    Matrix a(dim, dim);
    {
        std::size_t row = 0;
        a(row++, static_cast<std::size_t>(n)) = Complex(1);
        a(row++, static_cast<std::size_t>(n + 1)) = Complex(1);
        for (int k = 1; k <= n; ++k, ++row)
            for (int j = 0; j <= n; ++j) {
                a(row, static_cast<std::size_t>(j)) = ww(k + j);
                a(row, static_cast<std::size_t>(n + 1 + j)) = ph(k - j);
            }
        for (int k = 0; k < n; ++k, ++row)
            for (int j = 0; j <= n; ++j) {
                a(row, static_cast<std::size_t>(j)) = ph(k - j);
                a(row, static_cast<std::size_t>(n + 1 + j)) = ww(k + j);
            }
    }
    Matrix P(4, 4), X1(4, 4), X2(4, 4), Q(4, 4);
    for (int i = 0; i < 4; ++i) {
        std::vector<Complex> rhs(dim);
        if (i == 0) rhs[0] = Complex(1);
        if (i == 1) rhs[1] = Complex(1);
        if (i == 2) rhs[static_cast<std::size_t>(1 + n)] = Complex(-1);
        if (i == 3) rhs[static_cast<std::size_t>(2 + n)] = Complex(1);
        auto x = solve_linear(a, rhs);
        auto A = [&](int j) { return x[static_cast<std::size_t>(j)]; };
        auto B = [&](int j) { return x[static_cast<std::size_t>(n + 1 + j)]; };
        auto g = [&](long k) {
            Complex s;
            for (int j = 0; j <= n; ++j) s += A(j) * ww(k + j) + B(j) * ph(k - j);
            return s;
        };
        auto h = [&](long k) {
            Complex s;
            for (int j = 0; j <= n; ++j) s += A(j) * ph(k - j) + B(j) * ww(k + j);
            return s;
        };
        const std::size_t r = static_cast<std::size_t>(i);
        P(r, 0) = A(0); P(r, 1) = B(n); P(r, 2) = g(0); P(r, 3) = -h(n);
        X1(r, 0) = A(n - 1); X1(r, 1) = B(1); X1(r, 2) = -g(n + 1); X1(r, 3) = h(-1);
        X2(r, 0) = A(n - 2); X2(r, 1) = B(2); X2(r, 2) = -g(n + 2); X2(r, 3) = h(-2);
        Q(r, 0) = A(1); Q(r, 1) = B(n - 1); Q(r, 2) = g(-1); Q(r, 3) = -h(n + 1);
    }
    RHPData d;
    d.P.fill(P);
    d.X1inf.fill(X1);
    d.X2inf.fill(X2);
    d.X1circ.fill(inverse(P) * Q);
    return d;
}

RHPData p_asymptotic(const KernelIntegrals& ki, long n) {
    const Complex& a0 = ki.alpha0();
    const Complex& c0 = ki.c0();
    auto R = [&](KernelId k) { return ki.R(k, n); };
    Complex r12 = R(KernelId::g12), r14 = R(KernelId::g14), r21 = R(KernelId::g21), r23 = R(KernelId::g23);
    Complex r32 = R(KernelId::g32), r34 = R(KernelId::g34), r41 = R(KernelId::g41), r43 = R(KernelId::g43);
    RHPData d;
    auto& P = d.P;
    P.set(1, 1, -c0 * a0 * r14 - r12); P.set(1, 2, Complex(0)); P.set(1, 3, r14); P.set(1, 4, -a0);
    P.set(2, 1, Complex(-1)); P.set(2, 2, -r23 / a0); P.set(2, 3, Complex(0)); P.set(2, 4, -a0 * r21);
    P.set(3, 1, -c0 * a0 * r34 - r32); P.set(3, 2, Complex(-1) / a0); P.set(3, 3, r34); P.set(3, 4, Complex(0));
    P.set(4, 1, -c0 * a0); P.set(4, 2, -r43 / a0); P.set(4, 3, Complex(1)); P.set(4, 4, -a0 * r41);
    d.X1inf.set(3, 1, Complex(0));
    d.X1inf.set(3, 2, -ki.R(KernelId::g32, n - 1));
    return d;
}

Real wsym_residual(const AnnulusFunction& phi, const AnnulusFunction& w, int r, int s, const Complex& z) {
    auto jx = [&](const Complex& x) {
        Complex xi = Complex(1) / x;
        Matrix j = Matrix::identity(4);
        j(0, 2) = pow(x, s - 1) * w(xi);
        j(0, 3) = -pow(x, 1 - r) * phi(x);
        j(1, 2) = pow(x, r - 1) * phi(xi);
        j(1, 3) = -pow(x, 1 - s) * w(x);
        return j;
    };
    const Matrix& W = w_perm();
    return max_abs(inverse(jx(z)) - W * jx(Complex(1) / z) * W);
}

// ---- offset-reduction closed forms ----

namespace {

Real scale_of(std::initializer_list<Complex> xs) {
    Real m = 1;
    for (const auto& x : xs) {
        Real v = abs(x);
        if (v > m) m = v;
    }
    return m;
}

void require_generic(const Complex& v, const Real& scale, const std::string& what) {
    if (!(abs(v) > gate() * scale))
        throw Error(ErrorKind::GenericConditionFailed, what + " vanishes numerically");
}

}  // namespace

Offset01Result solve_offset01(const RHPData& d) {
    const auto& P = d.P;
    const auto& X = d.X1inf;
    Complex den = P.at(1, 1) * P.at(3, 3) - P.at(1, 3) * P.at(3, 1);
    require_generic(den, scale_of({P.at(1, 1) * P.at(3, 3), P.at(1, 3) * P.at(3, 1)}), "P11 P33 - P13 P31");
    auto S = [&](int i, int k) { return X.at(i, 2) * P.at(2, k) + X.at(i, 4) * P.at(4, k); };
    Offset01Result u;
    Matrix& U = u.U1inf;
    U(0, 0) = X.at(1, 1) + (P.at(3, 3) * S(1, 1) - P.at(3, 1) * S(1, 3)) / den;
    U(0, 2) = X.at(1, 3) + (P.at(1, 1) * S(1, 3) - P.at(1, 3) * S(1, 1)) / den;
    U(1, 0) = (P.at(3, 1) * P.at(2, 3) - P.at(3, 3) * P.at(2, 1)) / den;
    U(1, 2) = (P.at(1, 3) * P.at(2, 1) - P.at(1, 1) * P.at(2, 3)) / den;
    U(2, 0) = X.at(3, 1) + (P.at(3, 3) * S(3, 1) - P.at(3, 1) * S(3, 3)) / den;
    U(2, 2) = X.at(3, 3) + (P.at(1, 1) * S(3, 3) - P.at(1, 3) * S(3, 1)) / den;
    U(3, 0) = (P.at(4, 3) * P.at(3, 1) - P.at(3, 3) * P.at(4, 1)) / den;
    U(3, 2) = (P.at(1, 3) * P.at(4, 1) - P.at(1, 1) * P.at(4, 3)) / den;
    u.den = den;
    return u;
}

Real offset01_residual(const RHPData& d, const Offset01Result& u) {
    const auto& P = d.P;
    const auto& X = d.X1inf;
    const Matrix& U = u.U1inf;
    std::array<std::array<Complex, 4>, 4> A{{
        {U(0, 0) - X.at(1, 1), -X.at(1, 2), U(0, 2) - X.at(1, 3), -X.at(1, 4)},
        {U(1, 0), Complex(1), U(1, 2), Complex(0)},
        {U(2, 0) - X.at(3, 1), -X.at(3, 2), U(2, 2) - X.at(3, 3), -X.at(3, 4)},
        {U(3, 0), Complex(0), U(3, 2), Complex(1)},
    }};
    Real worst = 0;
    for (int i = 0; i < 4; ++i)
        for (int col : {1, 3}) {
            Complex s;
            Real sc = 1;
            for (int j = 0; j < 4; ++j) {
                Complex t = A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * P.at(j + 1, col);
                s += t;
                if (abs(t) > sc) sc = abs(t);
            }
            Real v = abs(s) / sc;
            if (v > worst) worst = v;
        }
    return worst;
}

Offset00Result solve_offset00(const RHPData& d) {
    const auto& P = d.P;
    const auto& X1 = d.X1inf;
    const Complex& x234 = d.X2inf.at(3, 4);
    const Complex& xc43 = d.X1circ.at(4, 3);
    const Complex& p33 = P.at(3, 3);
    Complex dd = p33 * p33 - X1.at(3, 4) * xc43;
    require_generic(dd, scale_of({p33 * p33, X1.at(3, 4) * xc43}), "P33^2 - X1inf_34 X1circ_43");

    Complex common = -x234 + X1.at(3, 1) * X1.at(1, 4) + X1.at(3, 2) * X1.at(2, 4) + X1.at(3, 4) * X1.at(4, 4);
    Complex delta = p33 * common -
                    X1.at(3, 4) * (X1.at(3, 1) * P.at(1, 3) + X1.at(3, 2) * P.at(2, 3) + X1.at(3, 4) * P.at(4, 3));
    Complex lambda = -xc43 * (common + X1.at(3, 4) * X1.at(3, 3)) +
                     p33 * (X1.at(3, 1) * P.at(1, 3) + X1.at(3, 2) * P.at(2, 3) + X1.at(3, 3) * p33 +
                            X1.at(3, 4) * P.at(4, 3));
    Offset00Result y;
    y.Yhat_j4[0] = (P.at(1, 3) * X1.at(3, 4) - p33 * X1.at(1, 4)) / dd;
    y.Yhat_j4[1] = (P.at(2, 3) * X1.at(3, 4) - p33 * X1.at(2, 4)) / dd;
    y.Yhat_j4[2] = delta / dd;
    y.Yhat_j4[3] = p33 / dd;
    y.Y1inf_j3[0] = (xc43 * X1.at(1, 4) - p33 * P.at(1, 3)) / dd;
    y.Y1inf_j3[1] = (xc43 * X1.at(2, 4) - p33 * P.at(2, 3)) / dd;
    y.Y1inf_j3[2] = lambda / dd;
    y.Y1inf_j3[3] = -xc43 / dd;
    y.generic_den = dd;
    y.delta_offset00 = delta;
    y.lambda_offset00 = lambda;
    return y;
}

Real offset00_residual(const RHPData& d, const Offset00Result& y) {
    const auto& P = d.P;
    const auto& X1 = d.X1inf;
    const Complex& x234 = d.X2inf.at(3, 4);
    const Complex& xc43 = d.X1circ.at(4, 3);
    const Complex& p33 = P.at(3, 3);
    const auto& Yh = y.Yhat_j4;
    const auto& Y = y.Y1inf_j3;
    std::vector<std::vector<Complex>> eqs = {
        {p33 * Yh[0], X1.at(3, 4) * Y[0], X1.at(1, 4)},
        {p33 * Yh[1], X1.at(3, 4) * Y[1], X1.at(2, 4)},
        {p33 * Yh[2], X1.at(3, 4) * Y[2], x234, -X1.at(3, 1) * X1.at(1, 4), -X1.at(3, 2) * X1.at(2, 4),
         -X1.at(3, 4) * X1.at(3, 3), -X1.at(3, 4) * X1.at(4, 4)},
        {p33 * Yh[3], X1.at(3, 4) * Y[3], Complex(-1)},
        {xc43 * Yh[0], p33 * Y[0], P.at(1, 3)},
        {xc43 * Yh[1], p33 * Y[1], P.at(2, 3)},
        {xc43 * Yh[2], p33 * Y[2], -X1.at(3, 1) * P.at(1, 3), -X1.at(3, 2) * P.at(2, 3), -X1.at(3, 3) * p33,
         -X1.at(3, 4) * P.at(4, 3)},
        {xc43 * Yh[3], p33 * Y[3]},
    };
    Real worst = 0;
    for (const auto& e : eqs) {
        Complex s;
        Real sc = 1;
        for (const auto& t : e) {
            s += t;
            if (abs(t) > sc) sc = abs(t);
        }
        Real v = abs(s) / sc;
        if (v > worst) worst = v;
    }
    return worst;
}

namespace {

struct Offset02Setup {
    Matrix A, B, C, D;  // P X1circ, X1inf P, X2inf - X1inf^2, P - X1inf A
};

Matrix col1_matrix(const MaskedMatrix& m) {
    Matrix out(4, 4);
    for (int i = 1; i <= 4; ++i) out(static_cast<std::size_t>(i - 1), 0) = m.at(i, 1);
    return out;
}

Offset02Setup offset02_setup(const RHPData& d) {
    Matrix P = d.P.matrix();
    Matrix X1 = d.X1inf.matrix();
    Matrix X2row(4, 4);
    for (int j = 1; j <= 4; ++j) X2row(0, static_cast<std::size_t>(j - 1)) = d.X2inf.at(1, j);
    Offset02Setup s;
    s.A = P * col1_matrix(d.X1circ);  // only column 1 is meaningful
    s.B = X1 * P;
    s.C = X2row - X1 * X1;            // only row 1 is meaningful
    s.D = P - X1 * s.A;               // only column 1 is meaningful
    return s;
}

struct Helpers {
    Complex alpha, theta, delta;
    std::array<Complex, 5> eta, rho, nu;
    std::array<std::array<Complex, 5>, 5> M;
};

Helpers offset02_helpers(const MaskedMatrix& P, const Offset02Setup& s) {
    auto a = [&](int i, int j) { return s.A.at1(i, j); };
    auto b = [&](int i, int j) { return s.B.at1(i, j); };
    auto dd = [&](int i, int j) { return s.D.at1(i, j); };
    const Complex& p11 = P.at(1, 1);
    require_generic(p11, scale_of({P.at(1, 3), P.at(3, 1), P.at(4, 1)}), "P11");
    Complex inv_alpha = a(1, 1) * b(1, 1) / p11 + dd(1, 1);
    require_generic(inv_alpha, scale_of({a(1, 1) * b(1, 1) / p11, dd(1, 1)}), "1/alpha");
    Helpers h;
    h.alpha = Complex(1) / inv_alpha;
    h.theta = a(1, 1) / p11;
    for (int j = 1; j <= 4; ++j) {
        const auto u = static_cast<std::size_t>(j);
        h.eta[u] = P.at(1, j) / p11;
        h.rho[u] = a(j, 1) - a(1, 1) * P.at(j, 1) / p11;
        h.nu[u] = b(1, 1) * P.at(1, j) / p11 - b(1, j);
    }
    for (int j = 3; j <= 4; ++j)
        for (int k = 3; k <= 4; ++k) {
            const auto uj = static_cast<std::size_t>(j), uk = static_cast<std::size_t>(k);
            Complex omega = P.at(1, j) * P.at(k, 1) / p11;
            h.M[uj][uk] = -h.alpha * h.rho[uk] * h.nu[uj] - omega + P.at(k, j);
        }
    h.delta = h.M[3][4] * h.M[4][3] - h.M[3][3] * h.M[4][4];
    require_generic(h.delta, scale_of({h.M[3][4] * h.M[4][3], h.M[3][3] * h.M[4][4]}), "Delta");
    return h;
}

std::array<Complex, 4> closed_form(const MaskedMatrix& P, const Offset02Setup& s, const Helpers& h,
                                   const std::array<Complex, 4>& rhs) {
    const Complex& x = rhs[0];
    const Complex& y = rhs[1];
    const Complex& w = rhs[2];
    const Complex& z = rhs[3];
    const Complex& p11 = P.at(1, 1);
    const Complex b11 = s.B.at1(1, 1);
    auto f = [&](int j, const Complex& xx, const Complex& yy, const Complex& zz) {
        const auto u = static_cast<std::size_t>(j);
        return h.alpha * h.nu[u] * (zz - h.theta * xx) + h.eta[u] * xx - yy;
    };
    Complex f3 = f(3, x, y, z);
    Complex f4 = f(4, x, w, z);
    const auto& M = h.M;
    Complex c3 = (P.at(3, 1) + h.alpha * b11 * h.rho[3]) / (p11 * h.delta);
    Complex c4 = (P.at(4, 1) + h.alpha * b11 * h.rho[4]) / (p11 * h.delta);
    Complex F1 = x / p11 + h.alpha * b11 / p11 * (z - h.theta * x) + (c4 * M[4][3] - c3 * M[4][4]) * f3 +
                 (c3 * M[3][4] - c4 * M[3][3]) * f4;
    Complex F2 = h.alpha * (z - h.theta * x + (h.rho[4] * M[4][3] - h.rho[3] * M[4][4]) / h.delta * f3 +
                            (h.rho[3] * M[3][4] - h.rho[4] * M[3][3]) / h.delta * f4);
    Complex F3 = (M[4][4] * f3 - M[3][4] * f4) / h.delta;
    Complex F4 = (M[3][3] * f4 - M[4][3] * f3) / h.delta;
    return {F1, F2, F3, F4};
}

}  // namespace

std::array<Complex, 4> offset02_closed_form(const RHPData& d, const std::array<Complex, 4>& rhs) {
    Offset02Setup s = offset02_setup(d);
    Helpers h = offset02_helpers(d.P, s);
    return closed_form(d.P, s, h, rhs);
}

Offset02Result solve_offset02(const RHPData& d) {
    const auto& P = d.P;
    Offset02Setup s = offset02_setup(d);
    Helpers h = offset02_helpers(P, s);
    auto a = [&](int i, int j) { return s.A.at1(i, j); };
    auto b = [&](int i, int j) { return s.B.at1(i, j); };
    auto dd = [&](int i, int j) { return s.D.at1(i, j); };
    Matrix CP = s.C * P.matrix();
    Matrix CAB = s.C * s.A + s.B;

    Offset02Result t;
    Matrix& S = t.system;
    const int cols[4] = {1, 3, 4, 0};
    for (int r = 0; r < 3; ++r) {
        int c = cols[r];
        const auto u = static_cast<std::size_t>(r);
        S(u, 0) = P.at(1, c);
        S(u, 1) = -b(1, c);
        S(u, 2) = P.at(3, c);
        S(u, 3) = P.at(4, c);
    }
    S(3, 0) = a(1, 1);
    S(3, 1) = dd(1, 1);
    S(3, 2) = a(3, 1);
    S(3, 3) = a(4, 1);

    t.rhs[0] = {CP.at1(1, 1), CP.at1(1, 3), CP.at1(1, 4), CAB.at1(1, 1)};
    t.rhs[1] = {-P.at(2, 1), -P.at(2, 3), -P.at(2, 4), -a(2, 1)};
    t.rhs[2] = {b(3, 1), b(3, 3), b(3, 4), -dd(3, 1)};
    t.rhs[3] = {b(4, 1), b(4, 3), b(4, 4), -dd(4, 1)};
    for (std::size_t j = 0; j < 4; ++j) t.T[j] = closed_form(P, s, h, t.rhs[j]);
    t.delta_offset02 = h.delta;
    return t;
}

Real offset02_residual(const Offset02Result& t) {
    Real worst = 0;
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t r = 0; r < 4; ++r) {
            Complex s = -t.rhs[j][r];
            Real sc = scale_of({t.rhs[j][r]});
            for (std::size_t c = 0; c < 4; ++c) {
                Complex term = t.system(r, c) * t.T[j][c];
                s += term;
                if (abs(term) > sc) sc = abs(term);
            }
            Real v = abs(s) / sc;
            if (v > worst) worst = v;
        }
    return worst;
}

Real offset02_lu_discrepancy(const Offset02Result& t) {
    Real worst = 0;
    for (std::size_t j = 0; j < 4; ++j) {
        std::vector<Complex> rhs(t.rhs[j].begin(), t.rhs[j].end());
        auto x = solve_linear(t.system, rhs);
        for (std::size_t c = 0; c < 4; ++c) {
            Real v = abs(x[c] - t.T[j][c]) / scale_of({x[c]});
            if (v > worst) worst = v;
        }
    }
    return worst;
}

Complex minor_d(const MaskedMatrix& P, int r, int s, int j, int k) {
    return P.at(j, k) * P.at(r, s) - P.at(j, s) * P.at(r, k);
}

H01Exact exact_h01_from_data(const RHPData& d) {
    const auto& P = d.P;
    auto p = [&](int i, int j) { return P.at(i, j); };
    auto D = [&](int r, int s, int j, int k) { return minor_d(P, r, s, j, k); };
    const Complex& x131 = d.X1inf.at(3, 1);
    const Complex& x132 = d.X1inf.at(3, 2);
    Real pmax = 1;
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j)
            if (abs(p(i, j)) > pmax) pmax = abs(p(i, j));

    Complex d33_11 = D(3, 3, 1, 1);
    require_generic(d33_11, pmax * pmax, "D^{33}_{11}");
    Complex E = p(4, 1) * D(3, 3, 1, 2) - p(4, 2) * D(3, 3, 1, 1) + p(4, 3) * D(3, 2, 1, 1) +
                x132 * (D(3, 2, 1, 1) * D(4, 4, 2, 3) - D(3, 4, 2, 3) * D(4, 2, 1, 1) -
                        D(2, 2, 1, 1) * D(4, 4, 3, 3) - D(3, 2, 2, 1) * D(4, 4, 1, 3) +
                        p(1, 4) * p(4, 1) * D(3, 3, 2, 2) - p(1, 4) * p(4, 2) * D(3, 3, 2, 1) -
                        p(1, 3) * p(4, 1) * D(3, 4, 2, 2) + p(1, 3) * p(4, 2) * D(3, 4, 2, 1));
    Real x = abs(x132) > 1 ? abs(x132) : Real(1);
    require_generic(E, pmax * pmax * pmax * pmax * x, "E(n)");
    Complex bracket = D(4, 3, 3, 1) * (p(3, 3) * D(2, 2, 1, 1) + p(3, 1) * D(2, 3, 1, 2) - p(3, 2) * D(2, 3, 1, 1)) -
                      D(3, 3, 2, 1) * (p(4, 1) * D(3, 3, 1, 2) - p(4, 2) * D(3, 3, 1, 1) + p(4, 3) * D(3, 2, 1, 1));
    H01Exact out;
    out.E = E;
    out.minus_inv_h = x131 + (p(3, 1) - x132) / (E * d33_11) * bracket;
    out.h = Complex(-1) / out.minus_inv_h;
    return out;
}

}  // namespace th
