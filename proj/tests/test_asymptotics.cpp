#include "common.hpp"

#include "th/asymptotics.hpp"
#include "th/ising.hpp"

using namespace th;
using tst::tol;

namespace {

struct Fixture {
    SymbolPair sp;
    FourierConfig fc;
    Model m;
    GKernelSet g;
    KernelIntegrals ki;

    Fixture(SymbolPair p, FourierConfig f, KernelOptions ko = {})
        : sp(std::move(p)), fc(f), m(sp, fc), g(m, ko), ki(g, {default_r_star(m), fc.N}) {}
};

Fixture& ising() {
    static Fixture f(ising_symbols(tst::critical()), tst::ising_fc());
    return f;
}

Fixture& generic() {
    static Fixture f(builtin_pair("generic", 1, 1), {64, 256});
    return f;
}

Fixture& trivial() {
    static Fixture f(builtin_pair("trivial", 1, 1), tst::small_fc());
    return f;
}

Complex exact_h(const SymbolPair& sp, const FourierConfig& fc, int r, int s, int n) {
    THSystem sys = make_system(sp, fc, r, s);
    return det_th(sys, n) / det_th(sys, n - 1);
}

Real rel(const Complex& a, const Complex& b) { return abs(a - b) / abs(b); }

RHPData seeded(std::uint64_t seed) {
    SeededRng rng(seed);
    RHPData d;
    d.P.fill(rng.matrix(4, 4) + Matrix::identity(4));
    d.X1inf.fill(rng.matrix(4, 4));
    d.X2inf.fill(rng.matrix(4, 4));
    d.X1circ.fill(rng.matrix(4, 4));
    return d;
}

}  // namespace

TEST_CASE("kernels for constant symbols") {
    const GKernelSet& g = trivial().g;
    for (const auto& t : circle_nodes(8)) {
        Complex mu = t * Real("0.8");
        CHECK(abs(g(KernelId::g12, mu)) <= tol(5));
        CHECK(abs(g(KernelId::g14, mu) - Complex(1)) <= tol(5));
    }
}

TEST_CASE("g23 defining identity and its two forms") {
    Fixture& f = ising();
    const Model& m = f.m;
    Real r0 = f.g.r0();
    for (const auto& t : circle_nodes(16)) {
        Complex mu = t * ((r0 + 1) / 2);
        Complex mi = Complex(1) / mu;
        Complex at = m.alpha().exterior(mi);
        Complex be = m.beta().interior(mu);
        Complex dt = m.d()(mi);
        Complex g23 = f.g(KernelId::g23, mu);
        CHECK(abs(g23 * at + m.alpha0() * dt * be) <= tol(20));
        Complex other = -m.alpha0() * m.w()(mi) * be / (m.phi()(mi) * at);
        CHECK(abs(g23 - other) <= tol(20));
    }
}

TEST_CASE("legacy kernels differ from the corrected ones") {
    Fixture& f = ising();
    KernelOptions ko;
    ko.form = KernelForm::legacy;
    GKernelSet p(f.m, ko);
    Complex mu(Real("0.85"), Real("0.1"));
    Complex nu = Complex(1) / mu;
    CHECK(abs(p(KernelId::g12, mu) - f.g(KernelId::g12, mu)) > Real("1e-10"));
    CHECK(abs(p(KernelId::g32, nu) + f.g(KernelId::g32, nu)) <= tol(10));
    CHECK(abs(p(KernelId::g21, nu) - f.g(KernelId::g21, nu)) == 0);
}

TEST_CASE("r1jk_zero on elementary kernels") {
    ContourConfig cc{Real("0.8"), 64};
    for (long n : {1L, 3L, 7L}) {
        CHECK(abs(r1jk_zero(monomial(-n, Real("0.1"), Real(1)), n, Side::inner, cc) - Complex(1)) <= tol(5));
        CHECK(abs(r1jk_zero(monomial(n, Real(1), Real(10)), n, Side::outer, cc) - Complex(1)) <= tol(5));
        for (Side s : {Side::inner, Side::outer})
            CHECK(abs(r1jk_zero(constant(Complex(1), Real("0.1"), Real(10)), n, s, cc)) <= tol(5));
    }
}

TEST_CASE("R values agree with the sampled integrals") {
    Fixture& f = ising();
    ContourConfig cc = f.ki.contour();
    for (KernelId k : all_kernels) {
        Complex direct = r1jk_zero(f.g.function(k), 5, kernel_side(k), cc);
        CHECK(abs(direct - f.ki.R(k, 5)) <= tol(20));
    }
}

TEST_CASE("radius independence between 0.6 and 0.7") {
    IsingParams p = tst::critical();
    IsingAnnulus wide{Real("0.3"), Real("1") / Real("0.3")};
    SymbolPair sp = ising_symbols(p, wide);
    Model m(sp, tst::ising_fc());
    REQUIRE(admissible_r0(m) < Real("0.6"));
    GKernelSet g(m);
    KernelIntegrals a(g, {Real("0.6"), 512}), b(g, {Real("0.7"), 512});
    for (long n = 1; n <= 12; ++n)
        for (KernelId k : all_kernels) CHECK(abs(a.R(k, n) - b.R(k, n)) <= tol(20));
}

TEST_CASE("contour validation") {
    Fixture& f = ising();
    CHECK(abs(admissible_r0(f.m) - Real("0.625")) <= tol(5));
    for (const char* bad : {"0.6", "1", "0.625", "1.2"}) {
        try {
            validate_contour(f.m, {Real(bad), 512});
            FAIL("accepted r_star " << bad);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Config);
        }
    }
    validate_contour(f.m, {Real("0.7"), 512});
}

TEST_CASE("energy functional") {
    for (long n = 1; n <= 4; ++n) CHECK(abs(energy_cal(trivial().ki, n)) <= tol(5));
    Fixture& f = ising();
    const Complex a0 = f.ki.alpha0(), c0 = f.ki.c0();
    Complex e = energy_cal(f.ki, 7);
    Complex by_hand = Complex(2) / a0 * f.ki.R(KernelId::g43, 7) - c0 * f.ki.R(KernelId::g23, 7);
    CHECK(abs(e - by_hand) <= tol(20) * abs(e));
    // doubling the g43 contribution
    Complex twice = Complex(2) * (Complex(2) / a0 * f.ki.R(KernelId::g43, 7)) - c0 * f.ki.R(KernelId::g23, 7);
    CHECK(abs(twice - e - Complex(2) / a0 * f.ki.R(KernelId::g43, 7)) <= tol(20) * abs(e));

    std::vector<Real> xs, ys;
    for (long n = 6; n <= 16; ++n) {
        xs.push_back(Real(n));
        ys.push_back(boost::multiprecision::log(abs(energy_cal(f.ki, n))));
    }
    CHECK(boost::multiprecision::exp(fit_slope(xs, ys)) < 1);
}

TEST_CASE("h11 predictor") {
    try {
        predict_h11(trivial().ki, 5);
        FAIL("expected DegeneratePredictor");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegeneratePredictor);
    }
    Fixture& f = ising();
    Real e10 = rel(predict_h11(f.ki, 10), exact_h(f.sp, f.fc, 1, 1, 10));
    Real e20 = rel(predict_h11(f.ki, 20), exact_h(f.sp, f.fc, 1, 1, 20));
    CHECK(e20 < e10 / 10);

    KernelIntegrals other(f.g, {Real("0.7"), 512});
    for (long n : {6L, 12L}) CHECK(abs(predict_h11(f.ki, n) - predict_h11(other, n)) <= tol(20));
}

TEST_CASE("h01 predictor on the generic family") {
    Fixture& f = generic();
    Real prev = 1;
    for (int n : {8, 12, 16}) {
        Monitors mon = genericity_monitors(f.ki, n, Real("1e-30"));
        CHECK(mon.first_failed() == 0);
        Real e = rel(predict_h01(f.ki, n), exact_h(f.sp, f.fc, 0, 1, n));
        CHECK(e < prev);
        prev = e;
    }
    CHECK(prev < Real("1e-12"));
}

TEST_CASE("h01 predictor refuses when monitors fail") {
    try {
        predict_h01(trivial().ki, 5);
        FAIL("expected GenericityFailed");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::GenericityFailed);
    }
    Fixture& f = ising();
    Monitors mon = genericity_monitors(f.ki, 12, Real("1e-30"));
    CHECK(mon.first_failed() == 1);
    CHECK_THROWS_AS(predict_h01(f.ki, 12), Error);

    H01Options o;
    o.bypass_monitors = true;
    Complex p8 = predict_h01(f.ki, 8, o), p16 = predict_h01(f.ki, 16, o);
    CHECK(rel(p16, exact_h(f.sp, f.fc, 0, 1, 16)) < rel(p8, exact_h(f.sp, f.fc, 0, 1, 8)));
    // real symbol pair: the prediction is real
    CHECK(abs(p16.im) <= tol(20));
    CHECK(f.ki.alpha0().re > 0);
    CHECK(abs(f.ki.alpha0().im) <= tol(20));
}

TEST_CASE("index pins at each use site") {
    Fixture& f = generic();
    const KernelIntegrals& ki = f.ki;
    const long n = 10;
    const Complex a0 = ki.alpha0(), c0 = ki.c0();
    using K = KernelId;

    CHECK(abs(predict_h11(ki, n) + a0 * energy_cal(ki, n) / energy_cal(ki, n - 1)) <= tol(20));

    Complex num = ki.R(K::g12, n) + a0 * ki.R(K::g32, n - 1);
    Complex den = -c0 * a0 * ki.R(K::g34, n) - ki.R(K::g32, n) + ki.R(K::g32, n - 1);
    CHECK(abs(predict_h01(ki, n) - num / den) <= tol(20) * abs(num / den));

    RHPData d = p_asymptotic(ki, n);
    CHECK(abs(d.X1inf.at(3, 2) + ki.R(K::g32, n - 1)) == 0);
    CHECK(abs(d.X1inf.at(3, 2) + ki.R(K::g32, n)) > Real("1e-12"));

    // the h11 prediction at n targets D_n / D_{n-1}, not its neighbours
    Complex q = predict_h11(ki, n);
    Real here11 = rel(q, exact_h(f.sp, f.fc, 1, 1, n));
    CHECK(here11 < rel(q, exact_h(f.sp, f.fc, 1, 1, n + 1)) / 100);
    CHECK(here11 < rel(q, exact_h(f.sp, f.fc, 1, 1, n - 1)) / 100);
}

TEST_CASE("leading-order P") {
    RHPData d = p_asymptotic(trivial().ki, 5);
    const int want[4][4] = {{0, 0, 0, -1}, {-1, 0, 0, 0}, {0, -1, 0, 0}, {1, 0, 1, 0}};
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j) CHECK(abs(d.P.at(i, j) - Complex(want[i - 1][j - 1])) <= tol(5));
    for (long n : {4L, 9L}) CHECK(abs(p_asymptotic(ising().ki, n).P.at(4, 3) - Complex(1)) == 0);

    const Matrix& W = w_perm();
    Real prev = 1;
    for (long n : {6L, 10L, 14L}) {
        Matrix P = p_asymptotic(generic().ki, n).P.matrix();
        Real defect = max_abs(W * inverse(P) * W - P);
        CHECK(defect < prev);
        prev = defect;
    }
}

TEST_CASE("W symmetry of the jump") {
    SymbolPair t = builtin_pair("trivial", 0, 1);
    CHECK(wsym_residual(t.phi, t.w, 0, 1, Complex(1)) <= tol(5));
    SymbolPair is = ising_symbols(tst::critical());
    for (auto [r, s] : {std::pair{0, 1}, {0, 2}, {0, 0}, {1, 1}}) {
        Real worst = 0;
        for (const auto& z : circle_nodes(64)) worst = std::max(worst, wsym_residual(is.phi, is.w, r, s, z));
        CHECK(worst <= tol(15));
    }
}

TEST_CASE("exact RHP data satisfies the W relations") {
    Fixture& f = generic();
    THSystem sys = make_system(f.sp, f.fc, 1, 1);
    RHPData d = exact_rhp(sys, 8);
    const Matrix& W = w_perm();
    Matrix P = d.P.matrix();
    CHECK(max_abs(P * W * P * W - Matrix::identity(4)) <= tol(15));
    CHECK(max_abs(W * d.X1inf.matrix() * W - d.X1circ.matrix()) <= tol(15));
    // leading order agrees with the kernel expansion
    Matrix Pa = p_asymptotic(f.ki, 8).P.matrix();
    CHECK(max_abs(Pa - P) < Real("1e-4"));
}

TEST_CASE("offset solvers on seeded data") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        RHPData d = seeded(seed);
        CHECK(offset01_residual(d, solve_offset01(d)) <= tol(12));
        CHECK(offset00_residual(d, solve_offset00(d)) <= tol(12));
        Offset02Result t = solve_offset02(d);
        CHECK(offset02_residual(t) <= tol(12));
        CHECK(offset02_lu_discrepancy(t) <= tol(12));
    }
}

TEST_CASE("offset solvers against the exact oracle") {
    Fixture& f = generic();
    THSystem s11 = make_system(f.sp, f.fc, 1, 1);
    const int n = 8;
    RHPData d = exact_rhp(s11, n);

    Offset01Result u = solve_offset01(d);
    RHPData e01 = exact_rhp(with_offsets(s11, 0, 1), n);
    for (int i = 1; i <= 4; ++i)
        for (int c : {1, 3}) CHECK(abs(u.U1inf.at1(i, c) - e01.X1inf.at(i, c)) <= tol(15));
    CHECK(offset01_residual(d, u) <= tol(12));

    Offset00Result y = solve_offset00(d);
    RHPData e00 = exact_rhp(with_offsets(s11, 0, 0), n);
    for (int i = 1; i <= 4; ++i) {
        CHECK(abs(y.Yhat_j4[i - 1] - e00.P.at(i, 4)) <= tol(15));
        CHECK(abs(y.Y1inf_j3[i - 1] - e00.X1inf.at(i, 3)) <= tol(15));
    }
    CHECK(offset00_residual(d, y) <= tol(12));

    Offset02Result t = solve_offset02(d);
    RHPData e02 = exact_rhp(with_offsets(s11, 0, 2), n);
    for (int i = 1; i <= 4; ++i) {
        std::array<Complex, 4> want{e02.X2inf.at(i, 1), e02.X1inf.at(i, 1), e02.X1inf.at(i, 3), e02.X1inf.at(i, 4)};
        for (std::size_t c = 0; c < 4; ++c) CHECK(abs(t.T[i - 1][c] - want[c]) <= tol(20));
    }
    CHECK(offset02_residual(t) <= tol(12));
}

TEST_CASE("exact h01 formula") {
    Fixture& f = generic();
    THSystem s11 = make_system(f.sp, f.fc, 1, 1);
    for (int n : {6, 10}) {
        H01Exact h = exact_h01_from_data(exact_rhp(s11, n));
        Complex want = exact_h(f.sp, f.fc, 0, 1, n);
        CHECK(rel(h.h, want) <= tol(15));
        CHECK(abs(h.h * h.minus_inv_h + Complex(1)) <= tol(15));
    }
    Real prev = 1;
    for (int n : {8, 12, 16}) {
        RHPData d = p_asymptotic(f.ki, n);
        for (int i = 1; i <= 4; ++i)
            for (int j = 1; j <= 4; ++j)
                if (!d.X1inf.has(i, j)) d.X1inf.set(i, j, exact_rhp(s11, n).X1inf.at(i, j));
        Real diff = rel(exact_h01_from_data(d).h, predict_h01(f.ki, n));
        CHECK(diff < prev);
        prev = diff;
    }
    try {
        exact_h01_from_data(p_asymptotic(trivial().ki, 5));
        FAIL("expected GenericConditionFailed");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::GenericConditionFailed);
    }
}

TEST_CASE("degenerate and special inputs") {
    RHPData zero;
    Matrix z(4, 4);
    zero.P.fill(z);
    zero.X1inf.fill(z);
    zero.X2inf.fill(z);
    zero.X1circ.fill(z);
    try {
        solve_offset01(zero);
        FAIL("expected GenericConditionFailed");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::GenericConditionFailed);
    }

    // decoupled: X1inf_34 = X1circ_43 = 0, P33 = 1
    RHPData d = seeded(17);
    d.X1inf.set(3, 4, Complex(0));
    d.X1circ.set(4, 3, Complex(0));
    d.P.set(3, 3, Complex(1));
    Offset00Result y = solve_offset00(d);
    CHECK(abs(y.Yhat_j4[3] - Complex(1)) <= tol(12));
    CHECK(abs(y.Y1inf_j3[3]) <= tol(12));

    RHPData s = seeded(23);
    std::array<Complex, 4> x = offset02_closed_form(s, {Complex(0), Complex(0), Complex(0), Complex(0)});
    for (const auto& v : x) CHECK(abs(v) == 0);

    RHPData partial;
    partial.P.fill(seeded(5).P.matrix());
    try {
        solve_offset02(partial);
        FAIL("expected MissingData");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingData);
    }
}

TEST_CASE("minor antisymmetry") {
    RHPData d = seeded(31);
    for (int r = 1; r <= 4; ++r)
        for (int s = 1; s <= 4; ++s)
            for (int j = 1; j <= 4; ++j)
                for (int k = 1; k <= 4; ++k) {
                    Complex a = minor_d(d.P, r, s, j, k);
                    CHECK(abs(a + minor_d(d.P, j, s, r, k)) <= tol(5));
                    CHECK(abs(a + minor_d(d.P, r, k, j, s)) <= tol(5));
                    CHECK(abs(a - (d.P.at(j, k) * d.P.at(r, s) - d.P.at(j, s) * d.P.at(r, k))) == 0);
                }
}
