#include "common.hpp"

#include "th/asymptotics.hpp"

using namespace th;
using tst::tol;

TEST_CASE("coefficients of constants and monomials") {
    LaurentSeries one = fourier_coeffs(constant(Complex(1), Real("0.5"), Real(2)), 16, 64);
    CHECK(abs(one[0] - Complex(1)) <= tol(5));
    for (long k = 1; k <= 16; ++k) {
        CHECK(abs(one[k]) <= tol(5));
        CHECK(abs(one[-k]) <= tol(5));
    }
    LaurentSeries z3 = fourier_coeffs(monomial(3, Real("0.5"), Real(3)), 16, 64);
    for (long k = -16; k <= 16; ++k) CHECK(abs(z3[k] - Complex(k == 3 ? 1 : 0)) <= tol(5));
    CHECK(abs(eval_series(one, Complex(Real("1.5"))) - Complex(1)) <= tol(5));
    CHECK(abs(eval_series(z3, Complex(2)) - Complex(8)) <= tol(5));
}

TEST_CASE("exp(z) has Taylor coefficients 1/k!") {
    const long M = 48;
    LaurentSeries s = fourier_coeffs(expression_symbol("exp(z)", Real("0.5"), Real(2)), M, 256);
    Real fact = 1;
    for (long k = 0; k <= M / 2; ++k) {
        if (k > 0) fact *= k;
        CHECK(abs(s[k] - Complex(1 / fact)) <= tol(10));
        if (k > 0) CHECK(abs(s[-k]) <= tol(10));
    }
}

TEST_CASE("series round-trip at seeded annulus points") {
    SymbolPair sp = ising_symbols(tst::critical());
    auto fc = tst::ising_fc();
    LaurentSeries s = fourier_coeffs(sp.w, fc.M, fc.N);
    SeededRng rng(3);
    for (int i = 0; i < 32; ++i) {
        Real rad = Real("0.9") + Real("0.2") * (rng.uniform() + 1) / 2;
        Complex z = polar(rad, pi() * rng.uniform());
        CHECK(abs(eval_series(s, z) - sp.w(z)) <= tol(20));
    }
    CHECK_THROWS_AS(eval_series(s, Complex(3)), Error);
}

TEST_CASE("node count must cover the truncation") {
    AnnulusFunction f = constant(Complex(1), Real("0.5"), Real(2));
    try {
        fourier_coeffs(f, 64, 128);
        FAIL("expected NodeCountTooSmall");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NodeCountTooSmall);
    }
    CHECK_THROWS_AS(fourier_coeffs(f, 16, 100), Error);
    LaurentSeries s(4, Real("0.5"), Real(2));
    CHECK_THROWS_AS(s.set(5, Complex(1)), Error);
    CHECK(abs(s[9]) == 0);
}

TEST_CASE("contour coefficients of monomials") {
    for (long m : {-3L, 0L, 2L}) {
        AnnulusFunction f = monomial(m, Real("0.1"), Real(10));
        for (long k = -4; k <= 4; ++k)
            CHECK(abs(contour_coefficient(f, k, Real("0.7"), 64) - Complex(k == m ? 1 : 0)) <= tol(5));
    }
    CHECK(abs(contour_coefficient(constant(Complex(1)), 5, Real("0.7"), 64)) <= tol(5));
}

TEST_CASE("tilde reflects coefficients") {
    AnnulusFunction f = expression_symbol("exp(0.3*z - 0.2/z)*(1-0.4*z)", Real("0.5"), Real(2));
    LaurentSeries a = fourier_coeffs(f, 32, 128), b = fourier_coeffs(tilde(f), 32, 128);
    for (long k = -32; k <= 32; ++k) CHECK(abs(a[k] - b[-k]) <= tol(5));
    LaurentSeries r = a.reflected();
    for (long k = -32; k <= 32; ++k) CHECK(abs(r[k] - a[-k]) == 0);
}

TEST_CASE("coefficients are radius independent") {
    AnnulusFunction f = expression_symbol("(1-0.3*z)^(-1)*exp(0.2/z)", Real("0.5"), Real(2));
    for (long k = -10; k <= 10; ++k) {
        Complex a = contour_coefficient(f, k, Real(1), 256);
        Complex b = contour_coefficient(f, k, Real("1.4"), 256);
        CHECK(abs(a - b) <= tol(12));
    }
}

TEST_CASE("trapezoid convergence under node doubling") {
    // successive doublings shrink the change geometrically
    AnnulusFunction f = expression_symbol("1/(1-0.6*z)", Real("0.5"), Real("1.5"));
    Real prev = -1;
    Complex last = contour_coefficient(f, 2, Real(1), 16);
    for (std::size_t n : {32u, 64u, 128u}) {
        Complex cur = contour_coefficient(f, 2, Real(1), n);
        Real change = abs(cur - last);
        if (prev > 0) CHECK(change < prev * Real("0.01"));
        prev = change;
        last = cur;
    }
}

TEST_CASE("Ising coefficients decay geometrically") {
    SymbolPair sp = ising_symbols(tst::critical());
    auto fc = tst::ising_fc();
    LaurentSeries s = fourier_coeffs(sp.phi, fc.M, fc.N);
    std::vector<Real> xs, ys;
    for (long k = 4; k <= fc.M / 2; ++k) {
        xs.push_back(Real(k));
        ys.push_back(boost::multiprecision::log(abs(s[k]) + abs(s[-k])));
    }
    Real slope = 0, mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    Real sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        slope += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    slope /= sxx;
    CHECK(boost::multiprecision::exp(slope) < Real("0.3"));
}

TEST_CASE("Ising g32 contour coefficient is stable under node doubling") {
    SymbolPair sp = ising_symbols(tst::critical());
    Model m(sp, tst::ising_fc());
    GKernelSet g(m);
    AnnulusFunction g32 = g.function(KernelId::g32);
    Real rs = default_r_star(m);
    Complex a = contour_coefficient(g32, 10, 1 / rs, 256), b = contour_coefficient(g32, 10, 1 / rs, 512);
    CHECK(abs(a - b) <= tol(15));
}

TEST_CASE("root table reduces exponents") {
    RootTable t(8);
    CHECK(abs(t.power(3, 5) - t[7]) == 0);
    CHECK(abs(t.power(-1, 1) - t[7]) == 0);
    CHECK(abs(t[2] - I()) <= tol(2));
}
