#include <chrono>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "th/asymptotics.hpp"
#include "th/determinants.hpp"
#include "th/ising.hpp"

using namespace th;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what) {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << what << std::endl;
    if (!pass) ++failures;
}

void info(const std::string& what) { std::cout << "  info: " << what << std::endl; }

std::string sci(const Real& x) { return x.str(3, std::ios_base::scientific); }

Real tol(int d) { return eps_digits(static_cast<int>(precision()) - d); }

Real rel(const Complex& a, const Complex& b) { return abs(a - b) / abs(b); }

// Shared Ising a = 1 setup at the reference settings.
struct IsingRun {
    SymbolPair sp;
    FourierConfig fc;
    Model m;
    GKernelSet g;
    KernelIntegrals ki;
    THSystem s11, s01;

    explicit IsingRun(FourierConfig f)
        : sp(ising_symbols(IsingParams::make(Real("0.5"), Real("0.25")))),
          fc(f),
          m(sp, fc),
          g(m),
          ki(g, {default_r_star(m), fc.N}),
          s11(make_system(sp, fc, 1, 1)),
          s01(make_system(sp, fc, 0, 1)) {}

    Complex exact(const THSystem& s, int n) const { return det_th(s, n) / det_th(s, n - 1); }
};

struct Decay {
    Real e10, e20, slope;
    bool monotone = true;
};

Decay decay_of(const std::function<Complex(int)>& pred, const std::function<Complex(int)>& exact) {
    Decay d;
    std::vector<Real> xs, ys;
    Real prev = -1;
    for (int n = 10; n <= 20; ++n) {
        Real e = rel(pred(n), exact(n));
        if (n == 10) d.e10 = e;
        if (n == 20) d.e20 = e;
        if (prev >= 0 && !(e < prev)) d.monotone = false;
        prev = e;
        xs.push_back(Real(n));
        ys.push_back(boost::multiprecision::log(e));
    }
    d.slope = fit_slope(xs, ys);
    return d;
}

void criterion1(const IsingRun& r, double setup_seconds) {
    auto t0 = std::chrono::steady_clock::now();
    Decay d = decay_of([&](int n) { return predict_h11(r.ki, n); }, [&](int n) { return r.exact(r.s11, n); });
    double secs = setup_seconds + std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = d.e20 * 10 <= d.e10 && d.slope < Real("-0.05") && secs < 300;
    std::ostringstream os;
    os << "h(1,1) rel err n=10 " << sci(d.e10) << ", n=20 " << sci(d.e20) << ", ln-slope " << sci(d.slope)
       << ", " << secs << " s";
    report(1, pass, os.str());
}

void criterion2(const IsingRun& r) {
    Real worst_monitor = -1;
    int first_bad_n = 0, bad_monitor = 0;
    for (int n = 10; n <= 20; ++n) {
        Monitors mon = genericity_monitors(r.ki, n, Real("1e-30"));
        for (const auto& v : mon.m)
            if (worst_monitor < 0 || v < worst_monitor) worst_monitor = v;
        if (!first_bad_n && mon.first_failed()) {
            first_bad_n = n;
            bad_monitor = mon.first_failed();
        }
    }
    H01Options bypass;
    bypass.bypass_monitors = true;
    Decay d = decay_of([&](int n) { return predict_h01(r.ki, n, bypass); }, [&](int n) { return r.exact(r.s01, n); });
    bool decay_ok = d.e20 * 10 <= d.e10 && d.monotone;
    std::ostringstream os;
    os << "h(0,1) smallest monitor over n=10..20 is " << sci(worst_monitor);
    if (first_bad_n) os << " (m" << bad_monitor << " below 1e-30 from n=" << first_bad_n << ")";
    report(2, decay_ok && !first_bad_n, os.str());
    std::ostringstream s;
    s << "with monitors bypassed: rel err n=10 " << sci(d.e10) << ", n=20 " << sci(d.e20) << ", ln-slope "
      << sci(d.slope) << (d.monotone ? ", monotone" : ", not monotone");
    info(s.str());

    SymbolPair sp = builtin_pair("generic", 1, 1);
    Model m(sp, r.fc);
    GKernelSet g(m);
    KernelIntegrals ki(g, {default_r_star(m), r.fc.N});
    THSystem s01 = make_system(sp, r.fc, 0, 1);
    Real low = -1;
    for (int n = 10; n <= 20; ++n)
        for (const auto& v : genericity_monitors(ki, n, Real("1e-30")).m)
            if (low < 0 || v < low) low = v;
    Decay gd = decay_of([&](int n) { return predict_h01(ki, n); },
                        [&](int n) { return det_th(s01, n) / det_th(s01, n - 1); });
    std::ostringstream gs;
    gs << "generic family: smallest monitor " << sci(low) << ", rel err n=10 " << sci(gd.e10) << ", n=20 "
       << sci(gd.e20) << ", ln-slope " << sci(gd.slope) << (gd.monotone ? ", monotone" : ", not monotone");
    info(gs.str());
}

void criterion3(const FourierConfig& fc) {
    Real worst_ratio = 0, worst_res = 0;
    std::vector<std::pair<std::string, THSystem>> fams;
    fams.emplace_back("trivial", make_system(builtin_pair("trivial", 0, 0), fc));
    fams.emplace_back("exp", make_system(builtin_pair("exp", 1, 1), fc));
    fams.emplace_back("ising", make_system(ising_symbols(IsingParams::make(Real("0.5"), Real("0.25"))), fc));
    for (const auto& [name, sys] : fams) {
        for (int n = 0; n <= 24; ++n) {
            OrthoPoly p;
            try {
                p = orthopoly(sys, n);
            } catch (const Error& e) {
                std::cout << "  " << name << " n=" << n << ": " << e.what() << std::endl;
                worst_ratio = 1;
                continue;
            }
            Complex ratio = n == 0 ? det_th(sys, 1) : det_th(sys, n + 1) / det_th(sys, n);
            worst_ratio = std::max(worst_ratio, rel(p.h, ratio));
            for (int k = 0; k <= n; ++k)
                worst_res = std::max(worst_res, orthogonality_residual(sys, p, k) / orthogonality_scale(sys, p, k));
        }
    }
    Real t = tol(15);
    report(3, worst_ratio < t && worst_res < t,
           "h = D_{n+1}/D_n worst rel " + sci(worst_ratio) + ", scaled residual " + sci(worst_res) + " (tol " +
               sci(t) + ")");
}

void criterion4() {
    FourierConfig fc{128, 1024};
    Model m(ising_symbols(IsingParams::make(Real("0.5"), Real("0.25"))), fc);
    Real worst = 0;
    for (const auto& t : circle_nodes(64)) worst = std::max(worst, lambda_jump_residual(m, t));
    report(4, worst < Real("1e-30"), "Lambda jump max residual " + sci(worst) + " at P=60");
}

void criterion5() {
    Real worst = 0;
    std::vector<SymbolPair> fams{ising_symbols(IsingParams::make(Real("0.5"), Real("0.25"))),
                                 builtin_pair("generic", 1, 1), builtin_pair("exp", 1, 1)};
    for (const auto& sp : fams)
        for (auto [r, s] : {std::pair{0, 0}, {0, 1}, {0, 2}, {1, 1}})
            for (const auto& z : circle_nodes(64)) worst = std::max(worst, wsym_residual(sp.phi, sp.w, r, s, z));
    report(5, worst < tol(15), "W symmetry max residual " + sci(worst) + " (tol " + sci(tol(15)) + ")");
}

RHPData seeded(std::uint64_t seed) {
    SeededRng rng(seed);
    RHPData d;
    d.P.fill(rng.matrix(4, 4) + Matrix::identity(4));
    d.X1inf.fill(rng.matrix(4, 4));
    d.X2inf.fill(rng.matrix(4, 4));
    d.X1circ.fill(rng.matrix(4, 4));
    return d;
}

// P and X1inf row 3 from the kernel expansion; the entries it does not provide come from the exact oracle.
RHPData asymptotic_data(const KernelIntegrals& ki, const THSystem& s11, int n) {
    RHPData d = p_asymptotic(ki, n);
    RHPData e = exact_rhp(s11, n);
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j) {
            if (!d.X1inf.has(i, j)) d.X1inf.set(i, j, e.X1inf.at(i, j));
            d.X2inf.set(i, j, e.X2inf.at(i, j));
            d.X1circ.set(i, j, e.X1circ.at(i, j));
        }
    return d;
}

void criterion6(const FourierConfig& fc) {
    Real res01 = 0, res00 = 0, res02 = 0, lu = 0;
    int sets = 0;
    auto run = [&](const RHPData& d) {
        res01 = std::max(res01, offset01_residual(d, solve_offset01(d)));
        res00 = std::max(res00, offset00_residual(d, solve_offset00(d)));
        Offset02Result t = solve_offset02(d);
        res02 = std::max(res02, offset02_residual(t));
        lu = std::max(lu, offset02_lu_discrepancy(t));
        ++sets;
    };
    SymbolPair sp = builtin_pair("generic", 1, 1);
    Model m(sp, fc);
    GKernelSet g(m);
    KernelIntegrals ki(g, {default_r_star(m), fc.N});
    THSystem s11 = make_system(sp, fc, 1, 1);
    for (int n : {6, 8, 10}) run(asymptotic_data(ki, s11, n));
    for (std::uint64_t seed = 1; seed <= 6; ++seed) run(seeded(seed));
    Real t = tol(12);
    bool pass = res01 < t && res00 < t && res02 < t && lu < t;
    report(6, pass,
           "plug-back over " + std::to_string(sets) + " data sets: offset01 " + sci(res01) + ", offset00 " +
               sci(res00) + ", offset02 " + sci(res02) + ", LU " + sci(lu) + " (tol " + sci(t) + ")");
}

void criterion7(const IsingRun& base) {
    bool pass = true;
    std::ostringstream os;
    IsingParams p = IsingParams::make(Real("0.5"), Real("0.25"));
    Real r0 = admissible_r0(base.m);
    bool both = r0 < Real("0.6");
    Real radius_diff = 0;
    {
        // default annulus: 0.6 lies inside r0, compare 0.7 with sqrt(r0)
        KernelIntegrals a(base.g, {Real("0.7"), base.fc.N});
        for (long n = 1; n <= 20; ++n)
            for (KernelId k : all_kernels) radius_diff = std::max(radius_diff, abs(a.R(k, n) - base.ki.R(k, n)));
    }
    Real wide_diff = 0;
    {
        SymbolPair sp = ising_symbols(p, IsingAnnulus{Real("0.3"), 1 / Real("0.3")});
        Model m(sp, base.fc);
        GKernelSet g(m);
        KernelIntegrals a(g, {Real("0.6"), base.fc.N}), b(g, {Real("0.7"), base.fc.N});
        for (long n = 1; n <= 20; ++n)
            for (KernelId k : all_kernels) wide_diff = std::max(wide_diff, abs(a.R(k, n) - b.R(k, n)));
    }
    pass = pass && radius_diff < tol(20) && wide_diff < tol(20);
    os << "radii: r0=" << r0.str(4) << (both ? "" : " so 0.6 is inadmissible") << ", 0.7 vs sqrt(r0) "
       << sci(radius_diff) << ", 0.6 vs 0.7 on annulus (0.3, 1/0.3) " << sci(wide_diff);

    IsingRun fine(FourierConfig{base.fc.M, base.fc.N * 2});
    Real change = 0;
    H01Options bypass;
    bypass.bypass_monitors = true;
    IsingSystem ia(p, base.fc), ib(p, fine.fc);
    for (int n = 2; n <= 20; ++n) {
        for (KernelId k : all_kernels) change = std::max(change, abs(base.ki.R(k, n) - fine.ki.R(k, n)));
        change = std::max(change, abs(base.exact(base.s11, n) - fine.exact(fine.s11, n)));
        change = std::max(change, abs(base.exact(base.s01, n) - fine.exact(fine.s01, n)));
        change = std::max(change, abs(predict_h11(base.ki, n) - predict_h11(fine.ki, n)));
        change = std::max(change, abs(predict_h01(base.ki, n, bypass) - predict_h01(fine.ki, n, bypass)));
        change = std::max(change, abs(ia.magnetization(n).M - ib.magnetization(n).M));
    }
    change = std::max(change, abs(base.m.alpha0() - fine.m.alpha0()));
    change = std::max(change, abs(base.m.c0() - fine.m.c0()));
    pass = pass && change < Real("1e-40");
    os << "; N doubling max change " << sci(change);
    report(7, pass, os.str());
}

void criterion8(const FourierConfig& fc) {
    IsingParams p = IsingParams::make(Real("0.5"), Real("0.25"));
    CriticalityStudy st = criticality_study(p, 16, fc, 4);
    Real worst_im = 0;
    for (const auto& row : st.rows) worst_im = std::max(worst_im, Real(abs(row.M.im) / abs(row.M)));
    bool pass = st.fitted_ratio < Real("0.9") && worst_im < tol(20);
    report(8, pass,
           "increment ratio " + sci(st.fitted_ratio) + ", max |Im M|/|M| " + sci(worst_im) + ", M_16 = " +
               st.rows.back().M.re.str(20));
}

template <class F>
void guarded(int id, F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        report(id, false, std::string("error: ") + e.what());
    }
}

}  // namespace

int main() {
    set_precision(120);
    const FourierConfig fc{128, 1024};

    auto t0 = std::chrono::steady_clock::now();
    std::optional<IsingRun> ising;
    try {
        ising.emplace(fc);
    } catch (const std::exception& e) {
        std::cout << "setup failed: " << e.what() << std::endl;
        return 1;
    }
    double setup = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    guarded(1, [&] { criterion1(*ising, setup); });
    guarded(2, [&] { criterion2(*ising); });
    guarded(3, [&] { criterion3(fc); });
    guarded(5, [&] { criterion5(); });
    guarded(6, [&] { criterion6(fc); });
    guarded(7, [&] { criterion7(*ising); });
    guarded(8, [&] { criterion8(fc); });
    ising.reset();

    set_precision(60);
    guarded(4, [&] { criterion4(); });

    std::cout << (failures ? std::to_string(failures) + " criterion(s) failed" : "all criteria passed") << std::endl;
    return failures ? 1 : 0;
}
