#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "th/determinants.hpp"
#include "th/ising.hpp"
#include "th/szego.hpp"

namespace th::cli {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::string str(const Real& x) { return to_string(x); }

Real tol_digits(int d) { return eps_digits(static_cast<int>(precision()) - d); }

IsingParams ising_params(const RunConfig& cfg) {
    Real q = parse_real(cfg.q);
    Real r = cfg.r_param.empty() ? q * q : parse_real(cfg.r_param);
    return IsingParams::make(q, r);
}

std::optional<IsingAnnulus> annulus_override(const RunConfig& cfg, const IsingParams& p) {
    if (cfg.r_inner.empty() && cfg.r_outer.empty()) return std::nullopt;
    IsingAnnulus an = ising_default_annulus(p);
    if (!cfg.r_inner.empty()) an.r_i = parse_real(cfg.r_inner);
    if (!cfg.r_outer.empty()) an.r_o = parse_real(cfg.r_outer);
    return an;
}

std::pair<int, int> offsets_of(const RunConfig& cfg, const SymbolPair& sp) {
    return cfg.offsets ? *cfg.offsets : std::make_pair(sp.r, sp.s);
}

KernelOptions kernel_options(const RunConfig& cfg) {
    KernelOptions ko;
    ko.form = cfg.kernel_form == "legacy" ? KernelForm::legacy : KernelForm::corrected;
    ko.flip_g23 = cfg.inject_g23_flip;
    return ko;
}

ContourConfig contour_of(const RunConfig& cfg, const Model& m) {
    ContourConfig cc;
    cc.r_star = cfg.r_star.empty() ? default_r_star(m) : parse_real(cfg.r_star);
    cc.nodes = cfg.nodes;
    validate_contour(m, cc);
    return cc;
}

// Allowance for the truncated Laurent tail of a log series.
Real tail_of(const LaurentSeries& s) {
    Real t = 0;
    for (long k = s.order() - 3; k <= s.order(); ++k) {
        t = std::max(t, abs(s[k]));
        t = std::max(t, abs(s[-k]));
    }
    return t;
}

Real model_tolerance(const Model& m) {
    Real tail = std::max(tail_of(m.alpha().ln), tail_of(m.beta().ln));
    return std::max(tol_digits(20), Real(1e6) * tail);
}

std::vector<std::string> complex_cells(const Complex& z) { return {str(z.re), str(z.im)}; }

}  // namespace

void validate(const RunConfig& cfg) {
    if (cfg.precision < 50) throw Error(ErrorKind::Config, "--precision must be at least 50");
    if (cfg.trunc_order < 1) throw Error(ErrorKind::Config, "--trunc-order must be positive");
    if (!is_pow2(cfg.nodes)) throw Error(ErrorKind::Config, "--nodes must be a power of two");
    if (cfg.nodes < static_cast<std::size_t>(4 * cfg.trunc_order))
        throw Error(ErrorKind::Config, "--nodes must be at least 4 * --trunc-order");
    if (cfg.n_min < 1 || cfg.n_max < cfg.n_min) throw Error(ErrorKind::Config, "need 1 <= --n-min <= --n-max");
    if (cfg.format != "csv" && cfg.format != "json") throw Error(ErrorKind::Config, "--format must be csv or json");
    if (cfg.kernel_form != "corrected" && cfg.kernel_form != "legacy")
        throw Error(ErrorKind::Config, "--form must be corrected or legacy");
    if (cfg.offsets && (std::abs(cfg.offsets->first) > 8 || std::abs(cfg.offsets->second) > 8))
        throw Error(ErrorKind::Config, "--offsets out of range");
    set_precision(cfg.precision);
}

FourierConfig fourier_of(const RunConfig& cfg) { return {cfg.trunc_order, cfg.nodes}; }

SymbolPair build_pair(const RunConfig& cfg) {
    if (cfg.symbol == "ising") {
        IsingParams p = ising_params(cfg);
        return ising_symbols(p, annulus_override(cfg, p));
    }
    if (cfg.symbol == "expr") {
        if (cfg.phi_expr.empty()) throw Error(ErrorKind::Config, "--symbol expr needs --phi");
        if (cfg.r_inner.empty() || cfg.r_outer.empty())
            throw Error(ErrorKind::Config, "--symbol expr needs --r-inner and --r-outer");
        Real ri = parse_real(cfg.r_inner), ro = parse_real(cfg.r_outer);
        if (!(ri > 0 && ri < 1 && ro > 1)) throw Error(ErrorKind::Config, "annulus must satisfy 0 < r_inner < 1 < r_outer");
        if (!cfg.d_expr.empty() && !cfg.w_expr.empty()) throw Error(ErrorKind::Config, "give --d or --w, not both");
        SymbolPair sp;
        sp.name = "expr";
        sp.phi = expression_symbol(cfg.phi_expr, ri, ro);
        if (!cfg.d_expr.empty()) {
            sp.d = expression_symbol(cfg.d_expr, ri, ro);
            sp.w = product(*sp.d, sp.phi);
        } else if (!cfg.w_expr.empty()) {
            sp.w = expression_symbol(cfg.w_expr, ri, ro);
        } else {
            sp.w = constant(Complex(0), ri, ro);
        }
        sp.w_base = sp.w;
        sp.r = 1;
        sp.s = 1;
        return sp;
    }
    return builtin_pair(cfg.symbol, 1, 1);
}

void write_table(const Table& t, const RunConfig& cfg, std::ostream& os) {
    if (cfg.format == "json") {
        nlohmann::ordered_json j;
        j["schema"] = "th-asym/1";
        j["command"] = t.command;
        nlohmann::ordered_json c;
        c["precision"] = cfg.precision;
        c["trunc_order"] = cfg.trunc_order;
        c["nodes"] = cfg.nodes;
        c["symbol"] = cfg.symbol;
        c["n_min"] = cfg.n_min;
        c["n_max"] = cfg.n_max;
        j["config"] = c;
        j["columns"] = t.headers;
        auto rows = nlohmann::ordered_json::array();
        for (const auto& r : t.rows) {
            nlohmann::ordered_json o;
            for (std::size_t i = 0; i < t.headers.size() && i < r.size(); ++i) o[t.headers[i]] = r[i];
            rows.push_back(o);
        }
        j["rows"] = rows;
        nlohmann::ordered_json s = nlohmann::ordered_json::object();
        for (const auto& [k, v] : t.summary) s[k] = v;
        j["summary"] = s;
        os << j.dump(2) << "\n";
        return;
    }
    for (std::size_t i = 0; i < t.headers.size(); ++i) os << (i ? "," : "") << t.headers[i];
    os << "\n";
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << "\n";
    }
    for (const auto& [k, v] : t.summary) os << "# " << k << "=" << v << "\n";
}

Table cmd_coeffs(const RunConfig& cfg) {
    SymbolPair sp = build_pair(cfg);
    auto [r, s] = offsets_of(cfg, sp);
    THSystem sys = make_system(sp, fourier_of(cfg), r, s);
    Table t;
    t.command = "coeffs";
    t.headers = {"k", "Re phi_k", "Im phi_k", "Re w_k", "Im w_k"};
    for (long k = -cfg.trunc_order; k <= cfg.trunc_order; ++k) {
        Complex p = sys.phi[k], w = sys.w[k];
        t.rows.push_back({std::to_string(k), str(p.re), str(p.im), str(w.re), str(w.im)});
    }
    return t;
}

Table cmd_det(const RunConfig& cfg) {
    SymbolPair sp = build_pair(cfg);
    auto [r, s] = offsets_of(cfg, sp);
    THSystem sys = make_system(sp, fourier_of(cfg), r, s);
    Table t;
    t.command = "det";
    t.headers = {"n", "Re D_n", "Im D_n", "Re h_n", "Im h_n"};
    for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
        Complex d = det_th(sys, n);
        std::vector<std::string> row{std::to_string(n), str(d.re), str(d.im)};
        try {
            Complex h = norm_h(sys, n);
            row.push_back(str(h.re));
            row.push_back(str(h.im));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::SingularDn) throw;
            row.push_back("nan");
            row.push_back("nan");
        }
        t.rows.push_back(row);
    }
    t.summary.push_back({"offsets", std::to_string(r) + "," + std::to_string(s)});
    return t;
}

Table cmd_asymp_compare(const RunConfig& cfg, int& warnings) {
    warnings = 0;
    SymbolPair sp = build_pair(cfg);
    std::pair<int, int> off = cfg.offsets ? *cfg.offsets : std::make_pair(1, 1);
    if (off != std::make_pair(1, 1) && off != std::make_pair(0, 1))
        throw Error(ErrorKind::Config, "asymp-compare supports offsets 1,1 and 0,1");
    const bool h01 = off.first == 0;
    FourierConfig fc = fourier_of(cfg);
    Model m(sp, fc);
    ContourConfig cc = contour_of(cfg, m);
    GKernelSet g(m, kernel_options(cfg));
    KernelIntegrals ki(g, cc);
    THSystem sys = make_system(sp, fc, off.first, off.second);
    H01Options ho;
    ho.threshold = parse_real(cfg.threshold);
    ho.bypass_monitors = cfg.bypass_monitors;

    Table t;
    t.command = "asymp-compare";
    t.headers = {"n", "Re h_exact", "Im h_exact", "Re h_pred", "Im h_pred", "rel_error", "m1", "m2", "m3", "m4",
                 "status"};
    std::vector<Real> xs, ys;
    const int n0 = std::max(cfg.n_min, 2);
    for (int n = n0; n <= cfg.n_max; ++n) {
        std::vector<std::string> row{std::to_string(n)};
        std::string status = "ok";
        std::optional<Complex> exact, pred;
        try {
            exact = norm_h(sys, n - 1);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::SingularDn) throw;
            status = "degenerate:exact";
        }
        Monitors mon{};
        if (h01) mon = genericity_monitors(ki, n, ho.threshold);
        try {
            pred = h01 ? predict_h01(ki, n, ho) : predict_h11(ki, n);
            if (h01 && ho.bypass_monitors && mon.first_failed()) status = "monitors_bypassed:m" + std::to_string(mon.first_failed());
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::GenericityFailed)
                status = "genericity_failed:m" + std::to_string(mon.first_failed());
            else if (e.kind() == ErrorKind::DegeneratePredictor)
                status = status == "ok" ? "degenerate:predictor" : status + ";predictor";
            else
                throw;
        }
        auto cells = [&](const std::optional<Complex>& z) {
            if (z) return complex_cells(*z);
            return std::vector<std::string>{"nan", "nan"};
        };
        for (auto& c : cells(exact)) row.push_back(c);
        for (auto& c : cells(pred)) row.push_back(c);
        if (exact && pred && abs(*exact) > 0) {
            Real rel = abs(*exact - *pred) / abs(*exact);
            row.push_back(str(rel));
            if (rel > 0) {
                xs.push_back(Real(n));
                ys.push_back(boost::multiprecision::log10(rel));
            }
        } else {
            row.push_back("nan");
        }
        for (int i = 0; i < 4; ++i) row.push_back(h01 ? str(mon.m[static_cast<std::size_t>(i)]) : "");
        if (status != "ok") ++warnings;
        row.push_back(status);
        t.rows.push_back(row);
    }
    t.summary.push_back({"offsets", std::to_string(off.first) + "," + std::to_string(off.second)});
    t.summary.push_back({"r_star", str(cc.r_star)});
    t.summary.push_back({"fitted_log10_slope", xs.size() >= 2 ? str(fit_slope(xs, ys)) : "nan"});
    t.summary.push_back({"warnings", std::to_string(warnings)});
    return t;
}

Table cmd_ising(const RunConfig& cfg) {
    IsingParams p = ising_params(cfg);
    IsingSystem is(p, fourier_of(cfg), annulus_override(cfg, p));
    Table t;
    t.command = "ising";
    t.headers = {"n", "Re M_n", "Im M_n", "case", "r", "s"};
    std::vector<Real> xs, ys;
    Complex prev;
    for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
        MagnetizationResult mr = is.magnetization(n);
        t.rows.push_back({std::to_string(n), str(mr.M.re), str(mr.M.im), case_name(mr.which), std::to_string(mr.r),
                          std::to_string(mr.s)});
        if (n > cfg.n_min) {
            Real inc = abs(mr.M - prev);
            if (inc > 0) {
                xs.push_back(Real(n));
                ys.push_back(boost::multiprecision::log(inc));
            }
        }
        prev = mr.M;
    }
    t.summary.push_back({"case", case_name(p.which())});
    t.summary.push_back({"increment_ratio",
                         xs.size() >= 2 ? str(boost::multiprecision::exp(fit_slope(xs, ys))) : "nan"});
    return t;
}

namespace {

SuiteResult suite(const std::string& name, const std::function<std::string(bool&)>& body) {
    bool pass = true;
    std::string detail;
    try {
        detail = body(pass);
    } catch (const Error& e) {
        pass = false;
        detail = e.what();
    }
    return {name, pass, detail};
}

std::string worst(const Real& v, const Real& tol) { return "max " + v.str(4) + " tol " + tol.str(3); }

RHPData synthetic_data(std::uint64_t seed) {
    SeededRng rng(seed);
    RHPData d;
    d.P.fill(rng.matrix(4, 4) + Matrix::identity(4));
    d.X1inf.fill(rng.matrix(4, 4));
    d.X2inf.fill(rng.matrix(4, 4));
    d.X1circ.fill(rng.matrix(4, 4));
    return d;
}

// Plug-back residuals of the three offset solvers on one data set.
Real solver_residual(const RHPData& d, std::string& skipped) {
    Real r = 0;
    try {
        r = std::max(r, offset01_residual(d, solve_offset01(d)));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::GenericConditionFailed) throw;
        skipped += " offset01";
    }
    try {
        r = std::max(r, offset00_residual(d, solve_offset00(d)));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::GenericConditionFailed) throw;
        skipped += " offset00";
    }
    try {
        Offset02Result t = solve_offset02(d);
        r = std::max({r, offset02_residual(t), offset02_lu_discrepancy(t)});
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::GenericConditionFailed) throw;
        skipped += " offset02";
    }
    return r;
}

}  // namespace

std::vector<SuiteResult> cmd_check(const RunConfig& cfg) {
    SymbolPair sp = build_pair(cfg);
    FourierConfig fc = fourier_of(cfg);
    std::vector<SuiteResult> out;
    std::optional<Model> model;
    if (sp.d) model.emplace(sp, fc);
    const std::size_t nodes = 64;
    std::vector<Complex> circle = circle_nodes(nodes);

    out.push_back(suite("plemelj", [&](bool& pass) -> std::string {
        if (!model) return "skipped: pair has no factor d";
        Real tol = model_tolerance(*model);
        Real v = std::max(plemelj_residual(model->alpha(), model->phi(), nodes),
                          plemelj_residual(model->beta(), model->d(), nodes));
        pass = v < tol;
        return worst(v, tol);
    }));

    out.push_back(suite("w-symmetry", [&](bool& pass) -> std::string {
        Real tol = tol_digits(15), v = 0;
        for (auto [r, s] : {std::pair{0, 0}, {0, 1}, {0, 2}, {1, 1}})
            for (const auto& z : circle) v = std::max(v, wsym_residual(sp.phi, sp.w, r, s, z));
        pass = v < tol;
        return worst(v, tol);
    }));

    out.push_back(suite("lambda-jump", [&](bool& pass) -> std::string {
        if (!model) return "skipped: pair has no factor d";
        Real tol = model_tolerance(*model), v = 0;
        for (const auto& z : circle) v = std::max(v, lambda_jump_residual(*model, z));
        pass = v < tol;
        return worst(v, tol);
    }));

    out.push_back(suite("solver-plug-back", [&](bool& pass) -> std::string {
        Real tol = tol_digits(12), v = 0;
        std::string skipped;
        for (std::uint64_t seed : {11u, 12u, 13u}) v = std::max(v, solver_residual(synthetic_data(seed), skipped));
        THSystem sys = make_system(sp, fc, 1, 1);
        std::string sk;
        v = std::max(v, solver_residual(exact_rhp(sys, 6), sk));
        pass = v < tol;
        return worst(v, tol) + (sk.empty() ? "" : "; non-generic exact data, skipped:" + sk);
    }));

    std::optional<KernelIntegrals> ki;
    Real r0 = 0;
    if (model) {
        GKernelSet g(*model, kernel_options(cfg));
        ContourConfig cc = contour_of(cfg, *model);
        r0 = admissible_r0(*model);
        ki.emplace(g, cc);
    }

    out.push_back(suite("radius-independence", [&](bool& pass) -> std::string {
        if (!model) return "skipped: pair has no factor d";
        GKernelSet g(*model, kernel_options(cfg));
        ContourConfig alt = ki->contour();
        alt.r_star = (alt.r_star + r0) / 2;
        KernelIntegrals kj(g, alt);
        Real tol = tol_digits(20), v = 0;
        for (long n = 1; n <= 10; ++n)
            for (KernelId k : all_kernels) v = std::max(v, abs(ki->R(k, n) - kj.R(k, n)));
        pass = v < tol;
        return worst(v, tol);
    }));

    out.push_back(suite("r-relations", [&](bool& pass) -> std::string {
        if (!model) return "skipped: pair has no factor d";
        using K = KernelId;
        const Complex a0 = ki->alpha0(), c0 = ki->c0();
        Real scale = 1;
        for (KernelId k : all_kernels) scale = std::max(scale, abs(ki->R(k, 1)));
        Real tol = tol_digits(20) * scale, v = 0;
        for (long n = 1; n <= 10; ++n) {
            auto R = [&](K k) { return ki->R(k, n); };
            v = std::max(v, abs(R(K::g14) - a0 * R(K::g34)));
            v = std::max(v, abs(R(K::g23) + a0 * R(K::g21)));
            v = std::max(v, abs(R(K::g12) + a0 * R(K::g32) + c0 * a0 * a0 * R(K::g34)));
            v = std::max(v, abs(R(K::g43) - a0 * R(K::g41) - c0 * a0 * R(K::g23)));
        }
        pass = v < tol;
        return worst(v, tol);
    }));
    return out;
}

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Singular:
        case ErrorKind::SingularDn:
        case ErrorKind::DegeneratePredictor:
        case ErrorKind::GenericityFailed:
        case ErrorKind::GenericConditionFailed:
        case ErrorKind::OnCircle:
        case ErrorKind::NonSquare:
            return kDegenerate;
        case ErrorKind::Inconsistent:
            return kInvariantFailed;
        default:
            return kConfigError;
    }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Toeplitz+Hankel determinants and their Riemann-Hilbert asymptotics"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string offsets;

    auto common = [&](CLI::App* sc) {
        sc->add_option("--precision", cfg.precision, "working precision in decimal digits (>= 50)");
        sc->add_option("--trunc-order", cfg.trunc_order, "Laurent truncation order M");
        sc->add_option("--nodes", cfg.nodes, "quadrature nodes N (power of two, >= 4M)");
        sc->add_option("--r-star", cfg.r_star, "contour radius, r0 < r_star < 1 (default sqrt(r0))");
        sc->add_option("--symbol", cfg.symbol, "ising | trivial | exp | generic | expr");
        sc->add_option("--phi", cfg.phi_expr, "phi(z) expression for --symbol expr");
        sc->add_option("--d", cfg.d_expr, "d(z) expression, w = d phi");
        sc->add_option("--w", cfg.w_expr, "w(z) expression when no factor d is given");
        sc->add_option("--r-inner", cfg.r_inner, "inner radius of the analyticity annulus");
        sc->add_option("--r-outer", cfg.r_outer, "outer radius of the analyticity annulus");
        sc->add_option("--q", cfg.q, "Ising q in (0,1)");
        sc->add_option("--r-param", cfg.r_param, "Ising boundary parameter (default q^2, the a = 1 case)");
        sc->add_option("--offsets", offsets, "offsets r,s");
        sc->add_option("--n-min", cfg.n_min, "first n");
        sc->add_option("--n-max", cfg.n_max, "last n");
        sc->add_option("--format", cfg.format, "csv | json");
        sc->add_option("--out", cfg.out, "output file (default stdout)");
    };

    auto* coeffs = app.add_subcommand("coeffs", "Fourier coefficients phi_k, w_k for |k| <= M");
    auto* det = app.add_subcommand("det", "determinants D_n and norms h_n = D_{n+1}/D_n");
    det->alias("norms");
    auto* cmp = app.add_subcommand("asymp-compare", "exact against predicted h for offsets 1,1 or 0,1");
    auto* ising = app.add_subcommand("ising", "zig-zag magnetization M_n");
    auto* check = app.add_subcommand("check", "property suites; exit 0 iff all pass");
    for (auto* sc : {coeffs, det, cmp, ising, check}) common(sc);
    for (auto* sc : {cmp, check}) sc->add_option("--form", cfg.kernel_form, "kernel forms: corrected | legacy");
    cmp->add_option("--threshold", cfg.threshold, "genericity monitor threshold");
    cmp->add_flag("--bypass-monitors", cfg.bypass_monitors, "evaluate h01 even where a monitor fails");
    check->add_flag("--debug-flip-g23", cfg.inject_g23_flip, "fault injection: flip the sign of g23");

    const std::string expr_help =
        "Expressions: numbers, z, i, pi, e; + - * / ^ and unary minus; exp log sqrt sin cos.";
    app.footer(expr_help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e, out, err);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (!offsets.empty()) {
            auto comma = offsets.find(',');
            if (comma == std::string::npos) throw Error(ErrorKind::Config, "--offsets expects r,s");
            try {
                cfg.offsets = std::make_pair(std::stoi(offsets.substr(0, comma)), std::stoi(offsets.substr(comma + 1)));
            } catch (const std::logic_error&) {
                throw Error(ErrorKind::Config, "--offsets expects integers r,s");
            }
        }
        validate(cfg);

        std::ofstream file;
        if (!cfg.out.empty()) {
            file.open(cfg.out);
            if (!file) throw Error(ErrorKind::Config, "cannot open " + cfg.out);
        }
        std::ostream& os = cfg.out.empty() ? out : file;

        if (*check) {
            auto res = cmd_check(cfg);
            bool all = true;
            for (const auto& r : res) {
                os << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
                all = all && r.pass;
            }
            if (!all) {
                for (const auto& r : res)
                    if (!r.pass) err << "invariant failed: " << r.name << "\n";
                return kInvariantFailed;
            }
            return kOk;
        }
        Table t;
        int warnings = 0;
        if (*coeffs) t = cmd_coeffs(cfg);
        else if (*det) t = cmd_det(cfg);
        else if (*cmp) t = cmd_asymp_compare(cfg, warnings);
        else t = cmd_ising(cfg);
        write_table(t, cfg, os);
        if (warnings) err << "warning: " << warnings << " row(s) flagged\n";
        return kOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

}  // namespace th::cli
