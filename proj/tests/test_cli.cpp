#include "common.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"

using namespace th;

namespace {

struct Run {
    int rc;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    tst::PrecisionGuard guard;
    args.insert(args.begin(), "th-asym");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    int rc = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {rc, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) v.push_back(l);
    return v;
}

std::vector<std::string> cells(const std::string& line) {
    std::vector<std::string> v;
    std::istringstream is(line);
    for (std::string c; std::getline(is, c, ',');) v.push_back(c);
    return v;
}

const std::vector<std::string> fast{"--precision", "60", "--trunc-order", "64", "--nodes", "256"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b = fast) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TEST_CASE("coeffs of a constant symbol") {
    Run r = run(with({"coeffs", "--symbol", "expr", "--phi", "1", "--r-inner", "0.5", "--r-outer", "2"}));
    REQUIRE(r.rc == 0);
    auto ls = lines(r.out);
    CHECK(ls[0] == "k,Re phi_k,Im phi_k,Re w_k,Im w_k");
    CHECK(ls.size() == 1 + 129);
    int nonzero = 0;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        auto c = cells(ls[i]);
        if (abs(Complex(parse_real(c[1]), parse_real(c[2]))) > Real("1e-40")) {
            ++nonzero;
            CHECK(c[0] == "0");
        }
    }
    CHECK(nonzero == 1);
}

TEST_CASE("coeffs of exp(z) match 1/k!") {
    Run r = run(with({"coeffs", "--symbol", "expr", "--phi", "exp(z)", "--r-inner", "0.5", "--r-outer", "2"}));
    REQUIRE(r.rc == 0);
    tst::PrecisionGuard g;
    set_precision(60);
    Real fact = 1;
    for (const auto& l : lines(r.out)) {
        auto c = cells(l);
        if (c[0] == "k") continue;
        long k = std::stol(c[0]);
        if (k < 0 || k > 20) continue;
        if (k > 0) fact *= k;
        CHECK(abs(parse_real(c[1]) - 1 / fact) <= Real("1e-50"));
    }
}

TEST_CASE("Ising coeffs are stable under node doubling") {
    Run a = run(with({"coeffs"}, {"--precision", "60", "--trunc-order", "96", "--nodes", "512"}));
    Run b = run(with({"coeffs"}, {"--precision", "60", "--trunc-order", "96", "--nodes", "1024"}));
    REQUIRE(a.rc == 0);
    REQUIRE(b.rc == 0);
    tst::PrecisionGuard g;
    set_precision(60);
    auto la = lines(a.out), lb = lines(b.out);
    REQUIRE(la.size() == lb.size());
    for (std::size_t i = 1; i < la.size(); ++i) {
        auto ca = cells(la[i]), cb = cells(lb[i]);
        for (std::size_t j = 1; j < 5; ++j) CHECK(abs(parse_real(ca[j]) - parse_real(cb[j])) <= Real("1e-40"));
    }
}

TEST_CASE("det output schema and consistency") {
    Run r = run(with({"det", "--symbol", "generic", "--n-min", "1", "--n-max", "6"}));
    REQUIRE(r.rc == 0);
    auto ls = lines(r.out);
    CHECK(ls[0] == "n,Re D_n,Im D_n,Re h_n,Im h_n");
    tst::PrecisionGuard g;
    set_precision(60);
    for (std::size_t i = 1; i + 1 < 7; ++i) {
        auto c = cells(ls[i]), d = cells(ls[i + 1]);
        Complex dn(parse_real(c[1]), parse_real(c[2])), h(parse_real(c[3]), parse_real(c[4]));
        Complex dn1(parse_real(d[1]), parse_real(d[2]));
        CHECK(abs(h * dn - dn1) <= Real("1e-45") * abs(dn1));
    }
    Run alias = run(with({"norms", "--symbol", "generic", "--n-min", "1", "--n-max", "6"}));
    CHECK(alias.out == r.out);
}

TEST_CASE("reruns are byte-identical and numbers carry full precision") {
    auto args = with({"det", "--n-max", "8", "--format", "json"});
    Run a = run(args), b = run(args);
    REQUIRE(a.rc == 0);
    CHECK(a.out == b.out);
    auto j = nlohmann::json::parse(a.out);
    CHECK(j["schema"] == "th-asym/1");
    CHECK(j["command"] == "det");
    REQUIRE(j["rows"].size() == 7);
    std::string v = j["rows"][0]["Re D_n"];
    CHECK(v.size() > 60);
}

TEST_CASE("writes to --out") {
    std::string path = "th_asym_test_out.csv";
    Run r = run(with({"det", "--n-max", "4", "--out", path}));
    REQUIRE(r.rc == 0);
    CHECK(r.out.empty());
    std::ifstream f(path);
    std::string first;
    std::getline(f, first);
    CHECK(first == "n,Re D_n,Im D_n,Re h_n,Im h_n");
    f.close();
    std::remove(path.c_str());
}

TEST_CASE("configuration errors exit with 2") {
    CHECK(run({"det", "--precision", "40"}).rc == 2);
    CHECK(run({"det", "--nodes", "100"}).rc == 2);
    CHECK(run({"det", "--trunc-order", "128", "--nodes", "256"}).rc == 2);
    CHECK(run(with({"det", "--format", "xml"})).rc == 2);
    CHECK(run(with({"det", "--symbol", "nope"})).rc == 2);
    CHECK(run(with({"det", "--q", "1.5"})).rc == 2);
    CHECK(run(with({"det", "--offsets", "1"})).rc == 2);
    CHECK(run(with({"det", "--n-min", "5", "--n-max", "2"})).rc == 2);
    CHECK(run(with({"asymp-compare", "--r-star", "0.6"})).rc == 2);
    CHECK(run(with({"asymp-compare", "--offsets", "0,2"})).rc == 2);
    CHECK(run(with({"coeffs", "--symbol", "expr", "--phi", "exp(", "--r-inner", "0.5", "--r-outer", "2"})).rc == 2);
    CHECK(run({"--bogus"}).rc == 2);
    Run r = run(with({"det", "--nodes", "100"}, {}));
    CHECK(r.err.find("power of two") != std::string::npos);
}

TEST_CASE("asymp-compare flags every row for constant symbols") {
    Run r = run(with({"asymp-compare", "--symbol", "trivial", "--n-min", "2", "--n-max", "6"}));
    CHECK(r.rc == 0);
    auto ls = lines(r.out);
    CHECK(ls[0] == "n,Re h_exact,Im h_exact,Re h_pred,Im h_pred,rel_error,m1,m2,m3,m4,status");
    int rows = 0;
    for (const auto& l : ls) {
        if (l[0] == '#' || l[0] == 'n') continue;
        ++rows;
        CHECK(cells(l).back().rfind("degenerate", 0) == 0);
    }
    CHECK(rows == 5);
    CHECK(r.out.find("# warnings=5") != std::string::npos);
    CHECK(r.err.find("5 row(s) flagged") != std::string::npos);

    Run r01 = run(with({"asymp-compare", "--symbol", "trivial", "--offsets", "0,1", "--n-max", "4"}));
    CHECK(r01.rc == 0);
    CHECK(r01.out.find("genericity_failed:m1") != std::string::npos);
}

namespace {

Real slope_of(const std::string& out) {
    auto pos = out.find("# fitted_log10_slope=");
    REQUIRE(pos != std::string::npos);
    std::string v = out.substr(pos + 21, out.find('\n', pos) - pos - 21);
    return parse_real(v);
}

}  // namespace

TEST_CASE("asymp-compare on the Ising pair has a negative slope") {
    auto base = std::vector<std::string>{"--precision", "60", "--trunc-order", "96", "--nodes", "512",
                                         "--n-min",     "6",  "--n-max",       "20"};
    Run r11 = run(with({"asymp-compare"}, base));
    REQUIRE(r11.rc == 0);
    {
        tst::PrecisionGuard g;
        set_precision(60);
        CHECK(slope_of(r11.out) < 0);
    }
    // the Ising pair fails monitor m1, so each h01 row is flagged unless monitors are bypassed
    Run flagged = run(with({"asymp-compare", "--offsets", "0,1"}, base));
    CHECK(flagged.rc == 0);
    CHECK(flagged.out.find("genericity_failed:m1") != std::string::npos);
    Run r01 = run(with({"asymp-compare", "--offsets", "0,1", "--bypass-monitors"}, base));
    REQUIRE(r01.rc == 0);
    tst::PrecisionGuard g;
    set_precision(60);
    CHECK(slope_of(r01.out) < 0);
}

TEST_CASE("check passes by default and isolates an injected fault") {
    Run ok = run(with({"check"}));
    CHECK(ok.rc == 0);
    for (const auto& l : lines(ok.out)) CHECK(l.rfind("PASS", 0) == 0);
    CHECK(lines(ok.out).size() == 6);

    Run bad = run(with({"check", "--debug-flip-g23"}));
    CHECK(bad.rc == 4);
    CHECK(bad.out.find("PASS lambda-jump") != std::string::npos);
    CHECK(bad.out.find("FAIL r-relations") != std::string::npos);
    CHECK(bad.err.find("invariant failed: r-relations") != std::string::npos);
}

TEST_CASE("check verdicts do not depend on precision") {
    auto verdicts = [](const std::string& out) {
        std::vector<std::string> v;
        for (const auto& l : lines(out)) v.push_back(l.substr(0, l.find(':')));
        return v;
    };
    Run lo = run({"check", "--precision", "50", "--trunc-order", "64", "--nodes", "256"});
    Run hi = run({"check", "--precision", "120", "--trunc-order", "128", "--nodes", "1024"});
    CHECK(lo.rc == hi.rc);
    CHECK(verdicts(lo.out) == verdicts(hi.out));
}

TEST_CASE("ising subcommand") {
    Run r = run(with({"ising", "--n-min", "1", "--n-max", "8", "--format", "json"},
                     {"--precision", "60", "--trunc-order", "96", "--nodes", "512"}));
    REQUIRE(r.rc == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["rows"].size() == 8);
    CHECK(j["rows"][0]["case"] == "a=1");
    CHECK(j["rows"][0]["s"] == "1");
    CHECK(j["summary"]["case"] == "a=1");
}
