#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "th/asymptotics.hpp"
#include "th/symbols.hpp"

namespace th::cli {

enum ExitCode { kOk = 0, kConfigError = 2, kDegenerate = 3, kInvariantFailed = 4 };

struct RunConfig {
    unsigned precision = 120;
    long trunc_order = 128;
    std::size_t nodes = 1024;
    std::string r_star;  // empty: sqrt(r0)
    std::string symbol = "ising";
    std::string q = "0.5";
    std::string r_param;  // empty: q^2
    std::string phi_expr, d_expr, w_expr;
    std::string r_inner, r_outer;
    std::optional<std::pair<int, int>> offsets;
    int n_min = 2, n_max = 20;
    std::string format = "csv";
    std::string out;
    std::string threshold = "1e-30";
    std::string kernel_form = "corrected";
    bool bypass_monitors = false;
    bool inject_g23_flip = false;
};

// Checks ranges and applies the precision; throws Error(Config).
void validate(const RunConfig& cfg);

SymbolPair build_pair(const RunConfig& cfg);
FourierConfig fourier_of(const RunConfig& cfg);

struct Table {
    std::string command;
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<std::string, std::string>> summary;
};

void write_table(const Table& t, const RunConfig& cfg, std::ostream& os);

Table cmd_coeffs(const RunConfig& cfg);
Table cmd_det(const RunConfig& cfg);
Table cmd_asymp_compare(const RunConfig& cfg, int& warnings);
Table cmd_ising(const RunConfig& cfg);

struct SuiteResult {
    std::string name;
    bool pass;
    std::string detail;
};
std::vector<SuiteResult> cmd_check(const RunConfig& cfg);

int exit_code_for(const Error& e);

// Parses argv and runs; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace th::cli
