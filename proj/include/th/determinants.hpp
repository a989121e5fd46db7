#pragma once

#include <vector>

#include "th/fourier.hpp"
#include "th/numerics.hpp"
#include "th/symbols.hpp"

namespace th {

struct THSystem {
    LaurentSeries phi;
    LaurentSeries w;
    int r = 0, s = 0;
    unsigned precision_tag = 0;

    Complex phi_k(long k) const;  // throws TruncationExceeded past +-M
    Complex w_k(long k) const;
};

THSystem make_system(const SymbolPair& sp, const FourierConfig& fc);
THSystem make_system(const SymbolPair& sp, const FourierConfig& fc, int r, int s);
THSystem with_offsets(const THSystem& sys, int r, int s);

struct OrthoPoly {
    int degree = 0;
    std::vector<Complex> coeffs;  // a_0..a_{n-1}; a_n = 1 implicit
    Complex h;
    Complex operator()(const Complex& z) const;
};

Matrix build_matrix(const THSystem& sys, int n);
Complex det_th(const THSystem& sys, int n);
Complex norm_h(const THSystem& sys, int n);
OrthoPoly orthopoly(const THSystem& sys, int n);
// |sum_j a_j (phi_{k-j+r} + w_{k+j+s}) - h delta_{nk}|
Real orthogonality_residual(const THSystem& sys, const OrthoPoly& p, int k);
// sum_j |a_j| |phi_{k-j+r} + w_{k+j+s}|, the scale a residual is measured against
Real orthogonality_scale(const THSystem& sys, const OrthoPoly& p, int k);

}  // namespace th
