#pragma once

#include <doctest.h>

#include "th/fourier.hpp"
#include "th/numerics.hpp"
#include "th/symbols.hpp"

namespace tst {

using th::Complex;
using th::Real;

inline Real tol(int d) { return th::eps_digits(static_cast<int>(th::precision()) - d); }

// Enough terms that the Ising q = 0.5 tails sit far below 1e-(P-20) at P = 60.
inline th::FourierConfig ising_fc() { return {96, 512}; }
inline th::FourierConfig small_fc() { return {48, 256}; }

inline th::IsingParams critical(const char* q = "0.5") {
    Real qq(q);
    return th::IsingParams::make(qq, qq * qq);
}

inline bool close(const Complex& a, const Complex& b, const Real& t) { return th::abs(a - b) <= t; }

// Restores the working precision when a test changes it.
struct PrecisionGuard {
    unsigned saved = th::precision();
    ~PrecisionGuard() { th::set_precision(saved); }
};

}  // namespace tst
