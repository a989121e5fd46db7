#pragma once

#include <vector>

#include "th/numerics.hpp"
#include "th/symbols.hpp"

namespace th {

struct FourierConfig {
    long M = 128;         // truncation order
    std::size_t N = 1024;  // quadrature nodes
};

// c_k for k in [-M, M], valid on valid_r_i < |z| < valid_r_o.
class LaurentSeries {
public:
    LaurentSeries() = default;
    LaurentSeries(long M, Real r_i, Real r_o);

    long order() const { return M_; }
    const Real& valid_r_i() const { return r_i_; }
    const Real& valid_r_o() const { return r_o_; }

    // zero outside [-M, M]
    Complex operator[](long k) const;
    void set(long k, const Complex& v);

    Complex eval(const Complex& z) const;      // full sum, checks annulus
    Complex eval_nonneg(const Complex& z) const;  // sum over k >= 0, no annulus check
    Complex eval_neg(const Complex& z) const;     // sum over k < 0, no annulus check

    LaurentSeries reflected() const;  // c_k -> c_{-k}

private:
    long M_ = 0;
    Real r_i_ = 0, r_o_ = 0;
    std::vector<Complex> c_;
};

// e^{2 pi i k / N}, k = 0..N-1
class RootTable {
public:
    explicit RootTable(std::size_t n);
    std::size_t size() const { return w_.size(); }
    // e^{2 pi i j k / N} with the product reduced mod N
    const Complex& power(long j, long k) const;
    const Complex& operator[](std::size_t j) const { return w_[j]; }

private:
    std::vector<Complex> w_;
};

LaurentSeries series_from_samples(const std::vector<Complex>& samples, long M, const Real& r_i, const Real& r_o);
LaurentSeries fourier_coeffs(const AnnulusFunction& f, long M, std::size_t N);
Complex eval_series(const LaurentSeries& s, const Complex& z);

// (1/N) sum_j f(rho w_j) (rho w_j)^{-k}
Complex contour_coefficient(const AnnulusFunction& f, long k, const Real& radius, std::size_t N);
// Same sum over precomputed samples f(rho w_j).
Complex contour_coefficient_samples(const std::vector<Complex>& samples, const RootTable& roots, long k,
                                    const Real& radius);

}  // namespace th
