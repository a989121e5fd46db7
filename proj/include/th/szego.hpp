#pragma once

#include "th/fourier.hpp"
#include "th/numerics.hpp"
#include "th/symbols.hpp"

namespace th {

struct SzegoData {
    LaurentSeries ln;  // Laurent coefficients of the continuous log on the circle
    Complex alpha0;    // exp(c_0)

    Complex interior(const Complex& z) const;  // exp(sum_{k>=0} c_k z^k)
    Complex exterior(const Complex& z) const;  // exp(-sum_{k>=1} c_{-k} z^{-k})
};

SzegoData szego_split(const AnnulusFunction& f, const FourierConfig& fc);

// Laurent coefficients of rho(t) = 1 / (beta_out beta_in alpha_in(1/t) alpha_in(t)).
struct RhoKernel {
    LaurentSeries coeffs;

    Complex c_in(const Complex& z) const;   // -sum_{k>=0} rho_k z^k
    Complex c_out(const Complex& z) const;  // sum_{k>=1} rho_{-k} z^{-k}
    Complex c0() const { return -coeffs[0]; }
    Complex operator()(const Complex& z) const;  // branch by |z|, OnCircle on |z| = 1
};

RhoKernel make_rho(const SzegoData& alpha, const SzegoData& beta, const FourierConfig& fc);
Complex c_rho(const SzegoData& alpha, const SzegoData& beta, const Complex& z, const FourierConfig& fc = {});

// Which boundary value of alpha(1/z) each side of the circle uses.
enum class TildeConvention { standard, swapped };

class Model {
public:
    Model(const SymbolPair& sp, const FourierConfig& fc);

    const AnnulusFunction& phi() const { return phi_; }
    const AnnulusFunction& d() const { return d_; }
    const AnnulusFunction& w() const { return w_; }
    const SzegoData& alpha() const { return alpha_; }
    const SzegoData& beta() const { return beta_; }
    const RhoKernel& rho() const { return rho_; }
    const Complex& alpha0() const { return alpha_.alpha0; }
    Complex c0() const { return rho_.c0(); }
    Real r_inner() const;
    Real r_outer() const;
    const FourierConfig& fourier() const { return fc_; }

    // Branch formulas; no check on |z|, so they also give boundary values on the circle.
    Matrix lambda_inner(const Complex& z, TildeConvention tc = TildeConvention::standard) const;
    Matrix lambda_outer(const Complex& z, TildeConvention tc = TildeConvention::standard) const;
    Matrix jump(const Complex& tau) const;

private:
    AnnulusFunction phi_, d_, w_;
    FourierConfig fc_;
    SzegoData alpha_, beta_;
    RhoKernel rho_;
};

// max_j |d(t_j) d(1/t_j) - 1|
Real factorization_defect(const AnnulusFunction& d, std::size_t nodes = 256);

Matrix lambda_model(const Model& m, const Complex& z);
Real lambda_jump_residual(const Model& m, const Complex& tau, TildeConvention tc = TildeConvention::standard);
// max over nodes of |alpha_in - alpha_out * f| / |alpha_in|
Real plemelj_residual(const SzegoData& s, const AnnulusFunction& f, std::size_t nodes);

}  // namespace th
