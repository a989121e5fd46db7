#pragma once

#include <array>
#include <string>
#include <vector>

#include "th/determinants.hpp"
#include "th/fourier.hpp"
#include "th/numerics.hpp"
#include "th/szego.hpp"

namespace th {

enum class KernelId { g12, g14, g21, g23, g32, g34, g41, g43 };
enum class Side { inner, outer };
enum class KernelForm { corrected, legacy };

const char* kernel_name(KernelId k);
Side kernel_side(KernelId k);
constexpr std::array<KernelId, 8> all_kernels{KernelId::g12, KernelId::g14, KernelId::g21, KernelId::g23,
                                              KernelId::g32, KernelId::g34, KernelId::g41, KernelId::g43};

struct KernelOptions {
    KernelForm form = KernelForm::corrected;
    bool flip_g23 = false;  // fault injection for the check suite
};

// Inner kernels (g12, g14, g23, g43) live on r0 < |z| < 1, outer ones on 1 < |z| < 1/r0.
class GKernelSet {
public:
    explicit GKernelSet(const Model& m, KernelOptions opt = {});

    Complex operator()(KernelId k, const Complex& z) const;
    // g12, g14, g23, g43 at one inner point
    std::array<Complex, 4> inner_all(const Complex& mu) const;
    // g21, g32, g34, g41 at one outer point
    std::array<Complex, 4> outer_all(const Complex& nu) const;
    AnnulusFunction function(KernelId k) const;

    const Model& model() const { return *m_; }
    Real r0() const;
    const KernelOptions& options() const { return opt_; }

private:
    const Model* m_;
    KernelOptions opt_;
};

struct ContourConfig {
    Real r_star;
    std::size_t nodes = 1024;
};

Real admissible_r0(const Model& m);
Real default_r_star(const Model& m);  // sqrt(r0)
void validate_contour(const Model& m, const ContourConfig& cfg);

// Contour integral of one kernel: inner uses |mu| = r_*, outer |mu| = 1/r_*.
Complex r1jk_zero(const AnnulusFunction& g, long n, Side side, const ContourConfig& cfg);

// Samples every kernel once on its circle and serves R_{1,jk}(0; n).
class KernelIntegrals {
public:
    KernelIntegrals(const GKernelSet& g, const ContourConfig& cfg);

    Complex R(KernelId k, long n) const;
    const Complex& alpha0() const { return alpha0_; }
    const Complex& c0() const { return c0_; }
    const ContourConfig& contour() const { return cfg_; }
    KernelForm form() const { return form_; }

private:
    ContourConfig cfg_;
    RootTable roots_;
    std::array<std::vector<Complex>, 8> samples_;
    Complex alpha0_, c0_;
    KernelForm form_;
};

Complex energy_cal(const KernelIntegrals& ki, long n);
Complex predict_h11(const KernelIntegrals& ki, long n);

struct Monitors {
    std::array<Real, 4> m{};
    Real threshold;
    int first_failed() const;  // 0 if all pass, else 1..4
};

Monitors genericity_monitors(const KernelIntegrals& ki, long n, const Real& threshold);

struct H01Options {
    Real threshold = Real("1e-30");
    bool bypass_monitors = false;
};

Complex predict_h01(const KernelIntegrals& ki, long n, const H01Options& opt = {});

// ---- RHP data and the offset-reduction formulas ----

class MaskedMatrix {
public:
    explicit MaskedMatrix(std::string name = "") : name_(std::move(name)), m_(4, 4) { mask_.fill(false); }

    void set(int i, int j, const Complex& v);  // 1-based
    bool has(int i, int j) const { return mask_[static_cast<std::size_t>((i - 1) * 4 + (j - 1))]; }
    const Complex& at(int i, int j) const;  // throws MissingData
    void fill(const Matrix& m);
    bool full() const;
    Matrix matrix() const;  // throws MissingData unless full
    const std::string& name() const { return name_; }

private:
    std::string name_;
    Matrix m_;
    std::array<bool, 16> mask_{};
};

struct RHPData {
    MaskedMatrix P{"P"}, X1inf{"X1inf"}, X2inf{"X2inf"}, X1circ{"X1circ"};
};

const Matrix& w_perm();

// Exact data from the linear algebra of the Toeplitz+Hankel system at offsets (r,s).
RHPData exact_rhp(const THSystem& sys, int n);

RHPData p_asymptotic(const KernelIntegrals& ki, long n);

Real wsym_residual(const AnnulusFunction& phi, const AnnulusFunction& w, int r, int s, const Complex& z);

struct Offset01Result {
    Matrix U1inf{4, 4};  // columns 1 and 3 populated
    Complex den;         // P11 P33 - P13 P31
};
Offset01Result solve_offset01(const RHPData& d);
Real offset01_residual(const RHPData& d, const Offset01Result& u);

struct Offset00Result {
    std::array<Complex, 4> Yhat_j4;
    std::array<Complex, 4> Y1inf_j3;
    Complex generic_den;      // P33^2 - X1inf_34 X1circ_43
    Complex delta_offset00;   // numerator of Yhat_34
    Complex lambda_offset00;  // numerator of Y1inf_33
};
Offset00Result solve_offset00(const RHPData& d);
Real offset00_residual(const RHPData& d, const Offset00Result& y);

struct Offset02Result {
    // row j holds (T2_{j1}, T1_{j1}, T1_{j3}, T1_{j4})
    std::array<std::array<Complex, 4>, 4> T;
    Matrix system{4, 4};
    std::array<std::array<Complex, 4>, 4> rhs;
    Complex delta_offset02;
};
Offset02Result solve_offset02(const RHPData& d);
// Solves the shared system for arbitrary right-hand sides through the closed forms.
std::array<Complex, 4> offset02_closed_form(const RHPData& d, const std::array<Complex, 4>& rhs);
Real offset02_residual(const Offset02Result& t);
Real offset02_lu_discrepancy(const Offset02Result& t);

// D^{rs}_{jk} = P_jk P_rs - P_js P_rk
Complex minor_d(const MaskedMatrix& P, int r, int s, int j, int k);

struct H01Exact {
    Complex h;
    Complex minus_inv_h;
    Complex E;
};
H01Exact exact_h01_from_data(const RHPData& d);

}  // namespace th
