#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "th/numerics.hpp"

namespace th {

using EvalFn = std::function<Complex(const Complex&)>;

// Analytic function on r_i < |z| < r_o.
class AnnulusFunction {
public:
    AnnulusFunction() = default;
    AnnulusFunction(EvalFn f, Real r_i, Real r_o, std::string name = "");

    Complex operator()(const Complex& z) const;  // throws OutsideAnnulus
    Complex eval_unchecked(const Complex& z) const { return f_(z); }

    const Real& r_inner() const { return r_i_; }
    const Real& r_outer() const { return r_o_; }
    const std::string& name() const { return name_; }
    bool contains(const Complex& z) const;

    std::optional<int> winding() const { return winding_; }
    // Computes and stores the winding number; returns it.
    int cache_winding(std::size_t nodes = 256);

private:
    EvalFn f_;
    Real r_i_ = 0, r_o_ = 0;
    std::string name_;
    std::optional<int> winding_;
};

Complex eval(const AnnulusFunction& f, const Complex& z);

AnnulusFunction constant(const Complex& c, Real r_i = Real(0), Real r_o = Real(1e30));
AnnulusFunction monomial(long k, Real r_i = Real(0), Real r_o = Real(1e30));
AnnulusFunction tilde(const AnnulusFunction& f);
AnnulusFunction product(const AnnulusFunction& a, const AnnulusFunction& b);

// Unit-circle nodes e^{2 pi i j / N}.
std::vector<Complex> circle_nodes(std::size_t n);
Real min_modulus_on_circle(const AnnulusFunction& f, std::size_t nodes = 256);

int winding_number(const AnnulusFunction& f, std::size_t nodes = 256);
std::vector<Complex> log_on_circle(const AnnulusFunction& f, std::size_t nodes);

enum class IsingCase { AboveOne, Critical, Zero, BelowOne };
const char* case_name(IsingCase c);

struct IsingParams {
    Real q;
    Real r_param;

    static IsingParams make(const Real& q, const Real& r_param);  // validates
    bool r_is_zero() const;
    Real a() const;  // q^2 / r, only when r != 0
    IsingCase which() const;
    Real c_q() const;  // only for a < 1
};

// Symbol pair for D_n[phi, w; r, s]. When d is present, w = d * phi.
// When hankel_extra is set, w_k = (w_base)_k + hankel_extra(k); it carries
// the gamma series exactly instead of through quadrature.
struct SymbolPair {
    std::string name;
    AnnulusFunction phi;
    AnnulusFunction w;
    std::optional<AnnulusFunction> d;
    std::function<Complex(long)> hankel_extra;
    AnnulusFunction w_base;
    int r = 0, s = 0;
};

AnnulusFunction ising_phi(const Real& q, const Real& r_i, const Real& r_o);
AnnulusFunction ising_d(const IsingParams& p, const Real& r_i, const Real& r_o);

struct IsingAnnulus {
    Real r_i, r_o;
};
IsingAnnulus ising_default_annulus(const IsingParams& p);

SymbolPair ising_symbols(const IsingParams& p, std::optional<IsingAnnulus> annulus = std::nullopt);

// Expression strings over z: + - * / ^, exp log sqrt sin cos, i, pi, e.
class Expr;
class ParsedExpr {
public:
    explicit ParsedExpr(const std::string& src);
    Complex operator()(const Complex& z) const;
    const std::string& source() const { return src_; }

private:
    std::string src_;
    std::shared_ptr<const Expr> root_;
};

AnnulusFunction expression_symbol(const std::string& src, const Real& r_i, const Real& r_o);

// Built-in families: trivial, exp, generic.
SymbolPair builtin_pair(const std::string& name, int r, int s);
std::vector<std::string> builtin_names();

}  // namespace th
