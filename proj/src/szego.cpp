#include "th/szego.hpp"

namespace th {

Complex SzegoData::interior(const Complex& z) const { return exp(ln.eval_nonneg(z)); }
Complex SzegoData::exterior(const Complex& z) const { return exp(-ln.eval_neg(z)); }

SzegoData szego_split(const AnnulusFunction& f, const FourierConfig& fc) {
    auto logs = log_on_circle(f, fc.N);
    SzegoData s;
    s.ln = series_from_samples(logs, fc.M, f.r_inner(), f.r_outer());
    s.alpha0 = exp(s.ln[0]);
    return s;
}

Complex RhoKernel::c_in(const Complex& z) const { return -coeffs.eval_nonneg(z); }
Complex RhoKernel::c_out(const Complex& z) const { return coeffs.eval_neg(z); }

Complex RhoKernel::operator()(const Complex& z) const {
    Real m = abs(z);
    if (m == 1) throw Error(ErrorKind::OnCircle, "C_rho is not defined on |z| = 1");
    return m < 1 ? c_in(z) : c_out(z);
}

RhoKernel make_rho(const SzegoData& alpha, const SzegoData& beta, const FourierConfig& fc) {
    RootTable roots(fc.N);
    std::vector<Complex> samples(fc.N);
    for (std::size_t j = 0; j < fc.N; ++j) {
        const Complex& t = roots[j];
        Complex tinv = conj(t);
        samples[j] = Complex(1) / (beta.exterior(t) * beta.interior(t) * alpha.interior(tinv) * alpha.interior(t));
    }
    RhoKernel k;
    k.coeffs = series_from_samples(samples, fc.M, Real(0), Real(1e30));
    return k;
}

Complex c_rho(const SzegoData& alpha, const SzegoData& beta, const Complex& z, const FourierConfig& fc) {
    return make_rho(alpha, beta, fc)(z);
}

Real factorization_defect(const AnnulusFunction& d, std::size_t nodes) {
    Real m = 0;
    for (const auto& t : circle_nodes(nodes)) {
        Real v = abs(d(t) * d(conj(t)) - Complex(1));
        if (v > m) m = v;
    }
    return m;
}

Model::Model(const SymbolPair& sp, const FourierConfig& fc) : phi_(sp.phi), w_(sp.w), fc_(fc) {
    if (!sp.d) throw Error(ErrorKind::ModelNotFactorizable, "pair has no multiplier d with w = d phi");
    d_ = *sp.d;
    Real defect = factorization_defect(d_, 256);
    if (defect > eps_digits(static_cast<int>(precision()) - 20))
        throw Error(ErrorKind::ModelNotFactorizable, "d(z) d(1/z) = 1 fails, defect " + defect.str(6));
    alpha_ = szego_split(phi_, fc);
    beta_ = szego_split(d_, fc);
    rho_ = make_rho(alpha_, beta_, fc);
}

Real Model::r_inner() const {
    Real a = phi_.r_inner(), b = d_.r_inner();
    return a > b ? a : b;
}

Real Model::r_outer() const {
    Real a = phi_.r_outer(), b = d_.r_outer();
    return a < b ? a : b;
}

namespace {

Matrix lambda_inf_inverse(const Complex& a0) {
    Matrix m(4, 4);
    m(0, 3) = Complex(1);
    m(1, 0) = Complex(1);
    m(2, 2) = Complex(1) / a0;
    m(3, 1) = a0;
    return m;
}

Matrix lower_c(const Complex& c) {
    Matrix m = Matrix::identity(4);
    m(1, 0) = c;
    return m;
}

}  // namespace

Matrix Model::lambda_inner(const Complex& z, TildeConvention tc) const {
    Complex zi = Complex(1) / z;
    Complex al = alpha_.interior(z);
    Complex alt = tc == TildeConvention::standard ? alpha_.exterior(zi) : alpha_.interior(zi);
    Complex be = beta_.interior(z);
    Matrix b(4, 4);
    b(0, 0) = -be;
    b(1, 2) = Complex(1) / (alt * be * al);
    b(2, 1) = -alt;
    b(3, 3) = -al;
    return lambda_inf_inverse(alpha0()) * lower_c(rho_.c_in(z)) * b;
}

Matrix Model::lambda_outer(const Complex& z, TildeConvention tc) const {
    Complex zi = Complex(1) / z;
    Complex al = alpha_.exterior(z);
    Complex alt = tc == TildeConvention::standard ? alpha_.interior(zi) : alpha_.exterior(zi);
    Complex be = beta_.exterior(z);
    Matrix b(4, 4);
    b(0, 1) = be;
    b(1, 3) = Complex(1) / (be * alt * al);
    b(2, 2) = alt;
    b(3, 0) = al;
    return lambda_inf_inverse(alpha0()) * lower_c(rho_.c_out(z)) * b;
}

Matrix Model::jump(const Complex& tau) const {
    Complex ti = Complex(1) / tau;
    Complex ph = phi_(tau), pt = phi_(ti), ww = w_(tau), wt = w_(ti);
    Matrix j(4, 4);
    j(0, 3) = -ph;
    j(1, 0) = -ww / ph;
    j(1, 2) = pt - ww * wt / ph;
    j(2, 1) = -Complex(1) / pt;
    j(3, 0) = Complex(1) / ph;
    j(3, 2) = wt / ph;
    return j;
}

Matrix lambda_model(const Model& m, const Complex& z) {
    Real r = abs(z);
    if (r == 1) throw Error(ErrorKind::OnCircle, "Lambda is evaluated off the unit circle only");
    return r < 1 ? m.lambda_inner(z) : m.lambda_outer(z);
}

Real lambda_jump_residual(const Model& m, const Complex& tau, TildeConvention tc) {
    return max_abs(m.lambda_inner(tau, tc) - m.lambda_outer(tau, tc) * m.jump(tau));
}

Real plemelj_residual(const SzegoData& s, const AnnulusFunction& f, std::size_t nodes) {
    Real m = 0;
    for (const auto& t : circle_nodes(nodes)) {
        Complex in = s.interior(t);
        Real v = abs(in - s.exterior(t) * f(t)) / abs(in);
        if (v > m) m = v;
    }
    return m;
}

}  // namespace th
