#include "th/determinants.hpp"

namespace th {

namespace {

Complex checked(const LaurentSeries& s, long k, const char* what) {
    if (k < -s.order() || k > s.order())
        throw Error(ErrorKind::TruncationExceeded,
                    std::string(what) + " index " + std::to_string(k) + " beyond M=" + std::to_string(s.order()));
    return s[k];
}

// Largest coefficient magnitude of the pair; a matrix made only of quadrature noise stays small against it.
Real symbol_scale(const THSystem& sys) {
    Real s = 0;
    for (long k = -sys.phi.order(); k <= sys.phi.order(); ++k) s = std::max(s, abs(sys.phi[k]));
    for (long k = -sys.w.order(); k <= sys.w.order(); ++k) s = std::max(s, abs(sys.w[k]));
    return s > 0 ? s : Real(1);
}

}  // namespace

Complex THSystem::phi_k(long k) const { return checked(phi, k, "phi"); }
Complex THSystem::w_k(long k) const { return checked(w, k, "w"); }

THSystem make_system(const SymbolPair& sp, const FourierConfig& fc) { return make_system(sp, fc, sp.r, sp.s); }

THSystem make_system(const SymbolPair& sp, const FourierConfig& fc, int r, int s) {
    THSystem sys;
    sys.phi = fourier_coeffs(sp.phi, fc.M, fc.N);
    if (sp.hankel_extra) {
        sys.w = fourier_coeffs(sp.w_base, fc.M, fc.N);
        for (long k = -fc.M; k <= fc.M; ++k) sys.w.set(k, sys.w[k] + sp.hankel_extra(k));
    } else {
        sys.w = fourier_coeffs(sp.w, fc.M, fc.N);
    }
    sys.r = r;
    sys.s = s;
    sys.precision_tag = precision();
    return sys;
}

THSystem with_offsets(const THSystem& sys, int r, int s) {
    THSystem out = sys;
    out.r = r;
    out.s = s;
    return out;
}

Complex OrthoPoly::operator()(const Complex& z) const {
    Complex acc(1);
    for (int j = degree - 1; j >= 0; --j) acc = acc * z + coeffs[static_cast<std::size_t>(j)];
    return acc;
}

Matrix build_matrix(const THSystem& sys, int n) {
    if (n < 1) throw Error(ErrorKind::InvalidParams, "matrix size must be positive");
    Matrix m(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) m(j, k) = sys.phi_k(j - k + sys.r) + sys.w_k(j + k + sys.s);
    return m;
}

Complex det_th(const THSystem& sys, int n) {
    if (n == 0) return Complex(1);
    return det_lu(build_matrix(sys, n));
}

namespace {

void require_nonsingular(const Complex& d, const THSystem& sys, int n) {
    Real bound = eps_digits(static_cast<int>(precision()) - 10) * boost::multiprecision::pow(symbol_scale(sys), n);
    if (!(abs(d) > bound)) throw Error(ErrorKind::SingularDn, "D_" + std::to_string(n) + " vanishes numerically");
}

}  // namespace

Complex norm_h(const THSystem& sys, int n) {
    if (n == 0) return det_th(sys, 1);
    Matrix m = build_matrix(sys, n);
    Complex dn = det_lu(m);
    require_nonsingular(dn, sys, n);
    return det_th(sys, n + 1) / dn;
}

OrthoPoly orthopoly(const THSystem& sys, int n) {
    OrthoPoly p;
    p.degree = n;
    auto entry = [&](int k, int j) { return sys.phi_k(k - j + sys.r) + sys.w_k(k + j + sys.s); };
    if (n > 0) {
        Matrix m = build_matrix(sys, n);
        require_nonsingular(det_lu(m), sys, n);
        std::vector<Complex> rhs(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) rhs[static_cast<std::size_t>(k)] = -entry(k, n);
        p.coeffs = solve_linear(m, rhs);
    }
    Complex h = entry(n, n);
    for (int j = 0; j < n; ++j) h += p.coeffs[static_cast<std::size_t>(j)] * entry(n, j);
    p.h = h;
    if (n > 0) {
        Complex ratio = norm_h(sys, n);
        Real tol = eps_digits(static_cast<int>(precision()) - 15);
        if (abs(ratio - h) > tol * abs(ratio))
            throw Error(ErrorKind::Inconsistent, "orthogonality norm disagrees with D_{n+1}/D_n");
    }
    return p;
}

Real orthogonality_residual(const THSystem& sys, const OrthoPoly& p, int k) {
    const int n = p.degree;
    Complex s = sys.phi_k(k - n + sys.r) + sys.w_k(k + n + sys.s);
    for (int j = 0; j < n; ++j)
        s += p.coeffs[static_cast<std::size_t>(j)] * (sys.phi_k(k - j + sys.r) + sys.w_k(k + j + sys.s));
    if (k == n) s -= p.h;
    return abs(s);
}

Real orthogonality_scale(const THSystem& sys, const OrthoPoly& p, int k) {
    const int n = p.degree;
    Real m = abs(sys.phi_k(k - n + sys.r) + sys.w_k(k + n + sys.s));
    for (int j = 0; j < n; ++j)
        m += abs(p.coeffs[static_cast<std::size_t>(j)]) * abs(sys.phi_k(k - j + sys.r) + sys.w_k(k + j + sys.s));
    return m > 0 ? m : Real(1);
}

}  // namespace th
