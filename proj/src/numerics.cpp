#include "th/numerics.hpp"

#include <sstream>

namespace th {

const char* kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::NonSquare: return "NonSquare";
        case ErrorKind::Singular: return "Singular";
        case ErrorKind::OutsideAnnulus: return "OutsideAnnulus";
        case ErrorKind::PhaseUnresolved: return "PhaseUnresolved";
        case ErrorKind::ZeroOnCircle: return "ZeroOnCircle";
        case ErrorKind::NonzeroWinding: return "NonzeroWinding";
        case ErrorKind::InvalidParams: return "InvalidParams";
        case ErrorKind::NodeCountTooSmall: return "NodeCountTooSmall";
        case ErrorKind::TruncationExceeded: return "TruncationExceeded";
        case ErrorKind::SingularDn: return "SingularDn";
        case ErrorKind::OnCircle: return "OnCircle";
        case ErrorKind::ModelNotFactorizable: return "ModelNotFactorizable";
        case ErrorKind::DegeneratePredictor: return "DegeneratePredictor";
        case ErrorKind::GenericityFailed: return "GenericityFailed";
        case ErrorKind::GenericConditionFailed: return "GenericConditionFailed";
        case ErrorKind::MissingData: return "MissingData";
        case ErrorKind::Config: return "Config";
        case ErrorKind::Parse: return "Parse";
        case ErrorKind::Inconsistent: return "Inconsistent";
    }
    return "Unknown";
}

namespace {
unsigned g_digits = 120;
}

void set_precision(unsigned digits) {
    g_digits = digits;
    Real::default_precision(digits);
}

unsigned precision() { return g_digits; }

Real eps_digits(int d) { return boost::multiprecision::pow(Real(10), -d); }

Real pi() {
    Real p;
    mpfr_const_pi(p.backend().data(), MPFR_RNDN);
    return p;
}

Complex& Complex::operator*=(const Complex& o) {
    Real r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = r;
    return *this;
}

Complex& Complex::operator/=(const Complex& o) {
    *this = *this / o;
    return *this;
}

Complex operator+(const Complex& a, const Complex& b) { return Complex(a.re + b.re, a.im + b.im); }
Complex operator-(const Complex& a, const Complex& b) { return Complex(a.re - b.re, a.im - b.im); }
Complex operator-(const Complex& a) { return Complex(-a.re, -a.im); }
Complex operator*(const Complex& a, const Complex& b) {
    return Complex(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
}
Complex operator*(const Complex& a, const Real& b) { return Complex(a.re * b, a.im * b); }
Complex operator*(const Real& a, const Complex& b) { return Complex(a * b.re, a * b.im); }
Complex operator/(const Complex& a, const Real& b) { return Complex(a.re / b, a.im / b); }

Complex operator/(const Complex& a, const Complex& b) {
    // Smith's scaling keeps intermediate magnitudes bounded
    using boost::multiprecision::abs;
    if (abs(b.re) >= abs(b.im)) {
        if (b.re == 0) throw Error(ErrorKind::Singular, "complex division by zero");
        Real r = b.im / b.re;
        Real den = b.re + b.im * r;
        return Complex((a.re + a.im * r) / den, (a.im - a.re * r) / den);
    }
    Real r = b.re / b.im;
    Real den = b.re * r + b.im;
    return Complex((a.re * r + a.im) / den, (a.im * r - a.re) / den);
}

Real norm(const Complex& a) { return a.re * a.re + a.im * a.im; }
Real abs(const Complex& a) { return boost::multiprecision::hypot(a.re, a.im); }
Real arg(const Complex& a) { return boost::multiprecision::atan2(a.im, a.re); }
Complex conj(const Complex& a) { return Complex(a.re, -a.im); }

Complex exp(const Complex& a) {
    Real m = boost::multiprecision::exp(a.re);
    return Complex(m * boost::multiprecision::cos(a.im), m * boost::multiprecision::sin(a.im));
}

Complex log(const Complex& a) {
    if (a.re == 0 && a.im == 0) throw Error(ErrorKind::Singular, "log of zero");
    return Complex(boost::multiprecision::log(abs(a)), arg(a));
}

Complex sqrt(const Complex& a) {
    if (a.re == 0 && a.im == 0) return Complex();
    Real m = abs(a);
    Real t = boost::multiprecision::sqrt((m + boost::multiprecision::abs(a.re)) / 2);
    if (a.re >= 0) return Complex(t, a.im / (2 * t));
    Real im = a.im >= 0 ? t : Real(-t);
    return Complex(boost::multiprecision::abs(a.im) / (2 * t), im);
}

Complex pow(const Complex& a, long k) {
    if (k < 0) return Complex(1) / pow(a, -k);
    Complex r(1), b = a;
    while (k) {
        if (k & 1) r *= b;
        k >>= 1;
        if (k) b *= b;
    }
    return r;
}

Complex pow(const Complex& a, const Complex& b) {
    if (b.im == 0 && boost::multiprecision::floor(b.re) == b.re && boost::multiprecision::abs(b.re) < 1e6) {
        return pow(a, static_cast<long>(b.re));
    }
    return exp(b * log(a));
}

Complex sin(const Complex& a) {
    return Complex(boost::multiprecision::sin(a.re) * boost::multiprecision::cosh(a.im),
                   boost::multiprecision::cos(a.re) * boost::multiprecision::sinh(a.im));
}

Complex cos(const Complex& a) {
    return Complex(boost::multiprecision::cos(a.re) * boost::multiprecision::cosh(a.im),
                   -boost::multiprecision::sin(a.re) * boost::multiprecision::sinh(a.im));
}

Complex polar(const Real& r, const Real& theta) {
    return Complex(r * boost::multiprecision::cos(theta), r * boost::multiprecision::sin(theta));
}

Complex I() { return Complex(Real(0), Real(1)); }

namespace {
Complex psum(const std::vector<Complex>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
        Complex s;
        for (std::size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    return psum(v, lo, mid) + psum(v, mid, hi);
}
}  // namespace

Complex pairwise_sum(const std::vector<Complex>& v) { return psum(v, 0, v.size()); }

std::string to_string(const Real& x) {
    return x.str(static_cast<std::streamsize>(g_digits), std::ios_base::scientific);
}

Real parse_real(const std::string& s) {
    try {
        return Real(s);
    } catch (const std::exception&) {
        throw Error(ErrorKind::Parse, "not a number: '" + s + "'");
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Complex(1);
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw Error(ErrorKind::NonSquare, "shape mismatch in product");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            Complex s;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

Real max_abs(const Matrix& a) {
    Real m = 0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            Real v = abs(a(i, j));
            if (v > m) m = v;
        }
    return m;
}

namespace {

// In-place LU with partial pivoting. Returns false if a pivot column is all zero.
// Ties in pivot modulus go to the lowest row index.
bool lu_inplace(Matrix& m, std::vector<std::size_t>& perm, int& sign) {
    const std::size_t n = m.rows();
    perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    sign = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        Real best = norm(m(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            Real v = norm(m(i, k));
            if (v > best) { best = v; p = i; }
        }
        if (best == 0) return false;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
            std::swap(perm[k], perm[p]);
            sign = -sign;
        }
        const Complex piv = m(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            if (m(i, k).re == 0 && m(i, k).im == 0) continue;
            Complex f = m(i, k) / piv;
            m(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return true;
}

}  // namespace

Complex det_lu(const Matrix& a) {
    if (a.rows() != a.cols()) throw Error(ErrorKind::NonSquare, "det_lu needs a square matrix");
    if (a.rows() == 0) return Complex(1);
    Matrix m = a;
    std::vector<std::size_t> perm;
    int sign = 1;
    if (!lu_inplace(m, perm, sign)) return Complex(0);
    Complex d(sign);
    for (std::size_t i = 0; i < m.rows(); ++i) d *= m(i, i);
    return d;
}

std::vector<Complex> solve_linear(const Matrix& a, const std::vector<Complex>& b) {
    if (a.rows() != a.cols()) throw Error(ErrorKind::NonSquare, "solve_linear needs a square matrix");
    if (b.size() != a.rows()) throw Error(ErrorKind::NonSquare, "rhs length mismatch");
    const std::size_t n = a.rows();
    std::vector<Real> rowscale(n, Real(0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Real v = abs(a(i, j));
            if (v > rowscale[i]) rowscale[i] = v;
        }
    Matrix m = a;
    std::vector<std::size_t> perm;
    int sign = 1;
    if (!lu_inplace(m, perm, sign)) throw Error(ErrorKind::Singular, "zero pivot column");
    const Real tol = eps_digits(static_cast<int>(precision()) - 5);
    for (std::size_t i = 0; i < n; ++i) {
        if (abs(m(i, i)) < tol * rowscale[perm[i]])
            throw Error(ErrorKind::Singular, "pivot " + std::to_string(i) + " below threshold");
    }
    std::vector<Complex> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex s = b[perm[i]];
        for (std::size_t j = 0; j < i; ++j) s -= m(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        Complex s = x[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
        x[i] = s / m(i, i);
    }
    return x;
}

Matrix inverse(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<Complex> e(n);
        e[j] = Complex(1);
        auto x = solve_linear(a, e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = x[i];
    }
    return inv;
}

Real SeededRng::uniform() {
    // 53 random bits mapped to [-1, 1)
    std::uint64_t v = g_() >> 11;
    return Real(static_cast<double>(v) / 9007199254740992.0) * 2 - 1;
}

Matrix SeededRng::matrix(std::size_t r, std::size_t c) {
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = complex_uniform();
    return m;
}

}  // namespace th
