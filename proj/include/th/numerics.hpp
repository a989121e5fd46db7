#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "th/error.hpp"

namespace th {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

// Working precision in decimal digits. Set once per run before any Real is built.
void set_precision(unsigned digits);
unsigned precision();
Real eps_digits(int d);  // 10^{-d}
Real pi();

struct Complex {
    Real re, im;

    Complex() : re(0), im(0) {}
    Complex(const Real& r) : re(r), im(0) {}  // NOLINT
    Complex(const Real& r, const Real& i) : re(r), im(i) {}
    Complex(int r) : re(r), im(0) {}     // NOLINT
    Complex(double r) : re(r), im(0) {}  // NOLINT

    Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
    Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
    Complex& operator*=(const Complex& o);
    Complex& operator/=(const Complex& o);
};

Complex operator+(const Complex& a, const Complex& b);
Complex operator-(const Complex& a, const Complex& b);
Complex operator-(const Complex& a);
Complex operator*(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Real& b);
Complex operator*(const Real& a, const Complex& b);
Complex operator/(const Complex& a, const Complex& b);
Complex operator/(const Complex& a, const Real& b);

Real norm(const Complex& a);  // |a|^2
Real abs(const Complex& a);
Real arg(const Complex& a);
Complex conj(const Complex& a);
Complex exp(const Complex& a);
Complex log(const Complex& a);   // principal branch
Complex sqrt(const Complex& a);  // principal branch
Complex pow(const Complex& a, long k);
Complex pow(const Complex& a, const Complex& b);
Complex sin(const Complex& a);
Complex cos(const Complex& a);
Complex polar(const Real& r, const Real& theta);
Complex I();

// Pairwise summation in index order; deterministic.
Complex pairwise_sum(const std::vector<Complex>& v);

std::string to_string(const Real& x);  // full-precision scientific
Real parse_real(const std::string& s);

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows_(r), cols_(c), a_(r * c) {}
    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Complex& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    // 1-based access, used where formulas index entries as P_{jk}
    const Complex& at1(int i, int j) const { return (*this)(i - 1, j - 1); }

    Matrix transpose() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Complex> a_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Real max_abs(const Matrix& a);

Complex det_lu(const Matrix& m);
std::vector<Complex> solve_linear(const Matrix& a, const std::vector<Complex>& b);
Matrix inverse(const Matrix& a);

// Deterministic generator for seeded test data.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : g_(seed) {}
    Real uniform();  // [-1, 1)
    Complex complex_uniform() { Real r = uniform(); return Complex(r, uniform()); }
    Matrix matrix(std::size_t r, std::size_t c);

private:
    std::mt19937_64 g_;
};

}  // namespace th
