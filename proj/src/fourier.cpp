#include "th/fourier.hpp"

namespace th {

LaurentSeries::LaurentSeries(long M, Real r_i, Real r_o)
    : M_(M), r_i_(std::move(r_i)), r_o_(std::move(r_o)), c_(static_cast<std::size_t>(2 * M + 1)) {}

Complex LaurentSeries::operator[](long k) const {
    if (k < -M_ || k > M_) return Complex();
    return c_[static_cast<std::size_t>(k + M_)];
}

void LaurentSeries::set(long k, const Complex& v) {
    if (k < -M_ || k > M_) throw Error(ErrorKind::TruncationExceeded, "index " + std::to_string(k));
    c_[static_cast<std::size_t>(k + M_)] = v;
}

Complex LaurentSeries::eval_nonneg(const Complex& z) const {
    Complex s;
    for (long k = M_; k >= 0; --k) s = s * z + (*this)[k];
    return s;
}

Complex LaurentSeries::eval_neg(const Complex& z) const {
    Complex u = Complex(1) / z;
    Complex s;
    for (long k = M_; k >= 1; --k) s = (s + (*this)[-k]) * u;
    return s;
}

Complex LaurentSeries::eval(const Complex& z) const {
    Real m = abs(z);
    if (!(m > r_i_ && m < r_o_)) throw Error(ErrorKind::OutsideAnnulus, "series evaluated outside its annulus");
    return eval_nonneg(z) + eval_neg(z);
}

LaurentSeries LaurentSeries::reflected() const {
    Real ri = r_o_ > Real(1e29) ? Real(0) : Real(1 / r_o_);
    Real ro = r_i_ == 0 ? Real(1e30) : Real(1 / r_i_);
    LaurentSeries out(M_, ri, ro);
    for (long k = -M_; k <= M_; ++k) out.set(k, (*this)[-k]);
    return out;
}

RootTable::RootTable(std::size_t n) : w_(circle_nodes(n)) {}

const Complex& RootTable::power(long j, long k) const {
    const long n = static_cast<long>(w_.size());
    long e = (j % n) * (k % n) % n;
    if (e < 0) e += n;
    return w_[static_cast<std::size_t>(e)];
}

LaurentSeries series_from_samples(const std::vector<Complex>& samples, long M, const Real& r_i, const Real& r_o) {
    const std::size_t N = samples.size();
    if (N < static_cast<std::size_t>(4 * M) || (N & (N - 1)) != 0)
        throw Error(ErrorKind::NodeCountTooSmall,
                    "need N >= 4M and N a power of two (N=" + std::to_string(N) + ", M=" + std::to_string(M) + ")");
    RootTable roots(N);
    LaurentSeries s(M, r_i, r_o);
    std::vector<Complex> terms(N);
    for (long k = -M; k <= M; ++k) {
        for (std::size_t j = 0; j < N; ++j) terms[j] = samples[j] * roots.power(static_cast<long>(j), -k);
        s.set(k, pairwise_sum(terms) / Real(N));
    }
    return s;
}

LaurentSeries fourier_coeffs(const AnnulusFunction& f, long M, std::size_t N) {
    if (N < static_cast<std::size_t>(4 * M) || (N & (N - 1)) != 0)
        throw Error(ErrorKind::NodeCountTooSmall, "need N >= 4M and N a power of two");
    std::vector<Complex> samples;
    samples.reserve(N);
    for (const auto& z : circle_nodes(N)) samples.push_back(f(z));
    return series_from_samples(samples, M, f.r_inner(), f.r_outer());
}

Complex eval_series(const LaurentSeries& s, const Complex& z) { return s.eval(z); }

Complex contour_coefficient_samples(const std::vector<Complex>& samples, const RootTable& roots, long k,
                                    const Real& radius) {
    const std::size_t N = samples.size();
    std::vector<Complex> terms(N);
    for (std::size_t j = 0; j < N; ++j) terms[j] = samples[j] * roots.power(static_cast<long>(j), -k);
    return pairwise_sum(terms) / (Real(N) * boost::multiprecision::pow(radius, Real(k)));
}

Complex contour_coefficient(const AnnulusFunction& f, long k, const Real& radius, std::size_t N) {
    if (!(radius > f.r_inner() && radius < f.r_outer()))
        throw Error(ErrorKind::OutsideAnnulus, "contour radius outside the annulus of " + f.name());
    RootTable roots(N);
    std::vector<Complex> samples(N);
    for (std::size_t j = 0; j < N; ++j) samples[j] = f(radius * roots[j]);
    return contour_coefficient_samples(samples, roots, k, radius);
}

}  // namespace th
