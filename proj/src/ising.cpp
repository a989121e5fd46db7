#include "th/ising.hpp"

namespace th {

IsingSystem::IsingSystem(const IsingParams& p, const FourierConfig& fc, std::optional<IsingAnnulus> annulus)
    : p_(p), pair_(ising_symbols(p, annulus)), sys_(make_system(pair_, fc)) {}

Real IsingSystem::prefactor() const { return boost::multiprecision::pow(1 - p_.r_param, Real(-1.5)); }

MagnetizationResult IsingSystem::magnetization(int n) const {
    MagnetizationResult m;
    m.n = n;
    m.M = prefactor() * det_th(sys_, n);
    m.which = p_.which();
    m.r = sys_.r;
    m.s = sys_.s;
    return m;
}

MagnetizationResult magnetization(const IsingParams& p, int n, const FourierConfig& fc) {
    return IsingSystem(p, fc).magnetization(n);
}

Complex unnormalized_determinant(const IsingParams& p, int n, const FourierConfig& fc) {
    IsingCase c = p.which();
    if (c == IsingCase::BelowOne) throw Error(ErrorKind::InvalidParams, "gamma term present for a < 1");
    IsingAnnulus an = ising_default_annulus(p);
    AnnulusFunction phi = ising_phi(p.q, an.r_i, an.r_o);
    AnnulusFunction w = product(ising_d(p, an.r_i, an.r_o), phi);
    THSystem sys;
    sys.phi = fourier_coeffs(phi, fc.M, fc.N);
    sys.w = fourier_coeffs(w, fc.M, fc.N);
    sys.r = 0;
    sys.s = 0;
    sys.precision_tag = precision();
    return det_th(sys, n);
}

Real fit_slope(const std::vector<Real>& x, const std::vector<Real>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw Error(ErrorKind::InvalidParams, "slope fit needs two or more points");
    Real mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    Real sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

CriticalityStudy criticality_study(const IsingParams& p, int n_max, const FourierConfig& fc, int n_min) {
    if (p.which() != IsingCase::Critical)
        throw Error(ErrorKind::InvalidParams, "criticality study needs a = 1 (r_param = q^2)");
    if (n_min < 1 || n_max < n_min + 2) throw Error(ErrorKind::InvalidParams, "need n_max >= n_min + 2");
    IsingSystem is(p, fc);
    CriticalityStudy st;
    std::vector<Real> xs, ys;
    Complex prev;
    for (int n = n_min; n <= n_max; ++n) {
        Complex M = is.magnetization(n).M;
        Complex inc = n == n_min ? Complex() : M - prev;
        st.rows.push_back({n, M, inc});
        if (n > n_min) {
            xs.push_back(Real(n));
            ys.push_back(boost::multiprecision::log(abs(inc)));
        }
        prev = M;
    }
    st.fitted_ratio = boost::multiprecision::exp(fit_slope(xs, ys));
    return st;
}

}  // namespace th
