#pragma once

#include <optional>
#include <vector>

#include "th/determinants.hpp"
#include "th/symbols.hpp"

namespace th {

struct MagnetizationResult {
    int n = 0;
    Complex M;
    IsingCase which = IsingCase::Critical;
    int r = 0, s = 0;
};

// Precomputes the symbol pair and its coefficients once for a sweep over n.
class IsingSystem {
public:
    IsingSystem(const IsingParams& p, const FourierConfig& fc, std::optional<IsingAnnulus> annulus = std::nullopt);

    MagnetizationResult magnetization(int n) const;
    const SymbolPair& pair() const { return pair_; }
    const THSystem& system() const { return sys_; }
    const IsingParams& params() const { return p_; }
    Real prefactor() const;  // (1 - r)^{-3/2}

private:
    IsingParams p_;
    SymbolPair pair_;
    THSystem sys_;
};

MagnetizationResult magnetization(const IsingParams& p, int n, const FourierConfig& fc = {});

// det[phi_{k-j} + w_{k+j}] with w = d phi, reindexed from the offset form (cases with gamma = 0).
Complex unnormalized_determinant(const IsingParams& p, int n, const FourierConfig& fc);

struct CriticalityRow {
    int n;
    Complex M;
    Complex increment;  // M_n - M_{n-1}; zero for the first row
};

struct CriticalityStudy {
    std::vector<CriticalityRow> rows;
    Real fitted_ratio;  // geometric ratio of |increments| by least squares on the log
};

CriticalityStudy criticality_study(const IsingParams& p, int n_max, const FourierConfig& fc = {}, int n_min = 1);

// Least-squares slope of y against x.
Real fit_slope(const std::vector<Real>& x, const std::vector<Real>& y);

}  // namespace th
