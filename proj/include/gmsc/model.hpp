#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

// Source model and the two-parameter exchangeable matrices whose analytic
// spectrum drives every rate expression in this library.  All rates are in
// nats.

namespace gmsc {

namespace detail {

inline void require_unit_distortion(double d, const char* where) {
  if (!(d > 0.0 && d < 1.0))
    throw std::invalid_argument(std::string(where) + ": d must lie in (0, 1)");
}

}  // namespace detail

/// Symmetrically correlated Gaussian source: ell zero-mean unit-variance
/// components with common pairwise correlation rho.  The covariance matrix is
/// positive definite exactly for rho in (-1/(ell-1), 1); values within 1e-12
/// of either endpoint are rejected rather than clamped, since downstream
/// formulas divide by the eigenvalues 1-rho and 1+(ell-1)rho.
struct SourceModel {
  int ell;
  double rho;

  SourceModel(int ell_, double rho_) : ell(ell_), rho(rho_) {
    if (ell < 2) throw std::invalid_argument("SourceModel: ell must be >= 2");
    const double lo = -1.0 / (ell - 1);
    if (!(rho - lo >= 1e-12 && 1.0 - rho >= 1e-12))
      throw std::invalid_argument(
          "SourceModel: rho must lie strictly inside (-1/(ell-1), 1)");
  }
};

/// Matrix with constant diagonal `diag` and constant off-diagonal `off`,
/// stored as the parameter triple only.  Densification is an oracle-side
/// helper; the algebra here is O(1) and exact at any dimension.
struct ExchangeableMatrix {
  int ell;
  double diag;
  double off;
};

/// Spectrum of an exchangeable matrix: `bulk` with multiplicity ell-1 and the
/// isolated `apex` eigenvalue (the all-ones direction).
struct EigenSpectrum {
  double bulk;
  double apex;
  int ell;
};

inline ExchangeableMatrix source_covariance(const SourceModel& model) {
  return {model.ell, 1.0, model.rho};
}

inline EigenSpectrum spectrum(const ExchangeableMatrix& mat) {
  return {mat.diag - mat.off, mat.diag + (mat.ell - 1) * mat.off, mat.ell};
}

inline bool positive_definite(const ExchangeableMatrix& mat) {
  const EigenSpectrum s = spectrum(mat);
  return s.bulk > 0.0 && s.apex > 0.0;
}

/// log determinant in nats; the matrix must be positive definite.
inline double log_det(const ExchangeableMatrix& mat) {
  const EigenSpectrum s = spectrum(mat);
  if (!(s.bulk > 0.0 && s.apex > 0.0))
    throw std::domain_error("log_det: matrix is not positive definite");
  return (mat.ell - 1) * std::log(s.bulk) + std::log(s.apex);
}

}  // namespace gmsc
