#pragma once

#include "gmsc/model.hpp"

// Centralized (every encoder sees all sources) rate-distortion function, the
// Shannon lower bound, and the reverse water-filling allocation behind them.

namespace gmsc {

/// Reverse water-filling allocation: per-eigenmode distortions, the water
/// level shared by the coded modes, and the resulting rate computed as the
/// eigen-domain sum (an algebraic route independent of rate_centralized).
struct WaterfillSolution {
  EigenSpectrum per_mode;
  double water_level;
  double rate_nats;
};

/// Determinant-ratio lower bound; may be negative for large d.
inline double shannon_lower_bound(const SourceModel& model, double d) {
  detail::require_unit_distortion(d, "shannon_lower_bound");
  return 0.5 * (log_det(source_covariance(model)) - model.ell * std::log(d));
}

/// Exact centralized rate.  Below the critical distortion (the smallest
/// source eigenvalue) this coincides with the Shannon lower bound; above it
/// the uncoded modes change the formula.  At the branch point both forms
/// agree, and the low-distortion branch is taken.
inline double rate_centralized(const SourceModel& model, double d) {
  detail::require_unit_distortion(d, "rate_centralized");
  const int ell = model.ell;
  const double rho = model.rho;
  if (rho == 0.0) return 0.5 * ell * std::log(1.0 / d);
  if (rho > 0.0) {
    if (d <= 1.0 - rho) return shannon_lower_bound(model, d);
    return 0.5 * std::log((1.0 + (ell - 1) * rho) /
                          (ell * d - (ell - 1) * (1.0 - rho)));
  }
  if (d <= 1.0 + (ell - 1) * rho) return shannon_lower_bound(model, d);
  return 0.5 * (ell - 1) *
         std::log((ell - 1) * (1.0 - rho) / (ell * d - 1.0 - (ell - 1) * rho));
}

inline WaterfillSolution waterfill(const SourceModel& model, double d) {
  detail::require_unit_distortion(d, "waterfill");
  const int ell = model.ell;
  const EigenSpectrum lam = spectrum(source_covariance(model));
  double bulk = d;
  double apex = d;
  double level = d;
  if (model.rho > 0.0 && d > lam.bulk) {
    // The ell-1 bulk modes saturate at their eigenvalue and go uncoded.
    bulk = lam.bulk;
    level = ell * d - (ell - 1) * lam.bulk;
    apex = level;
  } else if (model.rho < 0.0 && d > lam.apex) {
    // Negative correlation: the isolated mode is the smallest and saturates.
    apex = lam.apex;
    level = (ell * d - lam.apex) / (ell - 1);
    bulk = level;
  }
  const double rate =
      0.5 * ((ell - 1) * std::log(lam.bulk / bulk) + std::log(lam.apex / apex));
  return {{bulk, apex, ell}, level, rate};
}

/// Distortion covariance matrix of the optimal centralized scheme: diagonal d,
/// off-diagonal zero below the critical distortion and the closed form above.
inline ExchangeableMatrix distortion_matrix_centralized(const SourceModel& model,
                                                        double d) {
  detail::require_unit_distortion(d, "distortion_matrix_centralized");
  double theta = 0.0;
  if (model.rho > 0.0) {
    if (d >= 1.0 - model.rho) theta = d - 1.0 + model.rho;
  } else if (model.rho < 0.0) {
    if (d >= 1.0 + (model.ell - 1) * model.rho)
      theta = (1.0 - d) / (model.ell - 1) + model.rho;
  }
  return {model.ell, d, theta};
}

}  // namespace gmsc
