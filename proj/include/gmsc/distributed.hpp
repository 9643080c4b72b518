#pragma once

#include "gmsc/model.hpp"

// Fully distributed rate-distortion function (one source per encoder).

namespace gmsc {

/// Closed-form solution of the distributed system: the quadratic's linear
/// coefficient xi, the test-channel noise variance gamma, the distortion
/// matrix off-diagonal theta, the rate, and the distortion spectrum.
struct DistributedSolution {
  double xi;
  double gamma;
  double theta;
  double rate_nats;
  EigenSpectrum spectrum;
};

/// Exact rate of the distributed system for any admissible rho.  gamma solves
/// (1-d) g^2 + xi g - bulk*apex*d = 0; the positive root is evaluated through
/// whichever algebraic form adds magnitudes, so no cancellation occurs on
/// either side of xi = 0.  Stable for d up to 1 - 1e-9.
inline DistributedSolution rate_distributed(const SourceModel& model, double d) {
  detail::require_unit_distortion(d, "rate_distributed");
  const int ell = model.ell;
  const double rho = model.rho;
  const double bulk_var = 1.0 - rho;
  const double apex_var = 1.0 + (ell - 1) * rho;
  const double prod = bulk_var * apex_var;
  const double xi = apex_var * (1.0 - rho - d) - bulk_var * d;
  const double disc = std::sqrt(xi * xi + 4.0 * prod * d * (1.0 - d));
  const double gamma = xi <= 0.0 ? (disc - xi) / (2.0 * (1.0 - d))
                                 : 2.0 * prod * d / (disc + xi);
  const double theta = rho == 0.0 ? 0.0 : rho * d * gamma / (gamma + prod);
  const double bulk = d - theta;
  const double apex = d + (ell - 1) * theta;
  const double rate =
      rho == 0.0 ? 0.5 * ell * std::log(1.0 / d)
                 : 0.5 * ((ell - 1) * std::log(bulk_var / bulk) +
                          std::log(apex_var / apex));
  return {xi, gamma, theta, rate, {bulk, apex, ell}};
}

}  // namespace gmsc
