#pragma once

#include <limits>
#include <string_view>

#include "gmsc/gen_bound.hpp"

// Large-ell expansions of the (ell, m) bound, the limiting thresholds, the
// asymptotic gap to the centralized rate, and the per-encoder limit.  The
// dropped O(.) tails are not modeled; callers assert residual scaling, not
// absolute closeness.  Truncations are meaningful from roughly ell >= 50.

namespace gmsc {

enum class Regime { below_dcm, between, at_critical, above_critical };

/// A truncated expansion value together with the regime that selected it, the
/// order of the dropped tail, and whether the expanded quantity is the exact
/// rate (m = 1 or the sub-threshold regime) rather than an upper bound.
struct ExpansionValue {
  double value_nats;
  Regime regime;
  std::string_view order_dropped;
  bool tight;
};

/// Large-ell limit of the critical distortion: (m-1)(1-rho)/m, increasing to
/// d_c^+ as m grows.
inline double dcm_limit(int m, double rho) {
  return (m - 1) * (1.0 - rho) / m;
}

/// Asymptotic gap between the (ell, m) bound and the centralized rate as
/// ell -> infinity.  Zero up to the limiting threshold, divergent at the
/// critical distortion (points within 1e-12 of 1-rho count as critical),
/// finite elsewhere.
inline double delta_gap(int m, double rho, double d) {
  const double dplus = 1.0 - rho;
  if (std::fabs(d - dplus) <= 1e-12)
    return std::numeric_limits<double>::infinity();
  if (d < dplus) {
    if (d <= dcm_limit(m, rho) + 1e-12) return 0.0;
    const double slack = dplus - d;
    return (dplus - m * slack) / (2.0 * m * slack) +
           0.5 * std::log(m * slack / dplus);
  }
  return dplus * (1.0 - d) / (2.0 * m * rho * (d - 1.0 + rho));
}

/// Rate per encoder in the large-ell limit; independent of m.
inline double per_encoder_limit(int /*m*/, double rho, double d) {
  const double dplus = 1.0 - rho;
  return d < dplus ? 0.5 * std::log(dplus / d) : 0.0;
}

/// Truncated expansion of the (ell, m) bound.  Regime boundaries within
/// 1e-12 resolve toward the lower-distortion regime.
inline ExpansionValue expansion_rate(int ell, int m, double rho, double d) {
  const double length = ell;
  const double dplus = 1.0 - rho;
  if (m >= 2 && d <= dcm_limit(m, rho) + 1e-12) {
    const double v = 0.5 * length * std::log(dplus / d) +
                     0.5 * std::log(length) + 0.5 * std::log(rho / dplus);
    return {v, Regime::below_dcm, "O(1/ell)", true};
  }
  if (d < dplus && std::fabs(d - dplus) > 1e-12) {
    const double slack = dplus - d;
    const double v = 0.5 * length * std::log(dplus / d) +
                     0.5 * std::log(length) +
                     (d - (m - 1) * slack) / (2.0 * m * slack) +
                     0.5 * std::log(m * rho * slack / (dplus * dplus));
    return {v, Regime::between, "O(1/ell)", m == 1};
  }
  if (d <= dplus + 1e-12) {
    const double v = std::sqrt(length / m) / 2.0 + 0.25 * std::log(length) +
                     0.5 * std::log(std::sqrt(static_cast<double>(m)) * rho /
                                    dplus) -
                     (1.0 + (m - 1) * rho) / (4.0 * m * rho);
    return {v, Regime::at_critical, "O(1/sqrt(ell))", m == 1};
  }
  const double v = 0.5 * std::log(rho / (d - 1.0 + rho)) +
                   dplus * (1.0 - d) / (2.0 * m * rho * (d - 1.0 + rho));
  return {v, Regime::above_critical, "O(1/ell)", m == 1};
}

/// Truncated expansion of the centralized rate (always exact up to the
/// dropped tail); same boundary resolution rule.
inline ExpansionValue centralized_expansion(int ell, double rho, double d) {
  const double length = ell;
  const double dplus = 1.0 - rho;
  if (d < dplus && std::fabs(d - dplus) > 1e-12) {
    const double v = 0.5 * length * std::log(dplus / d) +
                     0.5 * std::log(length) + 0.5 * std::log(rho / dplus);
    return {v, Regime::below_dcm, "O(1/ell)", true};
  }
  if (d <= dplus + 1e-12) {
    const double v = 0.5 * std::log(length) + 0.5 * std::log(rho / dplus);
    return {v, Regime::at_critical, "O(1/ell)", true};
  }
  return {0.5 * std::log(rho / (d - 1.0 + rho)), Regime::above_critical,
          "O(1/ell)", true};
}

}  // namespace gmsc
