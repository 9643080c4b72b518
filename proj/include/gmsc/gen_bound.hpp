#pragma once

#include <algorithm>
#include <optional>
#include <utility>

#include "gmsc/centralized.hpp"
#include "gmsc/distributed.hpp"

// Critical distortions, the eta coefficients of the sum-channel conditional
// covariance, the gamma-parameterized test-channel distortions, the
// Berger-Tung upper bound for general (ell, m), and exact-rate dispatch.

namespace gmsc {

/// C(n, k) as a double; 0 when k < 0 or k > n.  Exact while every prefix
/// binomial fits the mantissa; overflows cleanly to +inf beyond double range.
inline double binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

/// Polynomial coefficients of the sum-channel conditional covariance, raw and
/// in overflow-safe scaled form.  eta2..eta4 scale by C(ell-1, m-1); eta1's
/// scaled variant additionally drops the C(ell-2, m-1)*m factor and reduces to
/// (1-rho)(1+(ell-1)rho).  The binomial ratios C(ell-2,m-1)/C(ell-1,m-1) =
/// (ell-m)/(ell-1) and C(ell-2,m-2)/C(ell-1,m-1) = (m-1)/(ell-1) enter the
/// scaled forms symbolically, so those stay finite for ell up to 1e6 and
/// beyond.
struct EtaCoefficients {
  double eta1, eta2, eta3, eta4;
  double eta1_scaled, eta2_scaled, eta3_scaled, eta4_scaled;
  bool overflow;  ///< raw values exceeded double range; scaled ones never do
};

namespace detail {

inline void require_subset_size(int m, int ell, const char* where) {
  if (m < 1 || m > ell)
    throw std::invalid_argument(std::string(where) +
                                ": m must lie in [1, ell]");
}

}  // namespace detail

inline EtaCoefficients eta_coefficients(const SourceModel& model, int m) {
  detail::require_subset_size(m, model.ell, "eta_coefficients");
  const int ell = model.ell;
  const double rho = model.rho;
  const double b1 = binomial(ell - 1, m - 1);
  const double b2 = binomial(ell - 2, m - 1);  // 0 when m == ell
  const double b3 = binomial(ell - 2, m - 2);  // 0 when m == 1
  const double r2 = static_cast<double>(ell - m) / (ell - 1);
  const double r3 = static_cast<double>(m - 1) / (ell - 1);
  const double apex = 1.0 + (ell - 1) * rho;
  const double t1 = 1.0 + (m - 1) * rho;
  const double t2 = 1.0 + (ell - 2) * rho;
  const double mix = (ell - 1) * m * rho + (m - 1) * (1.0 - rho);
  const double e1s = (1.0 - rho) * apex;
  const double e2s = t1 + r2 * m * t2 + r3 * mix;
  const double e3s = t1 + (ell - m) * m * rho * rho + (m - 1) * rho * t1;
  const double e4s = rho * t1 + r2 * m * rho * t2 + r3 * t2 * t1;
  const double e1 = b1 * b2 * m * e1s;
  const double e2 = b1 * t1 + b2 * m * t2 + b3 * mix;
  const double e3 =
      b1 * t1 + b2 * (ell - 1) * m * rho * rho + b3 * (ell - 1) * rho * t1;
  const double e4 = b1 * rho * t1 + b2 * m * rho * t2 + b3 * t2 * t1;
  const bool overflow = !(std::isfinite(e1) && std::isfinite(e2) &&
                          std::isfinite(e3) && std::isfinite(e4));
  return {e1, e2, e3, e4, e1s, e2s, e3s, e4s, overflow};
}

/// The pair (d_c^-, d_c^+) = (1+(ell-1)rho, 1-rho): the eigenvalues of the
/// source covariance, where water-filling starts leaving modes uncoded.
inline std::pair<double, double> critical_distortions_pm(
    const SourceModel& model) {
  return {1.0 + (model.ell - 1) * model.rho, 1.0 - model.rho};
}

/// Largest distortion up to which the (ell, m) system provably matches the
/// centralized one when rho > 0.  Zero at m = 1 and d_c^+ at m = ell.
inline double critical_distortion(const SourceModel& model, int m) {
  detail::require_subset_size(m, model.ell, "critical_distortion");
  if (!(model.rho > 0.0))
    throw std::invalid_argument(
        "critical_distortion: defined for rho in (0, 1) only");
  const int ell = model.ell;
  const double rho = model.rho;
  const double num = (ell - 1) * rho * (1.0 + (m - 1) * rho);
  const double den = (ell - 1) * m * rho + (m - 1) * (1.0 - rho);
  return 1.0 - num / den;
}

namespace detail {

// eta1 / C(ell-1, m-1)^2, binomial-free.
inline double eta1_norm2(const EtaCoefficients& eta, int ell, int m) {
  return static_cast<double>(ell - m) / (ell - 1) * m * eta.eta1_scaled;
}

// gamma / C(ell-1, m-1) solving d+(gamma) = d.  The positive quadratic root
// is taken through the conjugate form when eta3 - eta2(1-d) < 0, so both
// regimes add magnitudes and stay cancellation-free down to d << d_c.
inline double gamma_hat_plus(const EtaCoefficients& eta, int ell, int m,
                             double d) {
  const double e1n = eta1_norm2(eta, ell, m);
  const double a = eta.eta2_scaled * (1.0 - d) - eta.eta3_scaled;
  const double disc = std::sqrt(a * a + 4.0 * e1n * d * (1.0 - d));
  return a <= 0.0 ? (disc - a) / (2.0 * (1.0 - d)) : 2.0 * e1n * d / (disc + a);
}

// theta+ expressed through the achieved distortion d (valid when
// d+(gamma_hat) == d).  Algebraically reduced: eta2*rho - eta4 factors as
// -C(ell-2,m-2)(1-rho)(1+(ell-1)rho) and eta2 - eta3 as
// (1-rho)(1+(ell-1)rho)(C(ell-2,m-1)m + C(ell-2,m-2)(m-1)), which keeps the
// denominator positive and the numerator's single subtraction the one that
// decides the sign of theta.
inline double theta_plus_of_d(const EtaCoefficients& eta, int ell, int m,
                              double rho, double gamma_hat, double d) {
  const double r2 = static_cast<double>(ell - m) / (ell - 1);
  const double r3 = static_cast<double>(m - 1) / (ell - 1);
  const double num = (rho * gamma_hat - r3 * eta.eta1_scaled) * d;
  const double den = gamma_hat + eta.eta1_scaled * (r2 * m + r3 * (m - 1));
  return num / den;
}

}  // namespace detail

/// Distortion and off-diagonal of the sum-channel conditional covariance at
/// noise variance gamma.  Valid for any admissible rho; at m = 1 this is the
/// single-source test channel of the distributed system.
inline std::pair<double, double> d_plus_theta_plus(const SourceModel& model,
                                                   int m, double gamma) {
  detail::require_subset_size(m, model.ell, "d_plus_theta_plus");
  if (!(gamma > 0.0))
    throw std::invalid_argument("d_plus_theta_plus: gamma must be positive");
  const double b1 = binomial(model.ell - 1, m - 1);
  if (!std::isfinite(b1))
    throw std::domain_error(
        "d_plus_theta_plus: binomial overflow; use the d-parameterized forms");
  const EtaCoefficients eta = eta_coefficients(model, m);
  const double gh = gamma / b1;
  const double e1n = detail::eta1_norm2(eta, model.ell, m);
  const double den = gh * gh + eta.eta2_scaled * gh + e1n;
  const double dplus = 1.0 - (eta.eta3_scaled * gh + e1n) / den;
  const double thplus =
      model.rho - (eta.eta4_scaled * gh + e1n * model.rho) / den;
  return {dplus, thplus};
}

/// Centering-channel analogue for m >= 2 observed sources per encoder.
inline std::pair<double, double> d_minus_theta_minus(const SourceModel& model,
                                                     int m, double gamma) {
  if (m < 2 || m > model.ell)
    throw std::invalid_argument(
        "d_minus_theta_minus: the centering construction needs 2 <= m <= ell");
  if (!(gamma > 0.0))
    throw std::invalid_argument("d_minus_theta_minus: gamma must be positive");
  const int ell = model.ell;
  const double rho = model.rho;
  const double b3 = binomial(ell - 2, m - 2);
  if (!std::isfinite(b3))
    throw std::domain_error("d_minus_theta_minus: binomial overflow");
  const double den = gamma + b3 * ell * (1.0 - rho);
  const double shrink = b3 * (1.0 - rho) * (1.0 - rho) / den;
  return {1.0 - (ell - 1) * shrink, rho + shrink};
}

enum class Branch { plus, minus };

/// The unique positive noise variance attaining distortion d, with the branch
/// used, theta at that gamma, and the recomputed distortion for round-trip
/// verification.
struct GammaSolution {
  double gamma;
  Branch branch;
  double theta;
  double d_check;
};

inline GammaSolution gamma_of_d(const SourceModel& model, int m, double d) {
  detail::require_subset_size(m, model.ell, "gamma_of_d");
  detail::require_unit_distortion(d, "gamma_of_d");
  const int ell = model.ell;
  const double rho = model.rho;
  if (rho == 0.0)
    throw std::invalid_argument("gamma_of_d: rho = 0 needs no test channel");
  if (rho < 0.0 && m >= 2) {
    // Centering family; one-to-one for d in (d_c^-/ell, 1).
    if (!(d > (1.0 + (ell - 1) * rho) / ell))
      throw std::invalid_argument(
          "gamma_of_d: d must exceed d_c^-/ell for the minus family");
    const double b3 = binomial(ell - 2, m - 2);
    const double gamma = b3 * (1.0 - rho) *
                         ((ell - 1) * (1.0 - rho) - ell * (1.0 - d)) /
                         (1.0 - d);
    const auto [d_check, theta] = d_minus_theta_minus(model, m, gamma);
    return {gamma, Branch::minus, theta, d_check};
  }
  // Sum family: rho > 0 at any m, or rho < 0 at m = 1 (where it reduces to
  // the distributed test channel).
  const EtaCoefficients eta = eta_coefficients(model, m);
  const double gh = detail::gamma_hat_plus(eta, ell, m, d);
  if (!(gh > 0.0) || !std::isfinite(gh))
    throw std::domain_error(
        "gamma_of_d: no positive noise variance attains this distortion");
  const double gamma = gh * binomial(ell - 1, m - 1);
  const double theta = detail::theta_plus_of_d(eta, ell, m, rho, gh, d);
  const double e1n = detail::eta1_norm2(eta, ell, m);
  const double den = gh * gh + eta.eta2_scaled * gh + e1n;
  const double d_check = 1.0 - (eta.eta3_scaled * gh + e1n) / den;
  return {gamma, Branch::plus, theta, d_check};
}

/// Which established result backs a returned rate or bound.
enum class Justification {
  rho_zero,          ///< independent sources; every system coincides
  theorem1,          ///< rho <= 0, m >= 2: equals the centralized rate
  theorem2,          ///< rho > 0, d <= d_c^(ell,m): equals the centralized rate
  centralized_prop,  ///< m == ell
  distributed_prop,  ///< m == 1
  remark8_bound,     ///< rho > 0, d > d_c^(ell,m), 1 < m < ell: bound only
};

/// Berger-Tung rate of the best known (ell, m) scheme, with an honest
/// exactness flag: the value is the true rate iff rho <= 0, or m is 1 or ell,
/// or d is at most the critical distortion.
struct BoundResult {
  double rate_nats;
  double theta;
  bool exact;
  Justification justified_by;
  ExchangeableMatrix distortion_matrix;
};

inline BoundResult upper_bound_rate(const SourceModel& model, int m, double d) {
  detail::require_subset_size(m, model.ell, "upper_bound_rate");
  detail::require_unit_distortion(d, "upper_bound_rate");
  const int ell = model.ell;
  const double rho = model.rho;
  const auto finish = [&](double rate, double theta, bool exact,
                          Justification just) {
    return BoundResult{rate, theta, exact, just,
                       ExchangeableMatrix{ell, d, theta}};
  };
  if (rho == 0.0)
    return finish(0.5 * ell * std::log(1.0 / d), 0.0, true,
                  Justification::rho_zero);
  if (m == 1) {
    const DistributedSolution s = rate_distributed(model, d);
    return finish(s.rate_nats, s.theta, true, Justification::distributed_prop);
  }
  if (m == ell) {
    const ExchangeableMatrix dm = distortion_matrix_centralized(model, d);
    return finish(rate_centralized(model, d), dm.off, true,
                  Justification::centralized_prop);
  }
  if (rho < 0.0) {
    const ExchangeableMatrix dm = distortion_matrix_centralized(model, d);
    return finish(rate_centralized(model, d), dm.off, true,
                  Justification::theorem1);
  }
  if (d <= critical_distortion(model, m))
    return finish(shannon_lower_bound(model, d), 0.0, true,
                  Justification::theorem2);
  const EtaCoefficients eta = eta_coefficients(model, m);
  const double gh = detail::gamma_hat_plus(eta, ell, m, d);
  const double theta = detail::theta_plus_of_d(eta, ell, m, rho, gh, d);
  const double rate =
      0.5 * ((ell - 1) * std::log((1.0 - rho) / (d - theta)) +
             std::log((1.0 + (ell - 1) * rho) / (d + (ell - 1) * theta)));
  return finish(rate, theta, false, Justification::remark8_bound);
}

/// The proven value of the (ell, m) rate where one exists, otherwise the
/// bracketing pair: the centralized rate below, the Berger-Tung bound above.
struct ExactRate {
  std::optional<double> rate_nats;
  Justification justified_by;
  double lower_nats;
  double upper_nats;
};

inline ExactRate rate_exact(const SourceModel& model, int m, double d) {
  const BoundResult bound = upper_bound_rate(model, m, d);
  const double lower = rate_centralized(model, d);
  if (bound.exact)
    return {bound.rate_nats, bound.justified_by, lower, bound.rate_nats};
  return {std::nullopt, bound.justified_by, lower, bound.rate_nats};
}

}  // namespace gmsc
