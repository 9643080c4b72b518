#pragma once

#include <sstream>
#include <vector>

#include "gmsc/io.hpp"
#include "gmsc/oracle.hpp"

// Grid-based equivalence suites: closed forms on one side, the dense
// Schur-complement oracle on the other.  Shared by the `verify` CLI command
// and the acceptance tests.

namespace gmsc::verify {

struct SuiteReport {
  std::string name;
  int cases = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string worst_case;
};

struct Options {
  int ell_max = 8;  ///< largest source count in the grids
  int ell_cap = oracle::kDefaultEllCap;
  std::vector<std::string> suites;  ///< empty = every suite
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "prop4", "prop5", "theorem1", "theorem2", "m1", "mmse", "additivity"};
  return names;
}

namespace detail {

inline std::vector<double> rho_grid(int ell) {
  std::vector<double> out;
  for (double r : {-0.9, -0.7, -0.5, -0.3, -0.1, 0.1, 0.3, 0.5, 0.7, 0.9})
    if (r - (-1.0 / (ell - 1)) >= 1e-12) out.push_back(r);
  return out;
}

struct Residual {
  double value = 0.0;
  std::string where;

  void track(double r, const std::string& where_) {
    if (r > value) {
      value = r;
      where = where_;
    }
  }
};

inline std::string tag(int ell, int m, double rho, double x,
                       const char* x_name) {
  std::ostringstream os;
  os << "ell=" << ell << " m=" << m << " rho=" << rho << " " << x_name << "="
     << x;
  return os.str();
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Max entry deviation of the oracle's conditional covariance from the
// exchangeable closed form for one ensemble.
inline double family_residual(const SourceModel& model, Branch branch, int m,
                              double gamma, int cap) {
  const oracle::AuxScheme scheme{branch, gamma, m, std::nullopt, {}};
  const Eigen::MatrixXd cond =
      oracle::conditional_covariance(oracle::build_joint(model, scheme, cap));
  const auto [dv, tv] = branch == Branch::minus
                            ? d_minus_theta_minus(model, m, gamma)
                            : d_plus_theta_plus(model, m, gamma);
  return max_abs_diff(cond, oracle::dense({model.ell, dv, tv}));
}

inline SuiteReport finish(std::string name, int cases, const Residual& res,
                          double tol) {
  return {std::move(name), cases,  res.value,
          tol,             res.value <= tol, res.where};
}

}  // namespace detail

/// Minus-family conditional covariance vs. closed form over the full grid.
inline SuiteReport prop4_equivalence(const Options& opt) {
  detail::Residual res;
  int cases = 0;
  for (int ell = 2; ell <= opt.ell_max; ++ell)
    for (int m = 2; m <= ell; ++m)
      for (double rho : detail::rho_grid(ell))
        for (double gamma : {0.1, 1.0, 10.0}) {
          const SourceModel model(ell, rho);
          res.track(
              detail::family_residual(model, Branch::minus, m, gamma,
                                      opt.ell_cap),
              detail::tag(ell, m, rho, gamma, "gamma"));
          ++cases;
        }
  return detail::finish("prop4", cases, res, 1e-9);
}

/// Plus-family conditional covariance vs. closed form over the full grid.
inline SuiteReport prop5_equivalence(const Options& opt) {
  detail::Residual res;
  int cases = 0;
  for (int ell = 2; ell <= opt.ell_max; ++ell)
    for (int m = 1; m <= ell; ++m)
      for (double rho : detail::rho_grid(ell))
        for (double gamma : {0.1, 1.0, 10.0}) {
          const SourceModel model(ell, rho);
          res.track(
              detail::family_residual(model, Branch::plus, m, gamma,
                                      opt.ell_cap),
              detail::tag(ell, m, rho, gamma, "gamma"));
          ++cases;
        }
  return detail::finish("prop5", cases, res, 1e-9);
}

/// Non-positive rho: the minus-family scheme (refined below the critical
/// distortion) achieves the centralized rate on both branches.
inline SuiteReport theorem1_construction(const Options& opt) {
  detail::Residual res;
  int cases = 0;
  const int ell_hi = std::min(opt.ell_max, 6);
  for (int ell = 3; ell <= ell_hi; ++ell)
    for (double rho : {-0.05, -0.2, -0.4}) {
      if (!(rho - (-1.0 / (ell - 1)) >= 1e-12)) continue;
      const SourceModel model(ell, rho);
      const double dc = 1.0 + (ell - 1) * rho;
      const double d_grid[] = {0.25 * dc, 0.6 * dc, dc, 0.5 * (dc + 1.0),
                               0.95};
      for (int m = 2; m <= ell; ++m)
        for (double d : d_grid) {
          oracle::AuxScheme scheme{Branch::minus, 0.0, m, std::nullopt, {}};
          if (d >= dc) {
            scheme.gamma = gamma_of_d(model, m, d).gamma;
          } else {
            const double b3 = binomial(ell - 2, m - 2);
            scheme.gamma = -b3 * (1.0 - rho) * (1.0 + (ell - 1) * rho) / rho;
            scheme.augment_d = d;
          }
          const double rate = oracle::berger_tung_rate(
              model, oracle::build_joint(model, scheme, opt.ell_cap));
          res.track(std::fabs(rate - rate_centralized(model, d)),
                    detail::tag(ell, m, rho, d, "d"));
          ++cases;
        }
    }
  return detail::finish("theorem1", cases, res, 1e-9);
}

/// Positive rho: theta+ vanishes at gamma_c, the achieved distortion there is
/// the critical one, and the (optionally refined) plus-family scheme attains
/// the Shannon-lower-bound rate with a diagonal conditional covariance.
inline SuiteReport theorem2_construction(const Options& opt) {
  detail::Residual res;
  int cases = 0;
  const int ell_hi = std::min(opt.ell_max, 6);
  for (int ell = 3; ell <= ell_hi; ++ell)
    for (double rho : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9})
      for (int m = 2; m <= ell; ++m) {
        const SourceModel model(ell, rho);
        const double b3 = binomial(ell - 2, m - 2);
        const double gamma_c =
            b3 * (1.0 - rho) * (1.0 + (ell - 1) * rho) / rho;
        const double dc = critical_distortion(model, m);
        const auto [d_at_c, theta_at_c] = d_plus_theta_plus(model, m, gamma_c);
        const std::string at = detail::tag(ell, m, rho, gamma_c, "gamma_c");
        res.track(std::fabs(theta_at_c), at);
        res.track(std::fabs(d_at_c - dc), at);
        const oracle::AuxScheme bare{Branch::plus, gamma_c, m, std::nullopt,
                                     {}};
        res.track(
            std::fabs(oracle::berger_tung_rate(
                          model, oracle::build_joint(model, bare, opt.ell_cap)) -
                      shannon_lower_bound(model, dc)),
            at);
        ++cases;
        for (double frac : {0.25, 0.5, 0.75}) {
          const double d = frac * dc;
          const oracle::AuxScheme refined{Branch::plus, gamma_c, m, d, {}};
          const auto joint = oracle::build_joint(model, refined, opt.ell_cap);
          const Eigen::MatrixXd cond = oracle::conditional_covariance(joint);
          const Eigen::MatrixXd target =
              Eigen::MatrixXd::Identity(ell, ell) * d;
          const std::string at_d = detail::tag(ell, m, rho, d, "d");
          res.track(detail::max_abs_diff(cond, target), at_d);
          res.track(std::fabs(oracle::berger_tung_rate(model, joint) -
                              shannon_lower_bound(model, d)),
                    at_d);
          ++cases;
        }
      }
  return detail::finish("theorem2", cases, res, 1e-9);
}

/// m = 1 cross-check: the distributed closed form, the oracle rate of the
/// plus-family scheme at the matching gamma, and the general bound all agree.
inline SuiteReport m1_crosscheck(const Options& opt) {
  detail::Residual res;
  int cases = 0;
  const int ell_hi = std::min(opt.ell_max, 6);
  for (int ell = 2; ell <= ell_hi; ++ell)
    for (double rho : {-0.3, -0.1, 0.1, 0.3, 0.5, 0.7, 0.9}) {
      if (!(rho - (-1.0 / (ell - 1)) >= 1e-12)) continue;
      const SourceModel model(ell, rho);
      for (double d : io::spaced_grid(0.02, 0.98, 50, false)) {
        const DistributedSolution sol = rate_distributed(model, d);
        const oracle::AuxScheme scheme{Branch::plus, sol.gamma, 1,
                                       std::nullopt, {}};
        const double oracle_rate = oracle::berger_tung_rate(
            model, oracle::build_joint(model, scheme, opt.ell_cap));
        const std::string at = detail::tag(ell, 1, rho, d, "d");
        res.track(std::fabs(sol.rate_nats - oracle_rate), at);
        res.track(std::fabs(sol.rate_nats -
                            upper_bound_rate(model, 1, d).rate_nats),
                  at);
        ++cases;
      }
    }
  return detail::finish("m1", cases, res, 1e-9);
}

/// Orthogonality of the closed-form MMSE weights: the estimation residual is
/// uncorrelated with every auxiliary observation.
inline SuiteReport mmse_orthogonality(const Options& opt) {
  detail::Residual res;
  int cases = 0;
  const int ell_hi = std::min(opt.ell_max, 6);
  for (int ell = 2; ell <= ell_hi; ++ell)
    for (double rho : detail::rho_grid(ell))
      for (double gamma : {0.1, 1.0, 10.0})
        for (int m = 1; m <= ell; ++m)
          for (Branch branch : {Branch::plus, Branch::minus}) {
            if (branch == Branch::minus && m < 2) continue;
            const SourceModel model(ell, rho);
            const oracle::AuxScheme scheme{branch, gamma, m, std::nullopt, {}};
            const auto joint = oracle::build_joint(model, scheme, opt.ell_cap);
            const Eigen::MatrixXd weights =
                oracle::mmse_weight_matrix(model, scheme);
            const int nv = static_cast<int>(joint.cov.rows()) - ell;
            const Eigen::MatrixXd sxv = joint.cov.topRightCorner(ell, nv);
            const Eigen::MatrixXd svv = joint.cov.bottomRightCorner(nv, nv);
            const double orth =
                (sxv - weights * svv).cwiseAbs().maxCoeff();
            res.track(orth,
                      detail::tag(ell, m, rho, gamma, "gamma") +
                          (branch == Branch::minus ? " minus" : " plus"));
            ++cases;
          }
  return detail::finish("mmse", cases, res, 1e-10);
}

/// The refinement channel adds its precision to the unrefined ensemble's:
/// inv(cov(X | U, W)) = inv(cov(X | U)) + inv(noise) entrywise.
inline SuiteReport precision_additivity(const Options& opt) {
  detail::Residual res;
  int cases = 0;
  const int ell_hi = std::min(opt.ell_max, 5);
  for (int ell = 3; ell <= ell_hi; ++ell)
    for (double rho : {-0.2, -0.05, 0.3, 0.6}) {
      if (!(rho - (-1.0 / (ell - 1)) >= 1e-12)) continue;
      const SourceModel model(ell, rho);
      for (int m = 2; m <= ell; ++m) {
        const Branch branch = rho < 0.0 ? Branch::minus : Branch::plus;
        const double b3 = binomial(ell - 2, m - 2);
        const double gamma_c =
            std::fabs(b3 * (1.0 - rho) * (1.0 + (ell - 1) * rho) / rho);
        const double crit = rho < 0.0 ? 1.0 + (ell - 1) * rho
                                      : critical_distortion(model, m);
        for (double frac : {1.0 / 3.0, 2.0 / 3.0}) {
          const double d = frac * crit;
          const double w = crit * d / (crit - d);
          const oracle::AuxScheme bare{branch, gamma_c, m, std::nullopt, {}};
          const oracle::AuxScheme refined{branch, gamma_c, m, d, {}};
          const Eigen::MatrixXd c_bare = oracle::conditional_covariance(
              oracle::build_joint(model, bare, opt.ell_cap));
          const Eigen::MatrixXd c_ref = oracle::conditional_covariance(
              oracle::build_joint(model, refined, opt.ell_cap));
          const Eigen::MatrixXd lhs = c_ref.inverse();
          const Eigen::MatrixXd rhs =
              c_bare.inverse() +
              Eigen::MatrixXd::Identity(ell, ell) / w;
          res.track(detail::max_abs_diff(lhs, rhs),
                    detail::tag(ell, m, rho, d, "d"));
          ++cases;
        }
      }
    }
  return detail::finish("additivity", cases, res, 1e-8);
}

inline SuiteReport run_suite(const std::string& name, const Options& opt) {
  if (name == "prop4") return prop4_equivalence(opt);
  if (name == "prop5") return prop5_equivalence(opt);
  if (name == "theorem1") return theorem1_construction(opt);
  if (name == "theorem2") return theorem2_construction(opt);
  if (name == "m1") return m1_crosscheck(opt);
  if (name == "mmse") return mmse_orthogonality(opt);
  if (name == "additivity") return precision_additivity(opt);
  throw std::invalid_argument("verify: unknown suite '" + name + "'");
}

inline std::vector<SuiteReport> run(const Options& opt) {
  if (opt.ell_max > opt.ell_cap)
    throw std::invalid_argument("verify: requested ell exceeds the oracle cap");
  if (opt.ell_max < 2)
    throw std::invalid_argument("verify: ell must be at least 2");
  const auto& names = opt.suites.empty() ? suite_names() : opt.suites;
  std::vector<SuiteReport> out;
  out.reserve(names.size());
  for (const auto& name : names) out.push_back(run_suite(name, opt));
  return out;
}

}  // namespace gmsc::verify
