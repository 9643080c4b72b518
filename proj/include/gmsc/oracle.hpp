#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "gmsc/gen_bound.hpp"

// Independent verification engine: assembles the explicit joint Gaussian
// covariance of the sources and any of the paper-style auxiliary-observation
// ensembles, then conditions by Schur complement.  Everything here is dense,
// exact linear algebra over small dimensions; the closed forms elsewhere in
// the library never call into this module.

namespace gmsc::oracle {

inline constexpr int kDefaultEllCap = 8;

inline Eigen::MatrixXd dense(const ExchangeableMatrix& mat) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(mat.ell, mat.ell, mat.off);
  out.diagonal().setConstant(mat.diag);
  return out;
}

/// All size-m subsets of {0, ..., ell-1} in lexicographic order.
inline std::vector<std::vector<int>> subsets(int ell, int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(m);
  for (int i = 0; i < m; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    int k = m - 1;
    while (k >= 0 && cur[k] == ell - m + k) --k;
    if (k < 0) break;
    ++cur[k];
    for (int j = k + 1; j < m; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

/// Assigns each source index to exactly one observing subset: {0..m-1} keeps
/// its own members and every later window {i-m+1..i} takes {i}.  Aligned with
/// the subsets() enumeration; non-window subsets get the empty set.
inline std::vector<std::vector<int>> omega_partition(int ell, int m) {
  const auto subs = subsets(ell, m);
  std::vector<std::vector<int>> omega(subs.size());
  for (std::size_t s = 0; s < subs.size(); ++s) {
    const auto& set = subs[s];
    if (set.back() - set.front() != m - 1) continue;
    if (set.front() == 0)
      omega[s] = set;
    else
      omega[s] = {set.back()};
  }
  return omega;
}

/// One auxiliary-observation ensemble: the channel family, its noise
/// variance, the subset size, and optionally a per-source refinement channel
/// at distortion `augment_d` attached through the `omega` partition (empty
/// means the canonical one).
struct AuxScheme {
  Branch branch = Branch::plus;
  double gamma = 1.0;
  int m = 1;
  std::optional<double> augment_d;
  std::vector<std::vector<int>> omega;
};

/// Dense joint covariance over (X_1..X_ell, auxiliaries), rows named.
struct JointCovariance {
  Eigen::MatrixXd cov;
  std::vector<std::string> labels;
  int ell = 0;
};

namespace detail {

inline std::string subset_label(const std::vector<int>& set) {
  std::string s = "{";
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(set[i] + 1);
  }
  return s + "}";
}

inline void validate_omega(const std::vector<std::vector<int>>& omega,
                           const std::vector<std::vector<int>>& subs, int ell) {
  if (omega.size() != subs.size())
    throw std::invalid_argument("build_joint: omega size mismatch");
  std::vector<int> hits(ell, 0);
  for (std::size_t s = 0; s < omega.size(); ++s) {
    for (int i : omega[s]) {
      if (i < 0 || i >= ell ||
          std::find(subs[s].begin(), subs[s].end(), i) == subs[s].end())
        throw std::invalid_argument(
            "build_joint: omega assigns an index outside its subset");
      ++hits[i];
    }
  }
  for (int i = 0; i < ell; ++i)
    if (hits[i] != 1)
      throw std::invalid_argument("build_joint: omega is not a partition");
}

}  // namespace detail

/// Exact covariance assembly.  Auxiliaries are linear forms in X plus
/// independent noise: per-subset centering rows with noise covariance
/// gamma * M for the minus family (M the centering matrix, singular by
/// construction), one sum row with variance-gamma noise for the plus family,
/// and identity rows with the refinement-channel noise when augmented.
inline JointCovariance build_joint(const SourceModel& model,
                                   const AuxScheme& scheme,
                                   int ell_cap = kDefaultEllCap) {
  const int ell = model.ell;
  if (ell > ell_cap)
    throw std::invalid_argument("build_joint: ell exceeds the oracle cap");
  gmsc::detail::require_subset_size(scheme.m, ell, "build_joint");
  if (scheme.branch == Branch::minus && scheme.m < 2)
    throw std::invalid_argument("build_joint: minus family needs m >= 2");
  if (!(scheme.gamma >= 0.0))
    throw std::invalid_argument("build_joint: gamma must be non-negative");
  const int m = scheme.m;
  const auto subs = subsets(ell, m);
  const int n_subsets = static_cast<int>(subs.size());
  const int n_channel = scheme.branch == Branch::minus ? n_subsets * m : n_subsets;
  const int n_aux = n_channel + (scheme.augment_d ? ell : 0);

  Eigen::MatrixXd forms = Eigen::MatrixXd::Zero(n_aux, ell);
  Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(n_aux, n_aux);
  std::vector<std::string> labels;
  labels.reserve(ell + n_aux);
  for (int i = 0; i < ell; ++i) labels.push_back("X" + std::to_string(i + 1));

  int row = 0;
  if (scheme.branch == Branch::minus) {
    for (int s = 0; s < n_subsets; ++s) {
      for (int k = 0; k < m; ++k) {
        for (int j = 0; j < m; ++j)
          forms(row + k, subs[s][j]) = k == j ? m - 1.0 : -1.0;
        for (int j = 0; j < m; ++j)
          noise(row + k, row + j) = scheme.gamma * (k == j ? m - 1.0 : -1.0);
        labels.push_back("U-" + detail::subset_label(subs[s]) + ":" +
                         std::to_string(k + 1));
      }
      row += m;
    }
  } else {
    for (int s = 0; s < n_subsets; ++s, ++row) {
      for (int j : subs[s]) forms(row, j) = 1.0;
      noise(row, row) = scheme.gamma;
      labels.push_back("U+" + detail::subset_label(subs[s]));
    }
  }

  if (scheme.augment_d) {
    const double d = *scheme.augment_d;
    double crit;
    if (scheme.branch == Branch::minus) {
      crit = 1.0 + (ell - 1) * model.rho;
    } else {
      if (!(model.rho > 0.0))
        throw std::invalid_argument(
            "build_joint: augmented plus family needs rho > 0");
      crit = critical_distortion(model, m);
    }
    if (!(d > 0.0 && d < crit))
      throw std::invalid_argument(
          "build_joint: augment distortion must lie in (0, critical)");
    const auto& omega =
        scheme.omega.empty() ? omega_partition(ell, m) : scheme.omega;
    detail::validate_omega(omega, subs, ell);
    const double w = crit * d / (crit - d);
    for (int i = 0; i < ell; ++i, ++row) {
      forms(row, i) = 1.0;
      noise(row, row) = w;
      labels.push_back("W" + std::to_string(i + 1));
    }
  }

  const Eigen::MatrixXd sigma = dense(source_covariance(model));
  JointCovariance joint;
  joint.ell = ell;
  joint.labels = std::move(labels);
  joint.cov.resize(ell + n_aux, ell + n_aux);
  joint.cov.topLeftCorner(ell, ell) = sigma;
  joint.cov.topRightCorner(ell, n_aux) = sigma * forms.transpose();
  joint.cov.bottomLeftCorner(n_aux, ell) =
      joint.cov.topRightCorner(ell, n_aux).transpose();
  joint.cov.bottomRightCorner(n_aux, n_aux) =
      forms * sigma * forms.transpose() + noise;
  return joint;
}

/// Schur complement of the auxiliary block.  The minus-family noise blocks
/// are rank deficient (rows of the centering matrix sum to zero), so the
/// auxiliary block is inverted through a symmetric-eigenvalue pseudo-inverse
/// with relative cutoff 1e-12; only symmetric factorizations are used so the
/// result stays PSD under rounding.
inline Eigen::MatrixXd conditional_covariance(const JointCovariance& joint) {
  const int ell = joint.ell;
  const int nv = static_cast<int>(joint.cov.rows()) - ell;
  if (nv == 0) return joint.cov;
  const Eigen::MatrixXd sxx = joint.cov.topLeftCorner(ell, ell);
  const Eigen::MatrixXd sxv = joint.cov.topRightCorner(ell, nv);
  const Eigen::MatrixXd svv = joint.cov.bottomRightCorner(nv, nv);
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(svv);
  if (eig.info() == Eigen::Success) {
    vectors = eig.eigenvectors();
    values = eig.eigenvalues();
  } else {
    // The iterative tridiagonal solver can stall on the heavily degenerate
    // spectra these ensembles produce; Jacobi SVD of the symmetric PSD block
    // yields the same spectral factorization, just slower.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        svv, Eigen::ComputeThinU | Eigen::ComputeThinV);
    vectors = svd.matrixU();
    values = svd.singularValues();
  }
  const double cut = 1e-12 * values.cwiseAbs().maxCoeff();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(values.size());
  for (int i = 0; i < values.size(); ++i)
    if (std::abs(values[i]) > cut) inv[i] = 1.0 / values[i];
  const Eigen::MatrixXd basis = sxv * vectors;
  Eigen::MatrixXd cond = sxx - basis * inv.asDiagonal() * basis.transpose();
  cond = 0.5 * (cond + cond.transpose()).eval();
  return cond;
}

/// One-shot Berger-Tung rate of the ensemble: half the log-determinant ratio
/// of the source covariance to the conditional covariance.
inline double berger_tung_rate(const SourceModel& model,
                               const JointCovariance& joint) {
  const Eigen::MatrixXd cond = conditional_covariance(joint);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cond);
  if (eig.info() != Eigen::Success)
    throw std::domain_error("berger_tung_rate: eigendecomposition failed");
  double logdet = 0.0;
  for (int i = 0; i < cond.rows(); ++i) {
    if (!(eig.eigenvalues()[i] > 0.0))
      throw std::domain_error(
          "berger_tung_rate: singular conditional covariance");
    logdet += std::log(eig.eigenvalues()[i]);
  }
  return 0.5 * (log_det(source_covariance(model)) - logdet);
}

/// Closed-form MMSE combining weights for the unaugmented ensembles: kappa
/// for the minus family (applied to the matching centering row of each
/// covering subset), (alpha, beta) for the plus family (covering and
/// non-covering sum observations).
struct MmseWeights {
  Branch branch;
  double kappa = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

inline MmseWeights mmse_weights(const SourceModel& model,
                                const AuxScheme& scheme) {
  if (scheme.augment_d)
    throw std::invalid_argument(
        "mmse_weights: closed forms cover the unaugmented ensembles only");
  gmsc::detail::require_subset_size(scheme.m, model.ell, "mmse_weights");
  const int ell = model.ell;
  const int m = scheme.m;
  const double rho = model.rho;
  const double gamma = scheme.gamma;
  if (!(gamma > 0.0))
    throw std::invalid_argument("mmse_weights: gamma must be positive");
  MmseWeights out;
  out.branch = scheme.branch;
  if (scheme.branch == Branch::minus) {
    if (m < 2)
      throw std::invalid_argument("mmse_weights: minus family needs m >= 2");
    const double b3 = binomial(ell - 2, m - 2);
    out.kappa = (1.0 - rho) / (gamma + b3 * ell * (1.0 - rho));
  } else {
    const EtaCoefficients eta = eta_coefficients(model, m);
    const double b2 = binomial(ell - 2, m - 1);
    const double b3 = binomial(ell - 2, m - 2);
    const double apex = 1.0 + (ell - 1) * rho;
    const double den = gamma * gamma + eta.eta2 * gamma + eta.eta1;
    out.alpha =
        ((1.0 + (m - 1) * rho) * gamma + b2 * m * (1.0 - rho) * apex) / den;
    out.beta = (m * rho * gamma - b3 * m * (1.0 - rho) * apex) / den;
  }
  return out;
}

/// Weight matrix mapping the unaugmented ensemble's auxiliary vector to the
/// estimator of X, row i giving the combination for X_i.  Used by the
/// orthogonality and residual-covariance checks.
inline Eigen::MatrixXd mmse_weight_matrix(const SourceModel& model,
                                          const AuxScheme& scheme) {
  const MmseWeights w = mmse_weights(model, scheme);
  const int ell = model.ell;
  const int m = scheme.m;
  const auto subs = subsets(ell, m);
  const int cols = scheme.branch == Branch::minus
                       ? static_cast<int>(subs.size()) * m
                       : static_cast<int>(subs.size());
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(ell, cols);
  for (std::size_t s = 0; s < subs.size(); ++s) {
    if (scheme.branch == Branch::minus) {
      for (int k = 0; k < m; ++k)
        mat(subs[s][k], static_cast<int>(s) * m + k) = w.kappa;
    } else {
      for (int i = 0; i < ell; ++i) mat(i, static_cast<int>(s)) = w.beta;
      for (int j : subs[s]) mat(j, static_cast<int>(s)) = w.alpha;
    }
  }
  return mat;
}

}  // namespace gmsc::oracle
