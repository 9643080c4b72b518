#pragma once

// Test-side oracles, kept independent of the library's closed-form paths:
// dense matrix construction by hand, eigenvalues via Eigen, water-filling by
// bisection on the water level.

#include <Eigen/Dense>
#include <algorithm>
#include <random>
#include <vector>

namespace testsup {

inline Eigen::MatrixXd dense_exchangeable(int ell, double diag, double off) {
  Eigen::MatrixXd out(ell, ell);
  for (int i = 0; i < ell; ++i)
    for (int j = 0; j < ell; ++j) out(i, j) = i == j ? diag : off;
  return out;
}

inline std::vector<double> dense_eigenvalues(const Eigen::MatrixXd& mat) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mat);
  std::vector<double> out(eig.eigenvalues().data(),
                          eig.eigenvalues().data() + mat.rows());
  std::sort(out.begin(), out.end());
  return out;
}

inline double dense_log_det(const Eigen::MatrixXd& mat) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(mat);
  return ldlt.vectorD().array().log().sum();
}

// Reverse water-filling by bisection: find the level t with
// mean_i min(t, lambda_i) = d, then cap each mode.
inline std::vector<double> waterfill_bisect(const std::vector<double>& lambda,
                                            double d) {
  double lo = 0.0;
  double hi = *std::max_element(lambda.begin(), lambda.end());
  const auto mean_at = [&](double t) {
    double s = 0.0;
    for (double l : lambda) s += std::min(t, l);
    return s / static_cast<double>(lambda.size());
  };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean_at(mid) < d ? lo : hi) = mid;
  }
  const double level = 0.5 * (lo + hi);
  std::vector<double> out(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i)
    out[i] = std::min(level, lambda[i]);
  return out;
}

inline Eigen::MatrixXd random_permutation(int n, std::mt19937_64& rng) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) p(perm[i], i) = 1.0;
  return p;
}

}  // namespace testsup
