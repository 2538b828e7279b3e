#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "cbs/common.hpp"

namespace cbs {

struct ScaleEstimate {
  double sigma = 0.0;  // noise scale, residual units
  int k_star = 0;      // transition rank (count of points before the jump)
  int inlier_count = 0;
};

/// MSSE: scan ascending squared residuals from rank k for the first k' with
/// r2[k'+1] > T^2 * sigma2[k'], where sigma2[k'] = sum_{i<=k'} r2[i] / (k'-p).
/// Returns sigma at the transition; k' = N when no transition occurs.
inline ScaleEstimate msse(const Eigen::VectorXd& sorted_r2, int k, double t, int p) {
  const int n = static_cast<int>(sorted_r2.size());
  if (k <= p) throw InputError("msse: k must exceed the model dof p");
  if (k > n) throw InputError("msse: k exceeds the number of residuals");

  const double t2 = t * t;
  double sum = sorted_r2.head(k).sum();
  int k_star = k;
  double sigma2 = sum / (k_star - p);
  while (k_star < n) {
    if (sorted_r2[k_star] > t2 * sigma2) break;
    sum += sorted_r2[k_star];
    ++k_star;
    sigma2 = sum / (k_star - p);
  }

  ScaleEstimate est;
  est.sigma = std::sqrt(sigma2);
  est.k_star = k_star;
  const double bound = t2 * sigma2;
  est.inlier_count = static_cast<int>(
      std::lower_bound(sorted_r2.data(), sorted_r2.data() + n, bound) - sorted_r2.data());
  return est;
}

/// Floor that keeps the affinity exponential finite on exact synthetic data:
/// max(sigma, 1e-9 * data diameter).
inline double sigma_floor(double sigma, double data_diameter) {
  return std::max(sigma, 1e-9 * data_diameter);
}

}  // namespace cbs
