// Test-only oracles, implemented independently of the library code paths
// they cross-check.
#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Closed-form total-least-squares line via the analytic eigendecomposition of
// the 2x2 scatter matrix (no library eigensolver involved).
// ---------------------------------------------------------------------------
inline Eigen::Vector3d tls_line_closed_form(const Eigen::Matrix2Xd& pts) {
  const Eigen::Vector2d c = pts.rowwise().mean();
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < pts.cols(); ++i) {
    const double dx = pts(0, i) - c[0];
    const double dy = pts(1, i) - c[1];
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  // Smallest eigenvalue of [[sxx, sxy], [sxy, syy]].
  const double tr = sxx + syy;
  const double det = sxx * syy - sxy * sxy;
  const double lambda = tr / 2.0 - std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
  // Eigenvector from whichever row of (S - lambda I) is better conditioned.
  Eigen::Vector2d n;
  if (std::abs(sxy) > 1e-300) {
    n << sxy, lambda - sxx;
    if (n.norm() < 1e-12 * tr) n << lambda - syy, sxy;
  } else {
    n = sxx <= syy ? Eigen::Vector2d(1.0, 0.0) : Eigen::Vector2d(0.0, 1.0);
  }
  n.normalize();
  Eigen::Vector3d theta;
  theta << n, n.dot(c);
  const double lead = std::abs(theta[0]) > 1e-12 ? theta[0] : theta[1];
  if (lead < 0.0) theta = -theta;
  return theta;
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi eigensolver for symmetric matrices. Returns eigenvalues
// ascending with matching eigenvector columns.
// ---------------------------------------------------------------------------
inline void jacobi_eigen(Eigen::MatrixXd a, Eigen::VectorXd& evals, Eigen::MatrixXd& evecs) {
  const int n = static_cast<int>(a.rows());
  evecs = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);

  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) < 1e-15 * scale * n) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-18 * scale) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        for (int i = 0; i < n; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = cs * aip - sn * aiq;
          a(i, q) = sn * aip + cs * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = a(p, i), aqi = a(q, i);
          a(p, i) = cs * api - sn * aqi;
          a(q, i) = sn * api + cs * aqi;
        }
        for (int i = 0; i < n; ++i) {
          const double vip = evecs(i, p), viq = evecs(i, q);
          evecs(i, p) = cs * vip - sn * viq;
          evecs(i, q) = sn * vip + cs * viq;
        }
      }
    }
  }

  evals = a.diagonal();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return evals[x] < evals[y]; });
  Eigen::VectorXd ev(n);
  Eigen::MatrixXd vv(n, n);
  for (int i = 0; i < n; ++i) {
    ev[i] = evals[order[i]];
    vv.col(i) = evecs.col(order[i]);
  }
  evals = ev;
  evecs = vv;
}

// ---------------------------------------------------------------------------
// Exhaustive-permutation clustering error (Eq.-9 style), for small label
// sets.
// ---------------------------------------------------------------------------
inline double brute_force_ce(std::span<const int> truth, std::span<const int> predicted) {
  std::vector<int> t_labels, p_labels;
  for (int l : truth)
    if (std::find(t_labels.begin(), t_labels.end(), l) == t_labels.end()) t_labels.push_back(l);
  for (int l : predicted)
    if (std::find(p_labels.begin(), p_labels.end(), l) == p_labels.end()) p_labels.push_back(l);

  const int k = static_cast<int>(std::max(t_labels.size(), p_labels.size()));
  // Index maps, padded with unused slots.
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);

  const auto t_index = [&](int label) {
    return static_cast<int>(std::find(t_labels.begin(), t_labels.end(), label) - t_labels.begin());
  };
  const auto p_index = [&](int label) {
    return static_cast<int>(std::find(p_labels.begin(), p_labels.end(), label) - p_labels.begin());
  };

  int best_matches = 0;
  do {
    int matches = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
      if (perm[p_index(predicted[i])] == t_index(truth[i])) ++matches;
    best_matches = std::max(best_matches, matches);
  } while (std::next_permutation(perm.begin(), perm.end()));

  return 100.0 * (static_cast<double>(truth.size()) - best_matches) / truth.size();
}

// ---------------------------------------------------------------------------
// Statistics helpers: Kolmogorov-Smirnov and chi-square tail probabilities.
// ---------------------------------------------------------------------------

/// Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 l^2).
inline double kolmogorov_q(double lambda) {
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-12) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// One-sample KS p-value for samples that were transformed through the
/// hypothesized CDF (so the null is U(0,1)).
inline double ks_pvalue_uniform(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    d = std::max(d, std::abs((i + 1) / n - u[i]));
    d = std::max(d, std::abs(u[i] - i / n));
  }
  const double sn = std::sqrt(n);
  return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

inline double normal_cdf(double x, double mean = 0.0, double sd = 1.0) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

/// Regularized upper incomplete gamma Q(a, x) (series / continued fraction).
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) return 1.0;
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    // Series for P(a, x), return 1 - P.
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-14) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  // Continued fraction for Q(a, x).
  double b = x + 1.0 - a;
  double c = 1e300;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-14) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

/// Chi-square survival function with df degrees of freedom.
inline double chi2_sf(double x, double df) { return gamma_q(df / 2.0, x / 2.0); }

/// Chi-square CDF.
inline double chi2_cdf(double x, double df) { return 1.0 - chi2_sf(x, df); }

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace oracle
