#pragma once

#include <Eigen/Core>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "cbs/affinity.hpp"
#include "cbs/common.hpp"
#include "cbs/dataset.hpp"
#include "cbs/kernels.hpp"
#include "cbs/rng.hpp"
#include "cbs/sampler.hpp"
#include "cbs/scale.hpp"

namespace cbs {

namespace detail {

/// Hungarian algorithm (potentials + augmenting paths) for a square cost
/// matrix; returns the row assigned to each column of the minimum-cost
/// perfect matching.
inline std::vector<int> hungarian_min_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_of_col(n);
  for (int j = 1; j <= n; ++j) row_of_col[j - 1] = p[j] - 1;
  return row_of_col;
}

}  // namespace detail

struct ClusteringErrorReport {
  double ce_percent = 0.0;
  /// Predicted label -> ground-truth label achieving the minimum.
  std::map<int, int> best_permutation;
};

/// Permutation-minimized misclassification percentage. Solved exactly via
/// Hungarian assignment on the confusion matrix; label sets of different
/// sizes are handled by zero padding.
inline ClusteringErrorReport clustering_error(std::span<const int> truth,
                                              std::span<const int> predicted) {
  if (truth.size() != predicted.size())
    throw InputError("clustering_error: label vectors differ in length");
  const int n = static_cast<int>(truth.size());
  if (n == 0) throw InputError("clustering_error: empty labelings");

  std::map<int, int> t_index, p_index;
  for (int l : truth)
    if (!t_index.count(l)) t_index[l] = static_cast<int>(t_index.size());
  for (int l : predicted)
    if (!p_index.count(l)) p_index[l] = static_cast<int>(p_index.size());

  const int k = std::max(static_cast<int>(t_index.size()), static_cast<int>(p_index.size()));
  Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < n; ++i) confusion(t_index[truth[i]], p_index[predicted[i]]) += 1.0;

  const std::vector<int> row_of_col = detail::hungarian_min_assignment(-confusion);

  double matched = 0.0;
  for (int j = 0; j < k; ++j) matched += confusion(row_of_col[j], j);

  ClusteringErrorReport report;
  report.ce_percent = 100.0 * (n - matched) / n;
  for (const auto& [plabel, pj] : p_index)
    for (const auto& [tlabel, ti] : t_index)
      if (row_of_col[pj] == ti) report.best_permutation[plabel] = tlabel;
  return report;
}

// ---------------------------------------------------------------------------
// Baseline samplers. Both reuse the MSSE/affinity machinery of the main
// pipeline so comparisons isolate the sampling distribution.
// ---------------------------------------------------------------------------

/// Build an affinity bundle from externally generated parameter vectors:
/// sigma per hypothesis via MSSE on the full-data residuals.
inline AffinityBundle bundle_from_hypotheses(const DataSet& data, const ModelKernel& kernel,
                                             std::vector<Hypothesis> hypotheses, int k, double t) {
  const int n = data.n();
  const int n_h = static_cast<int>(hypotheses.size());
  const double diameter = bounding_box_diameter(data.X);

  AffinityBundle bundle;
  bundle.H.resize(n, n_h);
  for (int i = 0; i < n_h; ++i) {
    auto& hyp = hypotheses[i];
    const Eigen::VectorXd r2 = kernel.residuals2_all(data.X, hyp.theta);
    Eigen::VectorXd sorted = r2;
    std::sort(sorted.data(), sorted.data() + sorted.size());
    const ScaleEstimate est = msse(sorted, k, t, kernel.scale_dof(hyp.theta));
    hyp.sigma = sigma_floor(est.sigma, diameter);
    bundle.H.col(i) = affinity_column(r2, hyp.sigma);
  }
  bundle.G = project_graph(bundle.H);
  bundle.hypotheses = std::move(hypotheses);
  return bundle;
}

/// Pure random sampling: each hypothesis is fit to a uniformly random
/// distinct (p+2)-tuple (size matched to CBS for fairness). Degenerate
/// tuples are redrawn.
inline AffinityBundle random_tuple_sampler(const DataSet& data, const ModelKernel& kernel,
                                           int n_h, int k, double t, Rng& rng) {
  const int n = data.n();
  const int h = kernel.tuple_size();
  if (n < h) throw InputError("random_tuple_sampler: fewer points than the tuple size");

  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, 1.0);
  std::vector<Hypothesis> hypotheses;
  hypotheses.reserve(n_h);
  for (int i = 0; i < n_h; ++i) {
    Hypothesis hyp;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 100)
        throw NumericalError("random_tuple_sampler: repeated degenerate tuples");
      hyp.tuple_indices = weighted_sample_without_replacement(uniform, h, rng);
      try {
        hyp.theta = kernel.fit(data.X, hyp.tuple_indices);
        break;
      } catch (const DegenerateTupleError&) {
      }
    }
    hypotheses.push_back(std::move(hyp));
  }
  return bundle_from_hypotheses(data, kernel, std::move(hypotheses), k, t);
}

/// Uniform parameter sampling for the 2D line kernel: (slope, intercept)
/// drawn i.i.d. from a box, converted to the canonical normal form.
inline std::vector<Eigen::VectorXd> uniform_parameter_sampler(
    const std::pair<double, double>& slope_range, const std::pair<double, double>& intercept_range,
    int n_h, Rng& rng) {
  if (slope_range.second < slope_range.first || intercept_range.second < intercept_range.first)
    throw InputError("uniform_parameter_sampler: invalid box");
  std::vector<Eigen::VectorXd> thetas;
  thetas.reserve(n_h);
  for (int i = 0; i < n_h; ++i) {
    const double a = rng.uniform(slope_range.first, slope_range.second);
    const double b = rng.uniform(intercept_range.first, intercept_range.second);
    const double s = std::sqrt(1.0 + a * a);
    thetas.push_back(canonicalize_line(Eigen::Vector3d(a / s, -1.0 / s, -b / s)));
  }
  return thetas;
}

}  // namespace cbs
