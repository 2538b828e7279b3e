#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "cbs/common.hpp"
#include "cbs/dataset.hpp"
#include "cbs/kernels.hpp"
#include "cbs/rng.hpp"
#include "cbs/scale.hpp"

namespace cbs {

struct SamplerConfig {
  int k = 20;        // minimum structure size, k >= h and k > p
  int h = 4;         // tuple size, p + 2
  int l_max = 50;    // iteration cap of the greedy update
  double t = 2.5;    // MSSE inlier threshold constant, in [2.0, 3.5]
  /// Consecutive iterations the stopping criterion must hold before the
  /// update is declared converged; guards against one-off coincidences.
  int stop_consecutive = 4;

  void validate(int n_points, int p) const {
    if (t < 2.0 || t > 3.5) throw InputError("sampler: T must lie in [2.0, 3.5]");
    if (h < 2) throw InputError("sampler: tuple size must be >= 2");
    if (k < h) throw InputError("sampler: k must be at least the tuple size h");
    if (k <= p) throw InputError("sampler: k must exceed the model dof");
    if (l_max < 3) throw InputError("sampler: l_max must be >= 3");
    if (stop_consecutive < 1) throw InputError("sampler: stop_consecutive must be >= 1");
    if (n_points <= k) throw InputError("sampler: need more than k data points");
  }
};

/// Ascending squared residuals plus the permutation from sorted rank to the
/// original data index. Ties keep ascending original index.
struct SortedResiduals {
  Eigen::VectorXd r2_sorted;
  std::vector<int> index_of;
};

inline SortedResiduals sorted_residuals_of(const Eigen::VectorXd& r2) {
  const int n = static_cast<int>(r2.size());
  SortedResiduals out;
  out.index_of.resize(n);
  std::iota(out.index_of.begin(), out.index_of.end(), 0);
  std::sort(out.index_of.begin(), out.index_of.end(), [&](int a, int b) {
    return r2[a] != r2[b] ? r2[a] < r2[b] : a < b;
  });
  out.r2_sorted.resize(n);
  for (int i = 0; i < n; ++i) out.r2_sorted[i] = r2[out.index_of[i]];
  return out;
}

inline SortedResiduals sorted_residuals(const Eigen::MatrixXd& x, const Eigen::VectorXd& theta,
                                        const ModelKernel& kernel) {
  return sorted_residuals_of(kernel.residuals2_all(x, theta));
}

/// LkOS cost: sum of the h sorted squared residuals at ranks k-h+1 ... k
/// (1-based), the window the greedy update re-selects. Diagnostic only.
inline double lkos_cost(const SortedResiduals& sorted, int k, int h) {
  const int n = static_cast<int>(sorted.r2_sorted.size());
  if (k > n) throw InputError("lkos_cost: k exceeds the number of residuals");
  if (h < 1 || h > k) throw InputError("lkos_cost: window must satisfy 1 <= h <= k");
  return sorted.r2_sorted.segment(k - h, h).sum();
}

namespace detail {

/// One evaluation of the two-look-back criterion on precomputed residuals
/// of the current model: the k-th sorted squared residual reaches the mean
/// squared residual (under the current model) of both previous tuples,
/// meaning those points fit at least as well as the assumed k-point inlier
/// band. Non-strict so exact-fit data (all residuals zero) converges.
inline bool stop_fired(const Eigen::VectorXd& r2_unsorted, double r2_at_k,
                       std::span<const int> tuple_prev1, std::span<const int> tuple_prev2) {
  const auto mean_of = [&](std::span<const int> tuple) {
    double s = 0.0;
    for (int i : tuple) s += r2_unsorted[i];
    return s / static_cast<double>(tuple.size());
  };
  return r2_at_k >= mean_of(tuple_prev1) && r2_at_k >= mean_of(tuple_prev2);
}

}  // namespace detail

/// Stopping criterion of the greedy update, evaluated for one iterate: true
/// iff the k-th sorted squared residual under theta_l reaches the mean
/// squared residual (also under theta_l) of both the (l-1)- and (l-2)-tuple
/// points. The sampler requires this to hold on two consecutive iterates
/// before it declares convergence, which ties three successive samples to
/// the same structure and rejects one-off coincidences.
inline bool check_stop(const Eigen::MatrixXd& x, const Eigen::VectorXd& theta_l,
                       std::span<const int> tuple_prev1, std::span<const int> tuple_prev2,
                       int k, const ModelKernel& kernel) {
  if (tuple_prev1.empty() || tuple_prev2.empty())
    throw InputError("check_stop: needs two previous tuples");
  const Eigen::VectorXd r2 = kernel.residuals2_all(x, theta_l);
  if (k > r2.size()) throw InputError("check_stop: k exceeds the number of points");
  Eigen::VectorXd sorted = r2;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  return detail::stop_fired(r2, sorted[k - 1], tuple_prev1, tuple_prev2);
}

/// Weighted sampling without replacement: `count` distinct indices, each
/// draw proportional to the remaining weights. When fewer than `count`
/// positive-weight entries exist, the remainder is drawn uniformly from the
/// zero-weight entries.
inline std::vector<int> weighted_sample_without_replacement(const Eigen::VectorXd& weights,
                                                            int count, Rng& rng) {
  const int n = static_cast<int>(weights.size());
  if (count > n) throw InputError("cannot sample more points than available");
  if (weights.minCoeff() < 0.0) throw InputError("weights must be nonnegative");

  std::vector<double> w(weights.data(), weights.data() + n);
  std::vector<int> picked;
  picked.reserve(count);
  double total = std::accumulate(w.begin(), w.end(), 0.0);

  while (static_cast<int>(picked.size()) < count && total > 0.0) {
    const double u = rng.uniform() * total;
    double cum = 0.0;
    int choice = -1;
    for (int i = 0; i < n; ++i) {
      if (w[i] <= 0.0) continue;
      cum += w[i];
      if (u < cum) {
        choice = i;
        break;
      }
      choice = i;  // guards against round-off at the top end
    }
    picked.push_back(choice);
    total -= w[choice];
    w[choice] = 0.0;
  }

  if (static_cast<int>(picked.size()) < count) {
    std::vector<int> zeros;
    for (int i = 0; i < n; ++i)
      if (w[i] <= 0.0 && std::find(picked.begin(), picked.end(), i) == picked.end())
        zeros.push_back(i);
    while (static_cast<int>(picked.size()) < count) {
      const int j = rng.uniform_int(static_cast<int>(zeros.size()));
      picked.push_back(zeros[j]);
      zeros.erase(zeros.begin() + j);
    }
  }
  return picked;
}

/// Per-iteration record for instrumentation of the greedy update.
struct SampleTraceStep {
  Eigen::VectorXd theta;         // model whose residual sort produced the window
  std::vector<int> rank_window;  // sorted indices at ranks k-h+1..k under theta
  std::vector<int> tuple;        // tuple actually fitted next
  bool degenerate_resampled = false;
};

struct SampleTrace {
  std::vector<SampleTraceStep> steps;
};

struct SampleResult {
  Eigen::VectorXd theta;
  std::vector<int> tuple;  // indices into the sampled data
  double sigma = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Greedy LkOS sample generation: start from a weighted h-tuple, then
/// repeatedly fit, sort all residuals and re-select the h points at sorted
/// ranks k-h+1..k, until the two-look-back criterion fires or l_max is
/// reached. The returned sigma is the MSSE estimate on this data (floored
/// relative to the data diameter).
inline SampleResult generate_sample(const Eigen::MatrixXd& x, const SamplerConfig& cfg,
                                    const Eigen::VectorXd& weights, const ModelKernel& kernel,
                                    Rng& rng, SampleTrace* trace = nullptr) {
  const int n = static_cast<int>(x.cols());
  cfg.validate(n, kernel.param_count());
  if (weights.size() != n) throw InputError("generate_sample: weight size mismatch");
  if (weights.sum() <= 0.0) throw InputError("generate_sample: weights must not all be zero");

  constexpr int max_consecutive_degenerate = 10;
  int consecutive_degenerate = 0;

  // Initial tuple: weighted draw; degenerate fits get a fresh weighted draw.
  std::vector<int> tuple;
  Eigen::VectorXd theta;
  for (;;) {
    tuple = weighted_sample_without_replacement(weights, cfg.h, rng);
    std::sort(tuple.begin(), tuple.end());
    try {
      theta = kernel.fit(x, tuple);
      break;
    } catch (const DegenerateTupleError&) {
      if (++consecutive_degenerate > max_consecutive_degenerate)
        throw SampleFailure("generate_sample: repeated degenerate initial tuples");
    }
  }
  consecutive_degenerate = 0;

  std::vector<std::vector<int>> history{tuple};
  SampleResult res;
  SortedResiduals sorted;
  Eigen::VectorXd r2;

  int l = 0;
  int consecutive_fires = 0;
  for (;;) {
    r2 = kernel.residuals2_all(x, theta);
    sorted = sorted_residuals_of(r2);

    if (l >= 2) {
      if (detail::stop_fired(r2, sorted.r2_sorted[cfg.k - 1], history[l - 1], history[l - 2]))
        ++consecutive_fires;
      else
        consecutive_fires = 0;
      if (consecutive_fires >= cfg.stop_consecutive) {
        res.converged = true;
        break;
      }
    }
    if (l >= cfg.l_max) break;

    // Next tuple: points at sorted ranks k-h+1 .. k.
    std::vector<int> next(sorted.index_of.begin() + (cfg.k - cfg.h),
                          sorted.index_of.begin() + cfg.k);
    if (trace) trace->steps.push_back({theta, next, next, false});

    Eigen::VectorXd next_theta;
    for (;;) {
      try {
        next_theta = kernel.fit(x, next);
        consecutive_degenerate = 0;
        break;
      } catch (const DegenerateTupleError&) {
        if (++consecutive_degenerate > max_consecutive_degenerate)
          throw SampleFailure("generate_sample: repeated degenerate tuples");
        ++l;  // degenerate refits count toward l_max
        if (l >= cfg.l_max) break;
        // Resample uniformly among the k best-ranked points and retry.
        Eigen::VectorXd head_w = Eigen::VectorXd::Zero(n);
        for (int r = 0; r < cfg.k; ++r) head_w[sorted.index_of[r]] = 1.0;
        next = weighted_sample_without_replacement(head_w, cfg.h, rng);
        if (trace && !trace->steps.empty()) {
          trace->steps.back().tuple = next;
          trace->steps.back().degenerate_resampled = true;
        }
      }
    }
    if (next_theta.size() == 0) break;  // l_max hit while resampling

    theta = next_theta;
    tuple = next;
    history.push_back(tuple);
    ++l;
  }

  res.theta = theta;
  res.tuple = tuple;
  res.iterations = l;
  const ScaleEstimate scale =
      msse(sorted.r2_sorted, cfg.k, cfg.t, kernel.scale_dof(theta));
  res.sigma = sigma_floor(scale.sigma, bounding_box_diameter(x));
  return res;
}

}  // namespace cbs
