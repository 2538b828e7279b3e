#pragma once

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cbs/affinity.hpp"
#include "cbs/common.hpp"
#include "cbs/dataset.hpp"
#include "cbs/kernels.hpp"
#include "cbs/metrics.hpp"
#include "cbs/rng.hpp"
#include "cbs/sampler.hpp"
#include "cbs/spectral.hpp"

namespace cbs {

/// How the minimum structure size k is derived when not given explicitly.
/// `paper_min` is min(floor(0.1 N), 20); `floor20` is max(20, floor(0.1 N))
/// for users who want the scale estimator's small-sample floor respected on
/// small datasets.
enum class KPolicy { paper_min, floor20 };

struct PipelineConfig {
  KernelKind kernel = KernelKind::line2d;
  int k = 0;  // 0 = derive from k_policy
  KPolicy k_policy = KPolicy::paper_min;
  int n_c = 1;        // number of clusters requested from spectral clustering
  int n_hypotheses = 500;
  double t = 2.5;
  std::uint64_t seed = 0;
  double subset_frac = 0.0;  // 0 = 1/n_c
  double subspace_energy = 0.99;
  /// false removes the sub-sampling strategy (subset draw and weight
  /// updates), the CBS-nSS ablation.
  bool subsampling = true;

  int resolve_k(int n) const {
    if (k > 0) return k;
    const int tenth = static_cast<int>(std::floor(0.1 * n));
    return k_policy == KPolicy::paper_min ? std::min(tenth, 20) : std::max(tenth, 20);
  }

  int resolve_subset_size(int n) const {
    const double frac = subset_frac > 0.0 ? subset_frac : 1.0 / static_cast<double>(n_c);
    return static_cast<int>(std::floor(frac * n));
  }
};

/// Draw a subset of N_s distinct points with inclusion probability
/// proportional to the weights (renormalized internally). Systematic PPS
/// sampling keeps the inclusion probabilities exactly proportional; points
/// whose share reaches 1 are always included, and when fewer than N_s
/// points carry positive weight the remainder is drawn uniformly from the
/// zero-weight points. Returns the sorted indices and their weights
/// renormalized to sum 1.
inline std::pair<std::vector<int>, Eigen::VectorXd> sample_data(const Eigen::VectorXd& weights,
                                                                int subset_size, Rng& rng) {
  const int n = static_cast<int>(weights.size());
  if (subset_size > n) throw InputError("sample_data: subset larger than dataset");
  if (weights.minCoeff() < 0.0) throw InputError("sample_data: negative weight");

  std::vector<int> picked;
  picked.reserve(subset_size);
  std::vector<int> active;
  for (int i = 0; i < n; ++i)
    if (weights[i] > 0.0) active.push_back(i);

  int remaining = subset_size;
  double active_mass = 0.0;
  for (int i : active) active_mass += weights[i];

  // Move certainty selections (share >= 1) out until stable.
  for (bool changed = true; changed && remaining > 0 && !active.empty();) {
    changed = false;
    std::vector<int> still;
    for (int i : active) {
      if (remaining > 0 && weights[i] * remaining >= active_mass) {
        picked.push_back(i);
        active_mass -= weights[i];
        --remaining;
        changed = true;
      } else {
        still.push_back(i);
      }
    }
    active.swap(still);
  }

  if (remaining > 0 && !active.empty() && active_mass > 0.0) {
    // Systematic pass in randomized order: ticks at u, u+1, ...,
    // u+remaining-1 over the cumulative shares (all shares < 1, so
    // selections are distinct). The shuffle decorrelates successive draws;
    // inclusion probabilities stay exactly proportional either way.
    for (int i = static_cast<int>(active.size()) - 1; i > 0; --i)
      std::swap(active[i], active[rng.uniform_int(i + 1)]);
    const double u = rng.uniform();
    double cum = 0.0;
    double tick = u;
    for (int i : active) {
      cum += weights[i] * remaining / active_mass;
      while (tick < cum && static_cast<int>(picked.size()) < subset_size) {
        picked.push_back(i);
        tick += 1.0;
      }
    }
    // Round-off can starve the last tick; top up from unpicked actives.
    for (auto it = active.rbegin();
         static_cast<int>(picked.size()) < subset_size && it != active.rend(); ++it)
      if (std::find(picked.begin(), picked.end(), *it) == picked.end()) picked.push_back(*it);
  }

  if (static_cast<int>(picked.size()) < subset_size) {
    std::vector<int> zeros;
    for (int i = 0; i < n; ++i)
      if (weights[i] <= 0.0) zeros.push_back(i);
    while (static_cast<int>(picked.size()) < subset_size) {
      const int j = rng.uniform_int(static_cast<int>(zeros.size()));
      picked.push_back(zeros[j]);
      zeros.erase(zeros.begin() + j);
    }
  }

  std::sort(picked.begin(), picked.end());
  Eigen::VectorXd w(subset_size);
  for (int i = 0; i < subset_size; ++i) w[i] = weights[picked[i]];
  const double total = w.sum();
  if (total > 0.0) w /= total;
  else w.setConstant(1.0 / subset_size);
  return {std::move(picked), std::move(w)};
}

/// Inclusion-weight update, the four steps applied in order:
/// W *= 2; W(inliers) /= 4; W(W > cap) = 1/N; W /= sum(W).
inline Eigen::VectorXd update_weights(const Eigen::VectorXd& weights,
                                      const std::vector<int>& inliers, double cap) {
  const auto n = weights.size();
  Eigen::VectorXd w = weights * 2.0;
  for (int i : inliers) {
    if (i < 0 || i >= n) throw InputError("update_weights: inlier index out of range");
    w[i] /= 4.0;
  }
  w = (w.array() > cap).select(1.0 / static_cast<double>(n), w);
  return w / w.sum();
}

struct PhaseTimings {
  double sampling_ms = 0.0;
  double graph_ms = 0.0;
  double clustering_ms = 0.0;
  double total_ms = 0.0;
};

struct PipelineResult {
  Labeling labeling;
  AffinityBundle bundle;
  std::optional<ClusteringErrorReport> ce;
  PhaseTimings timings;
  int effective_k = 0;
  int subset_size = 0;
};

/// The full CBS pipeline: n_H rounds of { weighted subset draw, greedy
/// sample generation, residuals of the final model against all points,
/// affinity column, inlier-driven weight update }, then graph projection
/// and spectral clustering. Clustering error is attached when the dataset
/// carries ground-truth labels.
inline PipelineResult run_pipeline(const DataSet& data, const PipelineConfig& config) {
  using clock = std::chrono::steady_clock;
  const auto ms_since = [](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };

  data.validate();
  const auto kernel = make_kernel(config.kernel, config.subspace_energy);
  kernel->check_data(data);

  const int n = data.n();
  if (config.n_hypotheses < 1) throw InputError("pipeline: need at least one hypothesis");
  if (config.n_c < 1) throw InputError("pipeline: need at least one cluster");

  SamplerConfig sampler_cfg;
  sampler_cfg.k = config.resolve_k(n);
  sampler_cfg.h = kernel->tuple_size();
  sampler_cfg.t = config.t;

  const int subset_size = config.subsampling ? config.resolve_subset_size(n) : n;
  if (subset_size <= sampler_cfg.k)
    throw InputError("pipeline: subset size N_s must exceed k (reduce k or n_c)");
  sampler_cfg.validate(subset_size, kernel->param_count());

  const double cap = 20.0 / static_cast<double>(n);
  Eigen::VectorXd weights = Eigen::VectorXd::Constant(n, 1.0 / n);

  Rng master(config.seed);
  Rng rng_sampling = master.spawn(1);
  Rng rng_clustering = master.spawn(2);

  PipelineResult result;
  result.effective_k = sampler_cfg.k;
  result.subset_size = subset_size;
  result.bundle.H.resize(n, config.n_hypotheses);
  result.bundle.hypotheses.reserve(config.n_hypotheses);

  const auto t_start = clock::now();

  std::vector<int> all_indices(n);
  std::iota(all_indices.begin(), all_indices.end(), 0);

  for (int i = 0; i < config.n_hypotheses; ++i) {
    std::vector<int> subset = all_indices;
    Eigen::VectorXd subset_weights = weights;
    Eigen::MatrixXd x_subset;
    const Eigen::MatrixXd& x_ref = config.subsampling ? x_subset : data.X;

    SampleResult sample;
    int attempts = 0;
    for (;;) {
      if (config.subsampling && attempts % 5 == 0) {
        // A fresh subset every few failed initializations.
        auto [idx, w] = sample_data(weights, subset_size, rng_sampling);
        subset = std::move(idx);
        subset_weights = std::move(w);
        x_subset = data.X(Eigen::all, subset);
      }
      try {
        sample = generate_sample(x_ref, sampler_cfg, subset_weights, *kernel, rng_sampling);
        break;
      } catch (const SampleFailure&) {
        if (++attempts > 50)
          throw NumericalError("pipeline: hypothesis " + std::to_string(i) +
                               ": repeated sample failures");
      }
    }

    const Eigen::VectorXd r2_all = kernel->residuals2_all(data.X, sample.theta);
    result.bundle.H.col(i) = affinity_column(r2_all, sample.sigma);

    if (config.subsampling) {
      const double bound = config.t * config.t * sample.sigma * sample.sigma;
      std::vector<int> inliers;
      for (int j = 0; j < n; ++j)
        if (r2_all[j] < bound) inliers.push_back(j);
      weights = update_weights(weights, inliers, cap);
    }

    Hypothesis hyp;
    hyp.theta = sample.theta;
    hyp.sigma = sample.sigma;
    hyp.converged = sample.converged;
    hyp.tuple_indices.reserve(sample.tuple.size());
    for (int local : sample.tuple) hyp.tuple_indices.push_back(subset[local]);
    result.bundle.hypotheses.push_back(std::move(hyp));
  }
  result.timings.sampling_ms = ms_since(t_start);

  const auto t_graph = clock::now();
  result.bundle.G = project_graph(result.bundle.H);
  result.timings.graph_ms = ms_since(t_graph);

  const auto t_cluster = clock::now();
  result.labeling = spectral_clustering(result.bundle.G, config.n_c, rng_clustering);
  result.timings.clustering_ms = ms_since(t_cluster);
  result.timings.total_ms = ms_since(t_start);

  if (data.has_labels()) result.ce = clustering_error(data.labels, result.labeling.labels);
  return result;
}

}  // namespace cbs
