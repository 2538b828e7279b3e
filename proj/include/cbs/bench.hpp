#pragma once

#include <chrono>
#include <string>
#include <utility>

#include "cbs/metrics.hpp"
#include "cbs/pipeline.hpp"

namespace cbs {

/// One benchmark run of a sampler + clustering, in the shape the compare
/// command and the sweep experiments consume.
struct BenchRecord {
  std::string sampler_name;
  int n_hypotheses = 0;
  std::uint64_t seed = 0;
  double ce_percent = -1.0;  // -1 when the dataset has no ground truth
  double wall_time_ms = 0.0;
  PhaseTimings timings;
};

inline BenchRecord bench_cbs(const DataSet& data, PipelineConfig config) {
  config.subsampling = true;
  const PipelineResult res = run_pipeline(data, config);
  return {"cbs", config.n_hypotheses, config.seed, res.ce ? res.ce->ce_percent : -1.0,
          res.timings.total_ms, res.timings};
}

/// CBS without the sub-sampling strategy (subset draw and weight updates
/// removed).
inline BenchRecord bench_cbs_nss(const DataSet& data, PipelineConfig config) {
  config.subsampling = false;
  const PipelineResult res = run_pipeline(data, config);
  return {"cbs-nss", config.n_hypotheses, config.seed, res.ce ? res.ce->ce_percent : -1.0,
          res.timings.total_ms, res.timings};
}

namespace detail {

inline BenchRecord cluster_bundle(const std::string& name, const DataSet& data,
                                  AffinityBundle bundle, const PipelineConfig& config,
                                  double sampling_ms,
                                  std::chrono::steady_clock::time_point t_start) {
  using clock = std::chrono::steady_clock;
  const auto ms_since = [](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };

  BenchRecord rec;
  rec.sampler_name = name;
  rec.n_hypotheses = config.n_hypotheses;
  rec.seed = config.seed;
  rec.timings.sampling_ms = sampling_ms;

  const auto t_graph = clock::now();
  bundle.G = project_graph(bundle.H);
  rec.timings.graph_ms = ms_since(t_graph);

  Rng rng_clustering = Rng(config.seed).spawn(2);
  const auto t_cluster = clock::now();
  const Labeling labeling = spectral_clustering(bundle.G, config.n_c, rng_clustering);
  rec.timings.clustering_ms = ms_since(t_cluster);
  rec.timings.total_ms = ms_since(t_start);
  rec.wall_time_ms = rec.timings.total_ms;

  if (data.has_labels()) rec.ce_percent = clustering_error(data.labels, labeling.labels).ce_percent;
  return rec;
}

}  // namespace detail

/// Random-tuple baseline: same tuple size, same scale estimation and
/// clustering as CBS; only the sampling distribution differs.
inline BenchRecord bench_random(const DataSet& data, const PipelineConfig& config) {
  using clock = std::chrono::steady_clock;
  const auto kernel = make_kernel(config.kernel, config.subspace_energy);
  kernel->check_data(data);
  Rng rng = Rng(config.seed).spawn(1);

  const auto t_start = clock::now();
  AffinityBundle bundle = random_tuple_sampler(data, *kernel, config.n_hypotheses,
                                               config.resolve_k(data.n()), config.t, rng);
  const double sampling_ms =
      std::chrono::duration<double, std::milli>(clock::now() - t_start).count();
  return detail::cluster_bundle("random", data, std::move(bundle), config, sampling_ms, t_start);
}

/// Uniform parameter-box baseline (2D lines only).
inline BenchRecord bench_uniform(const DataSet& data, const PipelineConfig& config,
                                 std::pair<double, double> slope_range = {-10.0, 10.0},
                                 std::pair<double, double> intercept_range = {-10.0, 10.0}) {
  using clock = std::chrono::steady_clock;
  if (config.kernel != KernelKind::line2d)
    throw InputError("uniform parameter sampling is defined for the line2d kernel only");
  const auto kernel = make_kernel(config.kernel);
  kernel->check_data(data);
  Rng rng = Rng(config.seed).spawn(1);

  const auto t_start = clock::now();
  std::vector<Hypothesis> hypotheses;
  for (auto& theta :
       uniform_parameter_sampler(slope_range, intercept_range, config.n_hypotheses, rng)) {
    Hypothesis hyp;
    hyp.theta = std::move(theta);
    hypotheses.push_back(std::move(hyp));
  }
  AffinityBundle bundle = bundle_from_hypotheses(data, *kernel, std::move(hypotheses),
                                                 config.resolve_k(data.n()), config.t);
  const double sampling_ms =
      std::chrono::duration<double, std::milli>(clock::now() - t_start).count();
  return detail::cluster_bundle("uniform", data, std::move(bundle), config, sampling_ms, t_start);
}

}  // namespace cbs
