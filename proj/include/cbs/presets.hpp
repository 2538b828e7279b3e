#pragma once

#include "cbs/pipeline.hpp"
#include "cbs/synthetic.hpp"

namespace cbs {

// Benchmark pipeline configurations for the named synthetic presets. The
// cluster count includes one extra cluster that collects the gross
// outliers; k is set from the known smallest planted structure where the
// preset defines one (k is the minimum acceptable structure size, which is
// known by construction for synthetic data).

/// Four-line preset: 4 x 100 points, 50 outliers, n_H = 500.
inline PipelineConfig four_line_benchmark_config(std::uint64_t seed = 0) {
  PipelineConfig config;
  config.kernel = KernelKind::line2d;
  config.n_c = 5;
  config.n_hypotheses = 500;
  config.k = 75;  // structures have 100 points each
  config.t = 3.5;
  config.subset_frac = 1.0;  // every structure keeps >= k points per run
  config.seed = seed;
  return config;
}

/// Two-view checkerboard-like preset: motions of 100/99/81 points plus 99
/// outliers; the k-study configuration of the benchmark harness.
inline PipelineConfig checkerboard_benchmark_config(std::uint64_t seed = 0, int k = 20) {
  PipelineConfig config;
  config.kernel = KernelKind::fundamental;
  config.n_c = 4;
  config.n_hypotheses = 100;
  config.k = k;
  config.t = 3.0;
  config.subset_frac = 0.5;
  config.seed = seed;
  return config;
}

/// Three-motion preset: 3 x 100 correspondences plus 50 outliers.
inline PipelineConfig three_motion_benchmark_config(std::uint64_t seed = 0) {
  PipelineConfig config;
  config.kernel = KernelKind::fundamental;
  config.n_c = 4;
  config.n_hypotheses = 200;
  config.k = 20;
  config.t = 3.0;
  config.subset_frac = 0.5;
  config.seed = seed;
  return config;
}

/// Trajectory-subspace preset: ranks {2,3,4} x 100 points plus 50 outlier
/// trajectories.
inline PipelineConfig subspace_benchmark_config(std::uint64_t seed = 0) {
  PipelineConfig config;
  config.kernel = KernelKind::subspace;
  config.n_c = 4;
  config.n_hypotheses = 300;
  config.seed = seed;
  return config;
}

}  // namespace cbs
