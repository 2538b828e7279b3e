#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "cbs/sampler.hpp"
#include "cbs/synthetic.hpp"
#include "oracles.hpp"

using namespace cbs;

namespace {

/// Single line with 100 inliers (sigma 0.02) and 20 box outliers.
LineScene single_line_scene(std::uint64_t seed, double noise = 0.02, int inliers = 100,
                            int outliers = 20) {
  LineSceneSpec spec;
  spec.structures = {{{-10.0, -6.0}, {10.0, 4.0}, inliers, noise}};
  spec.outlier_count = outliers;
  spec.seed = seed;
  return gen_lines(spec);
}

}  // namespace

TEST(SortedResiduals, AllZerosStablePermutation) {
  const Eigen::VectorXd r2 = Eigen::VectorXd::Zero(6);
  const SortedResiduals s = sorted_residuals_of(r2);
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(s.index_of[i], i);
    EXPECT_EQ(s.r2_sorted[i], 0.0);
  }
}

TEST(SortedResiduals, HandSort) {
  Eigen::VectorXd r2(3);
  r2 << 4.0, 1.0, 9.0;
  const SortedResiduals s = sorted_residuals_of(r2);
  EXPECT_EQ(s.index_of, (std::vector<int>{1, 0, 2}));
  EXPECT_EQ(s.r2_sorted[0], 1.0);
  EXPECT_EQ(s.r2_sorted[1], 4.0);
  EXPECT_EQ(s.r2_sorted[2], 9.0);
}

TEST(SortedResiduals, MatchesInsertionSortOracle) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + rng.uniform_int(40);
    Eigen::VectorXd r2(n);
    for (int i = 0; i < n; ++i) r2[i] = rng.uniform_int(8);  // plenty of ties
    const SortedResiduals s = sorted_residuals_of(r2);

    // Insertion sort on (value, index) pairs.
    std::vector<std::pair<double, int>> pairs;
    for (int i = 0; i < n; ++i) pairs.emplace_back(r2[i], i);
    for (std::size_t i = 1; i < pairs.size(); ++i) {
      auto key = pairs[i];
      std::size_t j = i;
      while (j > 0 && (pairs[j - 1].first > key.first ||
                       (pairs[j - 1].first == key.first && pairs[j - 1].second > key.second))) {
        pairs[j] = pairs[j - 1];
        --j;
      }
      pairs[j] = key;
    }
    for (int i = 0; i < n; ++i) {
      EXPECT_EQ(s.r2_sorted[i], pairs[i].first);
      EXPECT_EQ(s.index_of[i], pairs[i].second);
    }
  }
}

TEST(LkosCost, ExactStructureZero) {
  Eigen::VectorXd r2 = Eigen::VectorXd::Zero(30);
  r2.tail(5).setConstant(50.0);
  const SortedResiduals s = sorted_residuals_of(r2);
  EXPECT_EQ(lkos_cost(s, 20, 4), 0.0);
}

TEST(LkosCost, HandWindowSum) {
  Eigen::VectorXd r2(5);
  r2 << 1, 2, 3, 4, 5;
  EXPECT_EQ(lkos_cost(sorted_residuals_of(r2), 4, 2), 7.0);
}

TEST(LkosCost, MatchesBruteForceWindow) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 10 + rng.uniform_int(50);
    Eigen::VectorXd r2(n);
    for (int i = 0; i < n; ++i) r2[i] = rng.uniform(0, 100);
    const int k = 4 + rng.uniform_int(n - 4);
    const int h = 1 + rng.uniform_int(std::min(k, 6));

    // Brute force: selection sort a copy, sum ranks k-h+1..k.
    std::vector<double> v(r2.data(), r2.data() + n);
    for (int i = 0; i < n; ++i) {
      int m = i;
      for (int j = i + 1; j < n; ++j)
        if (v[j] < v[m]) m = j;
      std::swap(v[i], v[m]);
    }
    double expected = 0.0;
    for (int r = k - h; r < k; ++r) expected += v[r];

    EXPECT_NEAR(lkos_cost(sorted_residuals_of(r2), k, h), expected, 1e-9);
  }
}

TEST(LkosCost, ParameterError) {
  Eigen::VectorXd r2(5);
  r2 << 1, 2, 3, 4, 5;
  EXPECT_THROW(lkos_cost(sorted_residuals_of(r2), 6, 2), InputError);
}

TEST(CheckStop, SameStructureTuplesFire) {
  const LineScene scene = single_line_scene(17, 0.02, 100, 20);
  Line2DKernel kernel;
  // theta fitted from a structure tuple; both recent tuples also from the
  // structure (labels 1 occupy the first 100 columns).
  const std::vector<int> generating{1, 25, 60, 90};
  const std::vector<int> previous{20, 30, 40, 50};
  const Eigen::VectorXd theta = kernel.fit(scene.data.X, generating);
  EXPECT_TRUE(check_stop(scene.data.X, theta, generating, previous, 20, kernel));
}

TEST(CheckStop, JunkHypothesisWithoutSupportDoesNotFire) {
  // A model fitted to gross outliers explains its own tuple well but has no
  // k-point support: the k-th residual dwarfs the tuple means.
  const LineScene scene = single_line_scene(18, 0.02, 100, 20);
  Line2DKernel kernel;
  // Outlier columns are 100..119.
  const std::vector<int> junk{100, 104, 109, 114};
  Eigen::VectorXd theta;
  try {
    theta = kernel.fit(scene.data.X, junk);
  } catch (const DegenerateTupleError&) {
    GTEST_SKIP() << "outlier tuple happened to be degenerate";
  }
  const Eigen::VectorXd r2 = kernel.residuals2_all(scene.data.X, theta);
  Eigen::VectorXd sorted = r2;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  double tuple_mean = 0.0;
  for (int i : junk) tuple_mean += r2[i] / 4.0;
  ASSERT_GT(sorted[19], tuple_mean);  // no 20-point support at tuple level

  EXPECT_FALSE(check_stop(scene.data.X, theta, junk, junk, 20, kernel));
}

TEST(CheckStop, MonotoneInTupleMeans) {
  // Replacing either tuple by one with pointwise larger residuals cannot
  // flip the criterion from true to false.
  Line2DKernel kernel;
  for (int trial = 0; trial < 100; ++trial) {
    const LineScene scene = single_line_scene(100 + trial, 0.05, 60, 15);
    const std::vector<int> generating{3, 17, 31, 45};
    const Eigen::VectorXd theta = kernel.fit(scene.data.X, generating);
    const std::vector<int> previous{5, 20, 35, 50};
    if (!check_stop(scene.data.X, theta, generating, previous, 20, kernel)) continue;

    // Swap the previous tuple for the four worst structure points.
    const Eigen::VectorXd r2 = kernel.residuals2_all(scene.data.X, theta);
    std::vector<int> order(scene.data.n());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return r2[a] > r2[b]; });
    const std::vector<int> worse(order.begin(), order.begin() + 4);
    EXPECT_TRUE(check_stop(scene.data.X, theta, generating, worse, 20, kernel));
  }
}

TEST(CheckStop, RequiresTwoPriorTuples) {
  const LineScene scene = single_line_scene(21);
  Line2DKernel kernel;
  const Eigen::VectorXd theta = kernel.fit(scene.data.X, std::vector<int>{0, 1, 2, 3});
  EXPECT_THROW(check_stop(scene.data.X, theta, {}, {}, 20, kernel), InputError);
}

TEST(CheckStop, SingleLineMonteCarloConvergence) {
  // 100 inliers (sigma 0.02) + 20 outliers: the stop criterion fires within
  // l_max in at least 95 of 100 seeded runs.
  Line2DKernel kernel;
  SamplerConfig cfg;
  cfg.k = 20;
  cfg.h = 4;
  int converged = 0;
  for (int seed = 0; seed < 100; ++seed) {
    const LineScene scene = single_line_scene(seed);
    Rng rng(seed);
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(scene.data.n(), 1.0 / scene.data.n());
    const SampleResult res = generate_sample(scene.data.X, cfg, w, kernel, rng);
    if (res.converged) ++converged;
  }
  EXPECT_GE(converged, 95);
}

TEST(GenerateSample, ExactLineConvergesImmediately) {
  LineSceneSpec spec;
  spec.structures = {{{-10.0, -10.0}, {10.0, 10.0}, 60, 0.0}};
  spec.seed = 5;
  const LineScene scene = gen_lines(spec);

  Line2DKernel kernel;
  SamplerConfig cfg;
  cfg.k = 20;
  cfg.h = 4;
  Rng rng(1);
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(60, 1.0 / 60.0);
  const SampleResult res = generate_sample(scene.data.X, cfg, w, kernel, rng);

  EXPECT_TRUE(res.converged);
  EXPECT_LE(res.iterations, 3);
  // Sigma is the floor: 1e-9 times the data diameter.
  EXPECT_DOUBLE_EQ(res.sigma, 1e-9 * bounding_box_diameter(scene.data.X));
  for (int i : res.tuple) {
    EXPECT_GE(i, 0);
    EXPECT_LT(i, 60);
  }
  std::set<int> distinct(res.tuple.begin(), res.tuple.end());
  EXPECT_EQ(distinct.size(), res.tuple.size());
}

TEST(GenerateSample, KLargerThanSubsetIsParameterError) {
  const LineScene scene = single_line_scene(9, 0.02, 30, 0);
  Line2DKernel kernel;
  SamplerConfig cfg;
  cfg.k = 30;  // |data| = 30 is not > k
  cfg.h = 4;
  Rng rng(2);
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(30, 1.0 / 30.0);
  EXPECT_THROW(generate_sample(scene.data.X, cfg, w, kernel, rng), InputError);
}

TEST(GenerateSample, DeterministicGivenSeed) {
  const LineScene scene = single_line_scene(33);
  Line2DKernel kernel;
  SamplerConfig cfg;
  cfg.k = 20;
  cfg.h = 4;
  const Eigen::VectorXd w =
      Eigen::VectorXd::LinSpaced(scene.data.n(), 1.0, 2.0).normalized().cwiseAbs();

  Rng rng1(123), rng2(123);
  const SampleResult a = generate_sample(scene.data.X, cfg, w, kernel, rng1);
  const SampleResult b = generate_sample(scene.data.X, cfg, w, kernel, rng2);
  EXPECT_EQ(a.tuple, b.tuple);
  EXPECT_EQ(a.converged, b.converged);
  EXPECT_EQ(a.theta, b.theta);
  EXPECT_EQ(a.sigma, b.sigma);
}

TEST(GenerateSample, RankWindowInvariant) {
  // Every re-selected tuple is exactly the points at sorted ranks k-h+1..k
  // of the residuals of the recorded model (unless a degenerate refit forced
  // a uniform resample).
  Line2DKernel kernel;
  SamplerConfig cfg;
  cfg.k = 10;
  cfg.h = 4;
  int checked_steps = 0;
  for (int seed = 0; seed < 300; ++seed) {
    const LineScene scene = single_line_scene(seed, 0.05, 24, 8);
    Rng rng(seed * 7 + 1);
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(scene.data.n(), 1.0 / scene.data.n());
    SampleTrace trace;
    const SampleResult res = generate_sample(scene.data.X, cfg, w, kernel, rng, &trace);
    (void)res;
    for (const auto& step : trace.steps) {
      const SortedResiduals s = sorted_residuals(scene.data.X, step.theta, kernel);
      const std::vector<int> window(s.index_of.begin() + (cfg.k - cfg.h),
                                    s.index_of.begin() + cfg.k);
      EXPECT_EQ(step.rank_window, window);
      if (!step.degenerate_resampled) EXPECT_EQ(step.tuple, window);
      ++checked_steps;
    }
  }
  EXPECT_GT(checked_steps, 1000);
}

TEST(GenerateSample, RecoversInliersOnSingleStructure) {
  // With >= k inliers and < N/2 outliers, the final model's inlier set
  // (residual < T sigma) contains at least 0.9 k true inliers in >= 90% of
  // seeded runs.
  Line2DKernel kernel;
  SamplerConfig cfg;
  cfg.k = 20;
  cfg.h = 4;
  int ok = 0;
  const int runs = 100;
  for (int seed = 0; seed < runs; ++seed) {
    const LineScene scene = single_line_scene(seed + 1000, 0.02, 60, 25);
    Rng rng(seed);
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(scene.data.n(), 1.0 / scene.data.n());
    const SampleResult res = generate_sample(scene.data.X, cfg, w, kernel, rng);
    const Eigen::VectorXd r2 = kernel.residuals2_all(scene.data.X, res.theta);
    int true_inliers = 0;
    for (int i = 0; i < 60; ++i)
      if (r2[i] < cfg.t * cfg.t * res.sigma * res.sigma) ++true_inliers;
    if (true_inliers >= static_cast<int>(0.9 * cfg.k)) ++ok;
  }
  EXPECT_GE(ok, 90);
}

TEST(WeightedSampling, OneHotPlusPaddingAlwaysIncludesTarget) {
  Rng rng(77);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(10);
  w[3] = 1.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<int> picked = weighted_sample_without_replacement(w, 4, rng);
    EXPECT_NE(std::find(picked.begin(), picked.end(), 3), picked.end());
    std::set<int> distinct(picked.begin(), picked.end());
    EXPECT_EQ(distinct.size(), 4u);
  }
}
