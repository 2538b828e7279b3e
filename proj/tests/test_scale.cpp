#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "cbs/rng.hpp"
#include "cbs/scale.hpp"
#include "oracles.hpp"

using namespace cbs;

namespace {

Eigen::VectorXd sorted_squares(std::vector<double> residuals) {
  Eigen::VectorXd r2(static_cast<Eigen::Index>(residuals.size()));
  for (std::size_t i = 0; i < residuals.size(); ++i) r2[i] = residuals[i] * residuals[i];
  std::sort(r2.data(), r2.data() + r2.size());
  return r2;
}

}  // namespace

TEST(Msse, ConstantResidualsClosedForm) {
  // All residuals equal to c with p = 1 and no transition: sigma^2 =
  // N c^2 / (N - 1).
  const int n = 37;
  const double c = 0.8;
  const Eigen::VectorXd r2 = Eigen::VectorXd::Constant(n, c * c);
  const ScaleEstimate est = msse(r2, 5, 2.5, 1);
  EXPECT_EQ(est.k_star, n);
  EXPECT_NEAR(est.sigma, c * std::sqrt(static_cast<double>(n) / (n - 1)), 1e-12);
}

TEST(Msse, ParameterErrors) {
  const Eigen::VectorXd r2 = Eigen::VectorXd::LinSpaced(10, 0.0, 1.0);
  EXPECT_THROW(msse(r2, 2, 2.5, 2), InputError);   // k <= p
  EXPECT_THROW(msse(r2, 11, 2.5, 2), InputError);  // k > N
}

TEST(Msse, GaussianNoOutliersRecoversScale) {
  // 200 i.i.d. N(0, s^2) residuals, k = 20, T = 2.5: sigma within
  // [0.8 s, 1.2 s] in at least 95% of seeded trials.
  const double s = 0.37;
  int ok = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(1000 + trial);
    std::vector<double> res(200);
    for (auto& r : res) r = s * rng.normal();
    const ScaleEstimate est = msse(sorted_squares(res), 20, 2.5, 2);
    if (est.sigma >= 0.8 * s && est.sigma <= 1.2 * s) ++ok;
  }
  EXPECT_GE(ok, static_cast<int>(0.95 * trials));
}

TEST(Msse, OutliersAtTwentySigma) {
  // 100 inliers N(0, s^2) plus 50 outliers at 20 s: transition by rank 105
  // and sigma within [0.8 s, 1.25 s].
  const double s = 1.3;
  int ok = 0;
  const int trials = 500;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(5000 + trial);
    std::vector<double> res;
    for (int i = 0; i < 100; ++i) res.push_back(s * rng.normal());
    for (int i = 0; i < 50; ++i) res.push_back(20.0 * s);
    const ScaleEstimate est = msse(sorted_squares(res), 20, 2.5, 2);
    if (est.k_star <= 105 && est.sigma >= 0.8 * s && est.sigma <= 1.25 * s) ++ok;
  }
  EXPECT_GE(ok, static_cast<int>(0.95 * trials));
}

TEST(Msse, ScaleEquivariance) {
  Rng rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 30 + rng.uniform_int(100);
    std::vector<double> res(n);
    for (auto& r : res) r = rng.normal();
    if (rng.uniform() < 0.3)
      for (int i = 0; i < n / 4; ++i) res[i] = 15.0 + 5.0 * rng.uniform();
    const Eigen::VectorXd r2 = sorted_squares(res);
    const ScaleEstimate base = msse(r2, 10, 2.5, 2);

    // Power-of-two scaling is exact in floating point.
    const double a = std::ldexp(1.0, rng.uniform_int(9) - 4);
    const ScaleEstimate scaled = msse(a * a * r2, 10, 2.5, 2);
    EXPECT_DOUBLE_EQ(scaled.sigma, a * base.sigma);
    EXPECT_EQ(scaled.k_star, base.k_star);

    const double b = std::exp(rng.uniform(-3, 3));
    const ScaleEstimate scaled_b = msse(b * b * r2, 10, 2.5, 2);
    EXPECT_NEAR(scaled_b.sigma, b * base.sigma, 1e-9 * b * base.sigma + 1e-300);
  }
}

TEST(Msse, MonotoneRobustnessToFarPoints) {
  Rng rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 25 + rng.uniform_int(75);
    std::vector<double> res(n);
    for (auto& r : res) r = rng.normal();
    if (rng.uniform() < 0.5)
      for (int i = 0; i < n / 5; ++i) res[i] = 30.0;
    const Eigen::VectorXd r2 = sorted_squares(res);
    const ScaleEstimate base = msse(r2, 10, 2.5, 2);

    const double bound = 2.5 * 2.5 * base.sigma * base.sigma;
    const int extra = 1 + rng.uniform_int(10);
    Eigen::VectorXd extended(r2.size() + extra);
    extended.head(r2.size()) = r2;
    for (int i = 0; i < extra; ++i)
      extended[r2.size() + i] = bound * (1.5 + rng.uniform(0.0, 10.0));
    std::sort(extended.data(), extended.data() + extended.size());

    const ScaleEstimate grown = msse(extended, 10, 2.5, 2);
    EXPECT_DOUBLE_EQ(grown.sigma, base.sigma);
  }
}

TEST(Msse, InlierCountCoversKOnGaussianFamilies) {
  Rng rng(123);
  for (int trial = 0; trial < 2000; ++trial) {
    const int inliers = 50 + rng.uniform_int(200);
    const int outliers = rng.uniform_int(inliers / 2);
    std::vector<double> res;
    for (int i = 0; i < inliers; ++i) res.push_back(rng.normal());
    for (int i = 0; i < outliers; ++i) res.push_back(12.0 + 10.0 * rng.uniform());
    const int k = 20;
    const ScaleEstimate est = msse(sorted_squares(res), k, 2.5, 2);
    if (est.k_star >= k && est.k_star < static_cast<int>(res.size()))
      EXPECT_GE(est.inlier_count, k);
  }
}

TEST(SigmaFloor, FloorsExactData) {
  EXPECT_DOUBLE_EQ(sigma_floor(0.0, 28.0), 28.0e-9);
  EXPECT_DOUBLE_EQ(sigma_floor(0.5, 28.0), 0.5);
}
