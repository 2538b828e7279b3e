#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cstdint>
#include <vector>

#include "cbs/common.hpp"
#include "cbs/dataset.hpp"
#include "cbs/kernels.hpp"
#include "cbs/rng.hpp"

namespace cbs {

// ---------------------------------------------------------------------------
// Multi-line 2D scenes.
// ---------------------------------------------------------------------------

struct LineStructureSpec {
  Eigen::Vector2d a, b;  // segment endpoints
  int count = 0;
  double noise = 0.0;  // orthogonal Gaussian noise sigma
};

struct LineSceneSpec {
  std::vector<LineStructureSpec> structures;
  int outlier_count = 0;
  Eigen::Vector2d box_lo{-10.0, -10.0};
  Eigen::Vector2d box_hi{10.0, 10.0};
  std::uint64_t seed = 0;
};

struct LineScene {
  DataSet data;
  std::vector<Eigen::Vector3d> thetas;  // planted canonical line parameters
};

/// Points uniform along each segment plus orthogonal Gaussian noise; gross
/// outliers uniform in the box. Labels: structures 1..m, outliers 0.
inline LineScene gen_lines(const LineSceneSpec& spec) {
  for (const auto& s : spec.structures) {
    if (s.count < 0 || s.noise < 0.0) throw InputError("gen_lines: negative count or noise");
    if ((s.b - s.a).norm() <= 0.0) throw InputError("gen_lines: zero-length segment");
  }
  if (spec.outlier_count < 0) throw InputError("gen_lines: negative outlier count");

  Rng rng(spec.seed);
  LineScene scene;
  scene.data.kind = DataKind::points2d;

  int total = spec.outlier_count;
  for (const auto& s : spec.structures) total += s.count;
  scene.data.X.resize(2, total);
  scene.data.labels.reserve(total);

  int col = 0;
  int label = 1;
  for (const auto& s : spec.structures) {
    const Eigen::Vector2d dir = (s.b - s.a).normalized();
    const Eigen::Vector2d normal(-dir[1], dir[0]);
    for (int i = 0; i < s.count; ++i) {
      const Eigen::Vector2d p = s.a + rng.uniform() * (s.b - s.a) + s.noise * rng.normal() * normal;
      scene.data.X.col(col++) = p;
      scene.data.labels.push_back(label);
    }
    scene.thetas.push_back(canonicalize_line(Eigen::Vector3d(normal[0], normal[1], normal.dot(s.a))));
    ++label;
  }
  for (int i = 0; i < spec.outlier_count; ++i) {
    scene.data.X(0, col) = rng.uniform(spec.box_lo[0], spec.box_hi[0]);
    scene.data.X(1, col) = rng.uniform(spec.box_lo[1], spec.box_hi[1]);
    scene.data.labels.push_back(0);
    ++col;
  }
  return scene;
}

// ---------------------------------------------------------------------------
// Two-view correspondence scenes with one rigid motion per structure.
// ---------------------------------------------------------------------------

struct MotionSpec {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  int count = 0;
};

struct TwoViewSceneSpec {
  std::vector<MotionSpec> motions;
  int outlier_count = 0;
  double pixel_noise = 0.0;
  double focal = 600.0;
  Eigen::Vector2d principal{320.0, 240.0};
  Eigen::Vector2d image_size{640.0, 480.0};
  Eigen::Vector3d point_box_lo{-2.0, -1.5, 4.0};  // camera-frame 3D point box
  Eigen::Vector3d point_box_hi{2.0, 1.5, 8.0};
  std::uint64_t seed = 0;
};

struct TwoViewScene {
  DataSet data;
  std::vector<Eigen::Matrix3d> f_true;  // per motion, convention x1' F x2 = 0
};

/// 3D points in front of the camera, projected into view 1; each structure
/// moves rigidly before projection into view 2. Outliers are uniform random
/// pixel pairs. Ground-truth F per motion follows the x1' F x2 convention.
inline TwoViewScene gen_two_view(const TwoViewSceneSpec& spec) {
  if (spec.motions.empty()) throw InputError("gen_two_view: no motions specified");
  bool any_baseline = false;
  for (const auto& m : spec.motions) any_baseline = any_baseline || m.translation.norm() > 0.0;
  if (!any_baseline) throw InputError("gen_two_view: zero baseline for all motions");

  Eigen::Matrix3d k;
  k << spec.focal, 0, spec.principal[0], 0, spec.focal, spec.principal[1], 0, 0, 1;
  const Eigen::Matrix3d k_inv = k.inverse();

  Rng rng(spec.seed);
  TwoViewScene scene;
  scene.data.kind = DataKind::correspondences;

  int total = spec.outlier_count;
  for (const auto& m : spec.motions) total += m.count;
  scene.data.X.resize(4, total);
  scene.data.labels.reserve(total);

  const auto project = [&](const Eigen::Vector3d& p) -> Eigen::Vector2d {
    const Eigen::Vector3d q = k * p;
    return {q[0] / q[2], q[1] / q[2]};
  };
  const auto in_image = [&](const Eigen::Vector2d& px) {
    return px[0] >= 0.0 && px[0] <= spec.image_size[0] && px[1] >= 0.0 &&
           px[1] <= spec.image_size[1];
  };

  int col = 0;
  int label = 1;
  for (const auto& m : spec.motions) {
    Eigen::Matrix3d t_cross;
    t_cross << 0, -m.translation[2], m.translation[1], m.translation[2], 0, -m.translation[0],
        -m.translation[1], m.translation[0], 0;
    // Standard constraint is x2' (K^-T [t]x R K^-1) x1 = 0; transpose for the
    // x1' F x2 convention used throughout.
    Eigen::Matrix3d f = (k_inv.transpose() * t_cross * m.rotation * k_inv).transpose();
    scene.f_true.push_back(f.norm() > 0.0 ? canonicalize_fundamental(f) : f);

    for (int i = 0; i < m.count; ++i) {
      Eigen::Vector2d px1, px2;
      for (;;) {
        Eigen::Vector3d p;
        for (int a = 0; a < 3; ++a) p[a] = rng.uniform(spec.point_box_lo[a], spec.point_box_hi[a]);
        const Eigen::Vector3d p2 = m.rotation * p + m.translation;
        if (p2[2] < 0.1) continue;
        px1 = project(p);
        px2 = project(p2);
        if (in_image(px1) && in_image(px2)) break;
      }
      px1 += spec.pixel_noise * Eigen::Vector2d(rng.normal(), rng.normal());
      px2 += spec.pixel_noise * Eigen::Vector2d(rng.normal(), rng.normal());
      scene.data.X.col(col) << px1, px2;
      scene.data.labels.push_back(label);
      ++col;
    }
    ++label;
  }
  for (int i = 0; i < spec.outlier_count; ++i) {
    scene.data.X.col(col) << rng.uniform(0.0, spec.image_size[0]),
        rng.uniform(0.0, spec.image_size[1]), rng.uniform(0.0, spec.image_size[0]),
        rng.uniform(0.0, spec.image_size[1]);
    scene.data.labels.push_back(0);
    ++col;
  }
  return scene;
}

// ---------------------------------------------------------------------------
// Multi-subspace trajectory scenes.
// ---------------------------------------------------------------------------

struct SubspaceStructureSpec {
  int dim = 2;
  int count = 0;
};

struct SubspaceSceneSpec {
  int ambient = 12;  // 2F
  std::vector<SubspaceStructureSpec> structures;
  double noise = 0.0;
  int outlier_count = 0;
  std::uint64_t seed = 0;
};

struct SubspaceScene {
  DataSet data;
  std::vector<SubspaceModel> models;  // planted bases (mean zero)
};

/// Per structure: a random orthonormal basis, standard-normal coefficients,
/// additive ambient Gaussian noise. Outlier trajectories are uniform in the
/// bounding box of the structured points.
inline SubspaceScene gen_subspaces(const SubspaceSceneSpec& spec) {
  if (spec.ambient < 2 || spec.ambient % 2 != 0)
    throw InputError("gen_subspaces: ambient dimension must be even and >= 2");
  for (const auto& s : spec.structures) {
    if (s.dim > spec.ambient) throw InputError("gen_subspaces: dimension exceeds ambient");
    if (s.dim < 1 || s.count < 0) throw InputError("gen_subspaces: invalid structure spec");
  }

  Rng rng(spec.seed);
  SubspaceScene scene;
  scene.data.kind = DataKind::trajectories;

  int inlier_total = 0;
  for (const auto& s : spec.structures) inlier_total += s.count;
  scene.data.X.resize(spec.ambient, inlier_total + spec.outlier_count);
  scene.data.labels.reserve(inlier_total + spec.outlier_count);

  int col = 0;
  int label = 1;
  for (const auto& s : spec.structures) {
    Eigen::MatrixXd gaussian(spec.ambient, s.dim);
    for (int r = 0; r < spec.ambient; ++r)
      for (int c = 0; c < s.dim; ++c) gaussian(r, c) = rng.normal();
    const Eigen::MatrixXd basis =
        Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian).householderQ() *
        Eigen::MatrixXd::Identity(spec.ambient, s.dim);
    scene.models.push_back({Eigen::VectorXd::Zero(spec.ambient), basis});

    for (int i = 0; i < s.count; ++i) {
      Eigen::VectorXd coeff(s.dim);
      for (int c = 0; c < s.dim; ++c) coeff[c] = rng.normal();
      Eigen::VectorXd p = basis * coeff;
      for (int r = 0; r < spec.ambient; ++r) p[r] += spec.noise * rng.normal();
      scene.data.X.col(col++) = p;
      scene.data.labels.push_back(label);
    }
    ++label;
  }

  if (spec.outlier_count > 0) {
    if (inlier_total == 0) throw InputError("gen_subspaces: outliers need structured points for the box");
    const Eigen::VectorXd lo = scene.data.X.leftCols(inlier_total).rowwise().minCoeff();
    const Eigen::VectorXd hi = scene.data.X.leftCols(inlier_total).rowwise().maxCoeff();
    for (int i = 0; i < spec.outlier_count; ++i) {
      for (int r = 0; r < spec.ambient; ++r) scene.data.X(r, col) = rng.uniform(lo[r], hi[r]);
      scene.data.labels.push_back(0);
      ++col;
    }
  }
  return scene;
}

// ---------------------------------------------------------------------------
// Named presets used by the benchmark harness.
// ---------------------------------------------------------------------------

/// Four lines of 100 points each with N(0, 0.02^2) orthogonal noise plus 50
/// gross outliers in (-10,10)^2.
inline LineSceneSpec four_line_scene(std::uint64_t seed) {
  LineSceneSpec spec;
  spec.structures = {
      {{-10.0, -10.0}, {10.0, 10.0}, 100, 0.02},
      {{-10.0, 10.0}, {10.0, -10.0}, 100, 0.02},
      {{-10.0, 5.0}, {10.0, 1.0}, 100, 0.02},
      {{-10.0, -2.0}, {10.0, -8.0}, 100, 0.02},
  };
  spec.outlier_count = 50;
  spec.seed = seed;
  return spec;
}

/// Two lines of 50 points each plus 20 gross outliers.
inline LineSceneSpec two_line_scene(std::uint64_t seed) {
  LineSceneSpec spec;
  spec.structures = {
      {{-10.0, -4.0}, {10.0, 8.0}, 50, 0.02},
      {{-10.0, 5.0}, {10.0, -11.0}, 50, 0.02},
  };
  spec.outlier_count = 20;
  spec.seed = seed;
  return spec;
}

inline Eigen::Matrix3d axis_rotation(const Eigen::Vector3d& axis, double degrees) {
  return Eigen::AngleAxisd(degrees * EIGEN_PI / 180.0, axis.normalized()).toRotationMatrix();
}

/// Three rigid motions of 100 points each plus 50 mismatched outliers,
/// 1 px noise.
inline TwoViewSceneSpec three_motion_scene(std::uint64_t seed) {
  TwoViewSceneSpec spec;
  spec.motions = {
      {axis_rotation({0, 1, 0}, 4.0), {0.8, 0.1, 0.05}, 100},
      {axis_rotation({1, 0, 0}, -3.0), {-0.6, 0.5, -0.1}, 100},
      {axis_rotation({0, 0, 1}, 5.0), {0.2, -0.7, 0.15}, 100},
  };
  spec.outlier_count = 50;
  spec.pixel_noise = 1.0;
  spec.seed = seed;
  return spec;
}

/// Structure sizes mirroring the posters-checkerboard sequence: three
/// motions of 100/99/81 points and 99 outliers.
inline TwoViewSceneSpec checkerboard_like_scene(std::uint64_t seed) {
  TwoViewSceneSpec spec = three_motion_scene(seed);
  spec.motions[0].count = 100;
  spec.motions[1].count = 99;
  spec.motions[2].count = 81;
  spec.outlier_count = 99;
  return spec;
}

/// Three trajectory structures of ranks 2, 3, 4 with 100 points each,
/// ambient dimension 12, noise 1e-2, 50 outlier trajectories.
inline SubspaceSceneSpec three_subspace_scene(std::uint64_t seed) {
  SubspaceSceneSpec spec;
  spec.ambient = 12;
  spec.structures = {{2, 100}, {3, 100}, {4, 100}};
  spec.noise = 1e-2;
  spec.outlier_count = 50;
  spec.seed = seed;
  return spec;
}

}  // namespace cbs
