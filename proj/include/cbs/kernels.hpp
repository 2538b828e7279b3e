#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "cbs/common.hpp"
#include "cbs/dataset.hpp"

namespace cbs {

enum class KernelKind { line2d, subspace, fundamental };

inline const char* to_string(KernelKind k) {
  switch (k) {
    case KernelKind::line2d: return "line2d";
    case KernelKind::subspace: return "subspace";
    case KernelKind::fundamental: return "fundamental";
  }
  return "?";
}

/// A fitted model: parameter vector (encoding depends on the kernel), the
/// generating tuple, the noise scale estimated for it, and whether the
/// greedy sampler's stopping criterion fired.
struct Hypothesis {
  Eigen::VectorXd theta;
  std::vector<int> tuple_indices;
  double sigma = 0.0;
  bool converged = false;
};

// ---------------------------------------------------------------------------
// 2D lines.
//
// theta = (n_x, n_y, c) with ||n|| = 1 and the first nonzero component of n
// positive, describing the line { x : n.x = c }. The canonical sign makes
// hypothesis logs reproducible.
// ---------------------------------------------------------------------------

inline Eigen::Vector3d canonicalize_line(Eigen::Vector3d theta) {
  const double nn = theta.head<2>().norm();
  if (nn <= 0.0) throw InputError("line normal must be nonzero");
  theta /= nn;
  const double lead = std::abs(theta[0]) > 1e-12 ? theta[0] : theta[1];
  if (lead < 0.0) theta = -theta;
  return theta;
}

/// Total-least-squares line through >= 2 points (orthogonal regression):
/// the normal is the eigenvector of the smallest eigenvalue of the 2x2
/// scatter of the centered points.
inline Eigen::Vector3d fit_line(const Eigen::Matrix2Xd& pts) {
  const auto m = pts.cols();
  if (m < 2) throw InputError("fit_line needs at least 2 points");

  const Eigen::Vector2d centroid = pts.rowwise().mean();
  const Eigen::Matrix2Xd centered = pts.colwise() - centroid;

  const double spread = centered.cwiseAbs().maxCoeff();
  if (spread <= 1e-12 * (1.0 + centroid.cwiseAbs().maxCoeff()))
    throw DegenerateTupleError("fit_line: all points coincident");

  const Eigen::Matrix2d scatter = centered * centered.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(scatter);
  const Eigen::Vector2d normal = eig.eigenvectors().col(0);  // smallest eigenvalue

  Eigen::Vector3d theta;
  theta << normal, normal.dot(centroid);
  return canonicalize_line(theta);
}

/// Squared orthogonal distance from a point to a canonical line.
inline double residual_line(const Eigen::Vector2d& p, const Eigen::Vector3d& theta) {
  const double t = theta[0] * p[0] + theta[1] * p[1] - theta[2];
  return t * t;
}

// ---------------------------------------------------------------------------
// Linear/affine subspaces for trajectory data.
// ---------------------------------------------------------------------------

/// Affine subspace: mean point plus orthonormal basis of the d principal
/// directions of a tuple.
struct SubspaceModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd basis;  // ambient x d, orthonormal columns

  int dim() const { return static_cast<int>(basis.cols()); }

  /// Flat encoding: [d, mean, basis column-major].
  Eigen::VectorXd to_theta() const {
    const auto a = mean.size();
    const auto d = basis.cols();
    Eigen::VectorXd theta(1 + a + a * d);
    theta[0] = static_cast<double>(d);
    theta.segment(1, a) = mean;
    theta.segment(1 + a, a * d) = Eigen::Map<const Eigen::VectorXd>(basis.data(), a * d);
    return theta;
  }

  static SubspaceModel from_theta(const Eigen::VectorXd& theta, int ambient) {
    SubspaceModel m;
    const int d = static_cast<int>(theta[0]);
    m.mean = theta.segment(1, ambient);
    m.basis = Eigen::Map<const Eigen::MatrixXd>(theta.data() + 1 + ambient, ambient, d);
    return m;
  }
};

/// Best rank-d affine subspace of a tuple in the least-squares sense
/// (SVD of the mean-centered tuple). Throws when the tuple has rank < d.
inline SubspaceModel fit_subspace(const Eigen::MatrixXd& pts, int d) {
  const auto m = pts.cols();
  if (d < 1) throw InputError("fit_subspace: dimension must be >= 1");
  if (m < d) throw InputError("fit_subspace: tuple smaller than requested dimension");

  SubspaceModel model;
  model.mean = pts.rowwise().mean();
  const Eigen::MatrixXd centered = pts.colwise() - model.mean;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() < d || sv[d - 1] <= 1e-10 * sv[0])
    throw DegenerateTupleError("fit_subspace: tuple rank below requested dimension");

  model.basis = svd.matrixU().leftCols(d);
  return model;
}

/// Squared distance from a point to the affine subspace.
inline double residual_subspace(const Eigen::VectorXd& p, const SubspaceModel& m) {
  const Eigen::VectorXd v = p - m.mean;
  return (v - m.basis * (m.basis.transpose() * v)).squaredNorm();
}

/// Data-driven dimension choice: the smallest d in [lo, hi] whose top-d
/// eigenvalues of the centered scatter capture at least `energy` of the
/// total variance; hi when none qualifies.
inline int select_subspace_dim(const Eigen::MatrixXd& pts, double energy = 0.99,
                               int lo = 2, int hi = 4) {
  if (pts.cols() < 5) throw InputError("select_subspace_dim needs at least 5 points");
  const Eigen::VectorXd mean = pts.rowwise().mean();
  const Eigen::MatrixXd centered = pts.colwise() - mean;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
  Eigen::VectorXd ev = svd.singularValues().array().square();  // descending
  const double total = ev.sum();
  if (total <= 0.0) return lo;

  double cum = 0.0;
  for (int d = 1; d <= hi && d <= ev.size(); ++d) {
    cum += ev[d - 1];
    if (d >= lo && cum >= energy * total) return d;
  }
  return hi;
}

// ---------------------------------------------------------------------------
// Fundamental matrices for two-view correspondences (x1, y1, x2, y2).
//
// Constraint convention: X1' F X2 = 0 with X_i = (x_i, y_i, 1). theta is F
// row-major, Frobenius-normalized, first nonzero entry positive.
// ---------------------------------------------------------------------------

namespace detail {

/// Isotropic (Hartley) normalization: centroid to origin, mean distance
/// to sqrt(2).
inline Eigen::Matrix3d hartley_transform(const Eigen::Matrix2Xd& pts) {
  const Eigen::Vector2d centroid = pts.rowwise().mean();
  const double mean_dist = (pts.colwise() - centroid).colwise().norm().mean();
  if (mean_dist <= 1e-12 * (1.0 + centroid.norm()))
    throw DegenerateTupleError("fit_fundamental: coincident points in one view");
  const double s = std::sqrt(2.0) / mean_dist;
  Eigen::Matrix3d t;
  t << s, 0, -s * centroid[0], 0, s, -s * centroid[1], 0, 0, 1;
  return t;
}

}  // namespace detail

inline Eigen::Matrix3d canonicalize_fundamental(Eigen::Matrix3d f) {
  const double norm = f.norm();
  if (norm <= 0.0) throw InputError("fundamental matrix must be nonzero");
  f /= norm;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      if (std::abs(f(r, c)) > 1e-12) return f(r, c) < 0.0 ? Eigen::Matrix3d(-f) : f;
  return f;
}

/// Normalized eight-point estimate from >= 8 correspondences (columns are
/// (x1, y1, x2, y2)), with the rank-2 constraint enforced by SVD truncation.
/// Rank deficiency of the design matrix (condition number > 1e10, e.g. all
/// points coplanar in the scene) throws DegenerateTupleError.
inline Eigen::Matrix3d fit_fundamental(const Eigen::MatrixXd& corr) {
  const auto m = corr.cols();
  if (corr.rows() != 4) throw InputError("fit_fundamental expects 4-row correspondences");
  if (m < 8) throw InputError("fit_fundamental needs at least 8 correspondences");

  const Eigen::Matrix3d t1 = detail::hartley_transform(corr.topRows<2>());
  const Eigen::Matrix3d t2 = detail::hartley_transform(corr.bottomRows<2>());

  Eigen::MatrixXd a(m, 9);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Vector3d p1 = t1 * Eigen::Vector3d(corr(0, i), corr(1, i), 1.0);
    const Eigen::Vector3d p2 = t2 * Eigen::Vector3d(corr(2, i), corr(3, i), 1.0);
    a.row(i) << p1[0] * p2[0], p1[0] * p2[1], p1[0] * p2[2],
                p1[1] * p2[0], p1[1] * p2[1], p1[1] * p2[2],
                p1[2] * p2[0], p1[2] * p2[1], p1[2] * p2[2];
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv[7] <= 1e-10 * sv[0])
    throw DegenerateTupleError("fit_fundamental: rank-deficient design matrix");

  const Eigen::VectorXd f = svd.matrixV().col(8);
  Eigen::Matrix3d fn;
  fn << f[0], f[1], f[2], f[3], f[4], f[5], f[6], f[7], f[8];

  // Rank-2 projection.
  Eigen::JacobiSVD<Eigen::Matrix3d> fsvd(fn, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Vector3d s = fsvd.singularValues();
  s[2] = 0.0;
  fn = fsvd.matrixU() * s.asDiagonal() * fsvd.matrixV().transpose();

  return canonicalize_fundamental(t1.transpose() * fn * t2);
}

/// Squared Sampson distance (first-order geometric error) of a
/// correspondence to F. Returns +inf when both epipolar-line gradients
/// vanish.
inline double sampson_distance2(const Eigen::Vector4d& corr, const Eigen::Matrix3d& f) {
  const Eigen::Vector3d x1(corr[0], corr[1], 1.0);
  const Eigen::Vector3d x2(corr[2], corr[3], 1.0);
  const Eigen::Vector3d fx2 = f * x2;
  const Eigen::Vector3d ftx1 = f.transpose() * x1;
  const double e = x1.dot(fx2);
  const double den = fx2[0] * fx2[0] + fx2[1] * fx2[1] + ftx1[0] * ftx1[0] + ftx1[1] * ftx1[1];
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return e * e / den;
}

// ---------------------------------------------------------------------------
// Kernel abstraction used by the samplers and the pipeline.
// ---------------------------------------------------------------------------

class ModelKernel {
 public:
  virtual ~ModelKernel() = default;

  virtual KernelKind kind() const = 0;
  /// Parameter count p; tuples have size h = p + 2.
  virtual int param_count() const = 0;
  virtual int tuple_size() const { return param_count() + 2; }
  /// Minimum points for an exact fit.
  virtual int min_tuple() const = 0;

  /// Fit a model to the tuple columns of X. Throws DegenerateTupleError.
  virtual Eigen::VectorXd fit(const Eigen::MatrixXd& x, std::span<const int> tuple) const = 0;
  virtual double residual2(const Eigen::MatrixXd& x, int i, const Eigen::VectorXd& theta) const = 0;

  /// Squared residuals of every column of X.
  virtual Eigen::VectorXd residuals2_all(const Eigen::MatrixXd& x, const Eigen::VectorXd& theta) const {
    Eigen::VectorXd r(x.cols());
    for (int i = 0; i < x.cols(); ++i) r[i] = residual2(x, i, theta);
    return r;
  }

  /// Degrees-of-freedom correction used by the scale estimator.
  virtual int scale_dof(const Eigen::VectorXd& /*theta*/) const { return param_count(); }

  virtual void check_data(const DataSet& data) const = 0;

 protected:
  static Eigen::MatrixXd gather(const Eigen::MatrixXd& x, std::span<const int> tuple) {
    Eigen::MatrixXd t(x.rows(), static_cast<Eigen::Index>(tuple.size()));
    for (std::size_t j = 0; j < tuple.size(); ++j) t.col(static_cast<Eigen::Index>(j)) = x.col(tuple[j]);
    return t;
  }
};

class Line2DKernel final : public ModelKernel {
 public:
  KernelKind kind() const override { return KernelKind::line2d; }
  int param_count() const override { return 2; }
  int min_tuple() const override { return 2; }

  Eigen::VectorXd fit(const Eigen::MatrixXd& x, std::span<const int> tuple) const override {
    return fit_line(gather(x, tuple));
  }

  double residual2(const Eigen::MatrixXd& x, int i, const Eigen::VectorXd& theta) const override {
    return residual_line(x.col(i).head<2>(), theta.head<3>());
  }

  Eigen::VectorXd residuals2_all(const Eigen::MatrixXd& x, const Eigen::VectorXd& theta) const override {
    return ((theta.head<2>().transpose() * x).array() - theta[2]).square().transpose();
  }

  void check_data(const DataSet& data) const override {
    if (data.dim() != 2) throw InputError("line2d kernel requires 2D points");
  }
};

/// Trajectory-subspace kernel. Tuples are sized for the largest admissible
/// dimension (h = dim_hi + 2); each fit picks its own d from the tuple's
/// eigen-spectrum, and the scale estimator's dof correction follows that d.
class SubspaceKernel final : public ModelKernel {
 public:
  explicit SubspaceKernel(int dim_lo = 2, int dim_hi = 4, double energy = 0.99)
      : dim_lo_(dim_lo), dim_hi_(dim_hi), energy_(energy) {
    if (dim_lo_ < 1 || dim_hi_ < dim_lo_) throw InputError("invalid subspace dimension range");
  }

  KernelKind kind() const override { return KernelKind::subspace; }
  int param_count() const override { return dim_hi_; }
  int min_tuple() const override { return dim_lo_; }
  int dim_lo() const { return dim_lo_; }
  int dim_hi() const { return dim_hi_; }

  Eigen::VectorXd fit(const Eigen::MatrixXd& x, std::span<const int> tuple) const override {
    const Eigen::MatrixXd pts = gather(x, tuple);
    const int d = select_subspace_dim(pts, energy_, dim_lo_, dim_hi_);
    return fit_subspace(pts, d).to_theta();
  }

  double residual2(const Eigen::MatrixXd& x, int i, const Eigen::VectorXd& theta) const override {
    return residual_subspace(x.col(i), SubspaceModel::from_theta(theta, static_cast<int>(x.rows())));
  }

  Eigen::VectorXd residuals2_all(const Eigen::MatrixXd& x, const Eigen::VectorXd& theta) const override {
    const auto m = SubspaceModel::from_theta(theta, static_cast<int>(x.rows()));
    const Eigen::MatrixXd v = x.colwise() - m.mean;
    const Eigen::MatrixXd rej = v - m.basis * (m.basis.transpose() * v);
    return rej.colwise().squaredNorm().transpose();
  }

  int scale_dof(const Eigen::VectorXd& theta) const override { return static_cast<int>(theta[0]); }

  void check_data(const DataSet& data) const override {
    if (data.dim() <= dim_hi_)
      throw InputError("subspace kernel requires ambient dimension above the model range");
  }

 private:
  int dim_lo_, dim_hi_;
  double energy_;
};

class FundamentalKernel final : public ModelKernel {
 public:
  KernelKind kind() const override { return KernelKind::fundamental; }
  int param_count() const override { return 8; }
  int min_tuple() const override { return 8; }

  Eigen::VectorXd fit(const Eigen::MatrixXd& x, std::span<const int> tuple) const override {
    const Eigen::Matrix3d f = fit_fundamental(gather(x, tuple));
    Eigen::VectorXd theta(9);
    theta << f(0, 0), f(0, 1), f(0, 2), f(1, 0), f(1, 1), f(1, 2), f(2, 0), f(2, 1), f(2, 2);
    return theta;
  }

  static Eigen::Matrix3d to_matrix(const Eigen::VectorXd& theta) {
    Eigen::Matrix3d f;
    f << theta[0], theta[1], theta[2], theta[3], theta[4], theta[5], theta[6], theta[7], theta[8];
    return f;
  }

  double residual2(const Eigen::MatrixXd& x, int i, const Eigen::VectorXd& theta) const override {
    return sampson_distance2(x.col(i).head<4>(), to_matrix(theta));
  }

  Eigen::VectorXd residuals2_all(const Eigen::MatrixXd& x, const Eigen::VectorXd& theta) const override {
    const Eigen::Matrix3d f = to_matrix(theta);
    const auto n = x.cols();
    Eigen::Matrix3Xd x1(3, n), x2(3, n);
    x1.topRows<2>() = x.topRows<2>();
    x2.topRows<2>() = x.middleRows<2>(2);
    x1.row(2).setOnes();
    x2.row(2).setOnes();
    const Eigen::Matrix3Xd fx2 = f * x2;
    const Eigen::Matrix3Xd ftx1 = f.transpose() * x1;
    const Eigen::ArrayXd e = (x1.array() * fx2.array()).colwise().sum().transpose();
    const Eigen::ArrayXd den = (fx2.topRows<2>().array().square().colwise().sum() +
                                ftx1.topRows<2>().array().square().colwise().sum())
                                   .transpose();
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i)
      r[i] = den[i] == 0.0 ? std::numeric_limits<double>::infinity() : e[i] * e[i] / den[i];
    return r;
  }

  void check_data(const DataSet& data) const override {
    if (data.dim() != 4) throw InputError("fundamental kernel requires 4-row correspondences");
  }
};

inline std::unique_ptr<ModelKernel> make_kernel(KernelKind kind, double subspace_energy = 0.99) {
  switch (kind) {
    case KernelKind::line2d: return std::make_unique<Line2DKernel>();
    case KernelKind::subspace: return std::make_unique<SubspaceKernel>(2, 4, subspace_energy);
    case KernelKind::fundamental: return std::make_unique<FundamentalKernel>();
  }
  throw InputError("unknown kernel kind");
}

}  // namespace cbs
