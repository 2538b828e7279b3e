#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "cbs/common.hpp"

namespace cbs {

enum class DataKind {
  points2d,         // columns are (x, y)
  correspondences,  // columns are (x1, y1, x2, y2), one match across two views
  trajectories,     // columns are (x_1, y_1, ..., x_F, y_F) point tracks
};

inline const char* to_string(DataKind k) {
  switch (k) {
    case DataKind::points2d: return "points2d";
    case DataKind::correspondences: return "correspondences";
    case DataKind::trajectories: return "trajectories";
  }
  return "?";
}

/// N points in R^d stored as columns, with optional ground-truth labels
/// (label 0 marks gross outliers, structures are numbered from 1).
struct DataSet {
  DataKind kind = DataKind::points2d;
  Eigen::MatrixXd X;        // dim x N
  std::vector<int> labels;  // empty when no ground truth

  int n() const { return static_cast<int>(X.cols()); }
  int dim() const { return static_cast<int>(X.rows()); }
  bool has_labels() const { return !labels.empty(); }

  /// Trajectory frame count F (dim == 2F).
  int frames() const { return dim() / 2; }

  void validate() const {
    if (has_labels() && static_cast<int>(labels.size()) != n())
      throw InputError("dataset labels do not cover all points");
    if (kind == DataKind::points2d && dim() != 2)
      throw InputError("points2d dataset must have 2 rows");
    if (kind == DataKind::correspondences && dim() != 4)
      throw InputError("correspondence dataset must have 4 rows");
    if (kind == DataKind::trajectories && (dim() < 2 || dim() % 2 != 0))
      throw InputError("trajectory dataset must have an even number of rows");
  }
};

/// Diagonal length of the axis-aligned bounding box of the points. Used as
/// the reference length for the noise-scale floor.
inline double bounding_box_diameter(const Eigen::MatrixXd& X) {
  if (X.cols() == 0) return 0.0;
  const Eigen::VectorXd extent = X.rowwise().maxCoeff() - X.rowwise().minCoeff();
  return extent.norm();
}

}  // namespace cbs
