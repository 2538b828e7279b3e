#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cbs/common.hpp"
#include "cbs/kernels.hpp"

namespace cbs {

/// One affinity column: H(i) = exp(-r2(i) / (2 sigma^2)), entries in (0, 1].
inline Eigen::VectorXd affinity_column(const Eigen::VectorXd& r2_all, double sigma) {
  if (sigma <= 0.0) throw InputError("affinity_column: sigma must be positive");
  return (-r2_all.array() / (2.0 * sigma * sigma)).exp();
}

/// Graph projection G = H H'. Built as a rank update so the result is
/// exactly symmetric.
inline Eigen::MatrixXd project_graph(const Eigen::MatrixXd& h) {
  if (!h.allFinite()) throw InputError("project_graph: H must be finite");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(h.rows(), h.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(h);
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

/// Contribution of hypothesis l to G: the outer product of column l with
/// itself.
inline Eigen::MatrixXd hypothesis_contribution(const Eigen::MatrixXd& h, int l) {
  if (l < 0 || l >= h.cols()) throw InputError("hypothesis_contribution: column out of range");
  return h.col(l) * h.col(l).transpose();
}

/// The sampled flattened affinity matrix H (one column per hypothesis), the
/// projected graph G = HH', and the hypothesis records aligned with the
/// columns of H.
struct AffinityBundle {
  Eigen::MatrixXd H;  // N x n_H
  Eigen::MatrixXd G;  // N x N
  std::vector<Hypothesis> hypotheses;

  int n_points() const { return static_cast<int>(H.rows()); }
  int n_hypotheses() const { return static_cast<int>(H.cols()); }
};

}  // namespace cbs
