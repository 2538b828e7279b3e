#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "cbs/common.hpp"
#include "cbs/rng.hpp"

namespace cbs {

struct Labeling {
  std::vector<int> labels;  // cluster id in [0, n_c) per point
  int n_c = 0;
};

/// NJW spectral embedding: rows of the row-normalized matrix of the top n_c
/// eigenvectors of D^{-1/2} G D^{-1/2}. Vertices with zero degree get zero
/// rows; k-means later assigns them to the nearest centroid.
inline Eigen::MatrixXd spectral_embed(const Eigen::MatrixXd& g, int n_c) {
  const int n = static_cast<int>(g.rows());
  if (g.cols() != n) throw InputError("spectral_embed: G must be square");
  if (n_c < 1 || n_c > n) throw InputError("spectral_embed: n_c out of range");

  const Eigen::VectorXd degree = g.rowwise().sum();
  Eigen::VectorXd inv_sqrt(n);
  for (int i = 0; i < n; ++i) inv_sqrt[i] = degree[i] > 0.0 ? 1.0 / std::sqrt(degree[i]) : 0.0;

  const Eigen::MatrixXd m = inv_sqrt.asDiagonal() * g * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
  if (eig.info() != Eigen::Success) throw NumericalError("spectral_embed: eigensolver failed");

  // Eigenvalues come out ascending; take the top n_c, largest first.
  Eigen::MatrixXd embedding(n, n_c);
  for (int j = 0; j < n_c; ++j) embedding.col(j) = eig.eigenvectors().col(n - 1 - j);

  for (int i = 0; i < n; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0) embedding.row(i) /= norm;
  }
  return embedding;
}

namespace detail {

inline double assign_to_nearest(const Eigen::MatrixXd& pts, const Eigen::MatrixXd& centroids,
                                std::vector<int>& labels) {
  double wcss = 0.0;
  for (int i = 0; i < pts.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int c = 0; c < centroids.rows(); ++c) {
      const double d = (pts.row(i) - centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        arg = c;
      }
    }
    labels[i] = arg;
    wcss += best;
  }
  return wcss;
}

/// k-means++ seeding.
inline Eigen::MatrixXd seed_centroids(const Eigen::MatrixXd& pts, int n_c, Rng& rng) {
  const int n = static_cast<int>(pts.rows());
  Eigen::MatrixXd centroids(n_c, pts.cols());
  centroids.row(0) = pts.row(rng.uniform_int(n));
  Eigen::VectorXd d2 = (pts.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < n_c; ++c) {
    const double total = d2.sum();
    int pick;
    if (total <= 0.0) {
      pick = rng.uniform_int(n);
    } else {
      const double u = rng.uniform() * total;
      double cum = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        cum += d2[i];
        if (u < cum) {
          pick = i;
          break;
        }
      }
    }
    centroids.row(c) = pts.row(pick);
    d2 = d2.cwiseMin((pts.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

}  // namespace detail

/// Lloyd's k-means with k-means++ seeding, best of `restarts` runs by
/// within-cluster sum of squares. Empty clusters are re-seeded at the point
/// farthest from its centroid. Deterministic given the rng state.
inline std::vector<int> kmeans(const Eigen::MatrixXd& pts, int n_c, int restarts, Rng& rng,
                               int max_iter = 300, double tol = 1e-8) {
  const int n = static_cast<int>(pts.rows());
  if (restarts < 1) throw InputError("kmeans: restarts must be >= 1");
  if (n_c < 1 || n_c > n) throw InputError("kmeans: n_c out of range");

  std::vector<int> best_labels(n, 0);
  double best_wcss = std::numeric_limits<double>::infinity();
  std::vector<int> labels(n);

  for (int run = 0; run < restarts; ++run) {
    Eigen::MatrixXd centroids = detail::seed_centroids(pts, n_c, rng);
    double wcss = detail::assign_to_nearest(pts, centroids, labels);

    for (int it = 0; it < max_iter; ++it) {
      Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n_c, pts.cols());
      Eigen::VectorXi count = Eigen::VectorXi::Zero(n_c);
      for (int i = 0; i < n; ++i) {
        next.row(labels[i]) += pts.row(i);
        ++count[labels[i]];
      }
      for (int c = 0; c < n_c; ++c) {
        if (count[c] > 0) {
          next.row(c) /= static_cast<double>(count[c]);
        } else {
          // Re-seed an empty cluster at the point farthest from its centroid.
          double far_d = -1.0;
          int far_i = 0;
          for (int i = 0; i < n; ++i) {
            const double d = (pts.row(i) - centroids.row(labels[i])).squaredNorm();
            if (d > far_d) {
              far_d = d;
              far_i = i;
            }
          }
          next.row(c) = pts.row(far_i);
        }
      }
      const double shift = (next - centroids).rowwise().norm().maxCoeff();
      centroids = next;
      wcss = detail::assign_to_nearest(pts, centroids, labels);
      if (shift <= tol) break;
    }

    if (wcss < best_wcss) {
      best_wcss = wcss;
      best_labels = labels;
    }
  }
  return best_labels;
}

/// Spectral clustering of an affinity graph: NJW embedding followed by
/// k-means (10 restarts).
inline Labeling spectral_clustering(const Eigen::MatrixXd& g, int n_c, Rng& rng) {
  Labeling out;
  out.n_c = n_c;
  if (n_c == 1) {
    out.labels.assign(g.rows(), 0);
    return out;
  }
  const Eigen::MatrixXd embedding = spectral_embed(g, n_c);
  out.labels = kmeans(embedding, n_c, 10, rng);
  return out;
}

}  // namespace cbs
