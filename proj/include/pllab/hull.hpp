#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "pllab/errors.hpp"
#include "pllab/point.hpp"

namespace pllab {

// Minimum-norm point of the convex hull of a finite vertex list.
struct MinNormPoint {
  Point point;
  double norm = 0.0;
  // ||w||^2 - min_i <w, v_i>, clamped at zero; certifies optimality of w.
  double duality_gap = 0.0;
};

namespace detail {

// Exhausts every face of the hull.  For each vertex subset S the
// minimum-norm point of aff(S) solves the KKT system G_S l = a 1, 1' l = 1;
// subsets whose solution carries a negative weight are discarded, interior
// minima of sub-faces are picked up by the sub-subsets.
inline bool enumerate_min_norm(const std::vector<Point>& v,
                               const Eigen::MatrixXd& gram,
                               Eigen::VectorXd& best_weights) {
  const int k = static_cast<int>(v.size());
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  const double scale = 1.0 + gram.diagonal().maxCoeff();

  std::vector<int> idx;
  idx.reserve(k);
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    idx.clear();
    for (int i = 0; i < k; ++i) {
      if (mask & (1u << i)) idx.push_back(i);
    }
    const int m = static_cast<int>(idx.size());

    Eigen::VectorXd w = Eigen::VectorXd::Zero(k);
    double val = 0.0;
    if (m == 1) {
      w[idx[0]] = 1.0;
      val = gram(idx[0], idx[0]);
    } else {
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
      for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) kkt(r, c) = gram(idx[r], idx[c]);
        kkt(r, m) = -1.0;
        kkt(m, r) = 1.0;
      }
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
      rhs[m] = 1.0;
      const Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
      const Eigen::VectorXd sol = lu.solve(rhs);
      if (!sol.allFinite()) continue;
      if ((kkt * sol - rhs).norm() > 1e-8 * scale * (1.0 + sol.norm())) continue;

      bool feasible = true;
      val = 0.0;
      for (int r = 0; r < m; ++r) {
        if (sol[r] < -1e-10) feasible = false;
        w[idx[r]] = sol[r];
      }
      if (!feasible) continue;
      val = w.dot(gram * w);
    }

    if (val < best) {
      best = val;
      best_weights = w;
      found = true;
    }
  }
  return found;
}

// Pairwise Frank-Wolfe for larger vertex lists.
inline void pairwise_min_norm(const std::vector<Point>& v,
                              const Eigen::MatrixXd& gram,
                              Eigen::VectorXd& weights) {
  const int k = static_cast<int>(v.size());
  int start = 0;
  for (int i = 1; i < k; ++i) {
    if (gram(i, i) < gram(start, start)) start = i;
  }
  weights = Eigen::VectorXd::Zero(k);
  weights[start] = 1.0;

  const double scale = 1.0 + gram.diagonal().maxCoeff();
  Eigen::VectorXd gw = gram.col(start);  // G * weights
  for (long it = 0; it < 200000; ++it) {
    int fw = 0, away = -1;
    double fw_score = std::numeric_limits<double>::infinity();
    double away_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      if (gw[i] < fw_score) {
        fw_score = gw[i];
        fw = i;
      }
      if (weights[i] > 1e-16 && gw[i] > away_score) {
        away_score = gw[i];
        away = i;
      }
    }
    const double value = weights.dot(gw);
    if (away < 0 || value - fw_score <= 1e-14 * scale) break;

    // Shift mass from the away vertex toward the Frank-Wolfe vertex.
    const Eigen::VectorXd dir_g = gram.col(fw) - gram.col(away);
    const double denom = gram(fw, fw) + gram(away, away) - 2.0 * gram(fw, away);
    double step = denom <= 0.0 ? weights[away]
                               : std::clamp(-weights.dot(dir_g) / denom, 0.0,
                                            weights[away]);
    if (step <= 0.0) break;
    weights[fw] += step;
    weights[away] -= step;
    gw += step * dir_g;
  }
}

}  // namespace detail

inline MinNormPoint min_norm_point(const std::vector<Point>& vertices) {
  if (vertices.empty()) {
    throw usage_error("min_norm_point: vertex list is empty");
  }
  const Eigen::Index dim = vertices.front().size();
  for (const Point& v : vertices) require_dim(v, dim, "min_norm_point");

  const int k = static_cast<int>(vertices.size());
  MinNormPoint out;

  if (k == 1) {
    out.point = vertices[0];
  } else if (k == 2) {
    const Point d = vertices[1] - vertices[0];
    const double den = d.squaredNorm();
    const double t =
        den == 0.0 ? 0.0 : std::clamp(-vertices[0].dot(d) / den, 0.0, 1.0);
    out.point = vertices[0] + t * d;
  } else {
    Eigen::MatrixXd gram(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j <= i; ++j) {
        gram(i, j) = gram(j, i) = vertices[i].dot(vertices[j]);
      }
    }
    Eigen::VectorXd weights;
    bool ok = k <= 16 && detail::enumerate_min_norm(vertices, gram, weights);
    if (!ok) detail::pairwise_min_norm(vertices, gram, weights);

    // Clean tiny negatives and renormalize before forming the point.
    weights = weights.cwiseMax(0.0);
    const double total = weights.sum();
    if (total <= 0.0) throw internal_error("min_norm_point: degenerate weights");
    weights /= total;
    out.point = Point::Zero(dim);
    for (int i = 0; i < k; ++i) {
      if (weights[i] > 0.0) out.point += weights[i] * vertices[i];
    }
  }

  out.norm = out.point.norm();
  double support = std::numeric_limits<double>::infinity();
  for (const Point& v : vertices) support = std::min(support, out.point.dot(v));
  out.duality_gap = std::max(0.0, out.point.squaredNorm() - support);
  return out;
}

}  // namespace pllab
