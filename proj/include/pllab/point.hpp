#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <initializer_list>
#include <string>

#include "pllab/errors.hpp"

namespace pllab {

// Points and subgradient vectors share one dense representation.
using Point = Eigen::VectorXd;

inline Point point(std::initializer_list<double> coords) {
  Point x(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) x[i++] = c;
  return x;
}

inline void require_point(const Point& x, const char* where) {
  if (x.size() < 1) {
    throw usage_error(std::string(where) + ": point must have dimension >= 1");
  }
  if (!x.allFinite()) {
    throw usage_error(std::string(where) + ": point has non-finite coordinates");
  }
}

inline void require_dim(const Point& x, Eigen::Index dim, const char* where) {
  require_point(x, where);
  if (x.size() != dim) {
    throw usage_error(std::string(where) + ": dimension mismatch, expected " +
                      std::to_string(dim) + ", got " + std::to_string(x.size()));
  }
}

// Strict lexicographic order on coordinates; the deterministic tie-breaker
// used wherever a canonical representative has to be picked.
inline bool lex_less(const Point& a, const Point& b) {
  const Eigen::Index n = std::min(a.size(), b.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a[i] < b[i]) return true;
    if (b[i] < a[i]) return false;
  }
  return a.size() < b.size();
}

inline bool approx_equal(const Point& a, const Point& b, double tol) {
  if (a.size() != b.size()) return false;
  return (a - b).norm() <= tol;
}

}  // namespace pllab
