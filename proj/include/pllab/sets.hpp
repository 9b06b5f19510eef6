#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "pllab/cubic.hpp"
#include "pllab/errors.hpp"
#include "pllab/point.hpp"

namespace pllab {

// distance(set, x) <= kSetMembershipTol reads "x belongs to the set".
inline constexpr double kSetMembershipTol = 1e-10;

enum class SetCardinality { kSingleton, kFiniteComplete, kInfinite };

// Nearest points of a closed set to a query.  representatives is the complete
// minimizer list except under kInfinite, where it is a canonical finite
// sample of the infinite projection set (2N axis points of a sphere).
struct ProjectionResult {
  std::vector<Point> representatives;  // nonempty, lexicographically sorted
  SetCardinality cardinality = SetCardinality::kSingleton;
  double distance = 0.0;
};

class ClosedSet;

struct SingletonSet {
  Point point;
};

struct PointCloudSet {
  std::vector<Point> points;
};

struct SphereSet {
  Point center;
  double radius = 1.0;
};

// {(t, scale*t^2) : t real} in the plane; scale != 0.
struct ParabolaGraphSet {
  double scale = 1.0;
};

struct BoxSet {
  Point lower;
  Point upper;
};

// anchor + span(basis) with an orthonormal basis; an empty basis degenerates
// to the single point {anchor}.
struct AffineSubspaceSet {
  Point anchor;
  std::vector<Point> basis;
};

struct UnionSet {
  std::vector<ClosedSet> members;
};

// A closed nonempty subset of R^N, validated on construction.
class ClosedSet {
 public:
  using Variant = std::variant<SingletonSet, PointCloudSet, SphereSet,
                               ParabolaGraphSet, BoxSet, AffineSubspaceSet,
                               UnionSet>;

  explicit ClosedSet(Variant v);

  Eigen::Index dim() const { return dim_; }
  const Variant& variant() const { return v_; }

 private:
  Variant v_;
  Eigen::Index dim_ = 0;
};

ProjectionResult project(const ClosedSet& set, const Point& x);

inline double distance(const ClosedSet& set, const Point& x) {
  return project(set, x).distance;
}

inline bool contains(const ClosedSet& set, const Point& x) {
  return distance(set, x) <= kSetMembershipTol;
}

inline ClosedSet make_singleton(Point p) {
  return ClosedSet(SingletonSet{std::move(p)});
}
inline ClosedSet make_point_cloud(std::vector<Point> pts) {
  return ClosedSet(PointCloudSet{std::move(pts)});
}
inline ClosedSet make_sphere(Point center, double radius) {
  return ClosedSet(SphereSet{std::move(center), radius});
}
inline ClosedSet make_parabola(double scale) {
  return ClosedSet(ParabolaGraphSet{scale});
}
inline ClosedSet make_box(Point lower, Point upper) {
  return ClosedSet(BoxSet{std::move(lower), std::move(upper)});
}
inline ClosedSet make_affine(Point anchor, std::vector<Point> basis) {
  return ClosedSet(AffineSubspaceSet{std::move(anchor), std::move(basis)});
}
inline ClosedSet make_union(std::vector<ClosedSet> members) {
  return ClosedSet(UnionSet{std::move(members)});
}

namespace detail {

// Squared-distance tie window around the incumbent best.
inline bool tied_sq(double sq, double best_sq) {
  return sq - best_sq < 1e-12 * (1.0 + best_sq);
}

inline void sort_dedupe_reps(std::vector<Point>& reps) {
  std::sort(reps.begin(), reps.end(), lex_less);
  reps.erase(std::unique(reps.begin(), reps.end(),
                         [](const Point& a, const Point& b) {
                           return approx_equal(a, b, 1e-12 * (1.0 + a.norm()));
                         }),
             reps.end());
}

inline Eigen::Index validate_set(const SingletonSet& s) {
  require_point(s.point, "singleton set");
  return s.point.size();
}

inline Eigen::Index validate_set(const PointCloudSet& s) {
  if (s.points.empty()) throw usage_error("point cloud: needs at least one point");
  require_point(s.points.front(), "point cloud");
  const Eigen::Index dim = s.points.front().size();
  for (const Point& p : s.points) require_dim(p, dim, "point cloud");
  return dim;
}

inline Eigen::Index validate_set(const SphereSet& s) {
  require_point(s.center, "sphere");
  if (!std::isfinite(s.radius) || s.radius <= 0.0) {
    throw usage_error("sphere: radius must be finite and positive");
  }
  return s.center.size();
}

inline Eigen::Index validate_set(const ParabolaGraphSet& s) {
  if (!std::isfinite(s.scale) || s.scale == 0.0) {
    throw usage_error("parabola: scale must be finite and nonzero");
  }
  return 2;
}

inline Eigen::Index validate_set(const BoxSet& s) {
  require_point(s.lower, "box");
  require_dim(s.upper, s.lower.size(), "box");
  for (Eigen::Index i = 0; i < s.lower.size(); ++i) {
    if (s.lower[i] > s.upper[i]) {
      throw usage_error("box: lower bound exceeds upper bound on axis " +
                        std::to_string(i));
    }
  }
  return s.lower.size();
}

inline Eigen::Index validate_set(const AffineSubspaceSet& s) {
  require_point(s.anchor, "affine subspace");
  const Eigen::Index dim = s.anchor.size();
  if (static_cast<Eigen::Index>(s.basis.size()) > dim) {
    throw usage_error("affine subspace: more basis vectors than dimensions");
  }
  for (std::size_t i = 0; i < s.basis.size(); ++i) {
    require_dim(s.basis[i], dim, "affine subspace basis");
    for (std::size_t j = 0; j <= i; ++j) {
      const double want = (i == j) ? 1.0 : 0.0;
      if (std::abs(s.basis[i].dot(s.basis[j]) - want) > 1e-9) {
        throw usage_error("affine subspace: basis is not orthonormal");
      }
    }
  }
  return dim;
}

Eigen::Index validate_set(const UnionSet& s);

}  // namespace detail

inline ClosedSet::ClosedSet(Variant v) : v_(std::move(v)) {
  dim_ = std::visit([](const auto& s) { return detail::validate_set(s); }, v_);
}

namespace detail {

inline Eigen::Index validate_set(const UnionSet& s) {
  if (s.members.empty()) throw usage_error("union: needs at least one member");
  const Eigen::Index dim = s.members.front().dim();
  for (const ClosedSet& m : s.members) {
    if (m.dim() != dim) throw usage_error("union: members disagree on dimension");
  }
  return dim;
}

inline ProjectionResult project_impl(const SingletonSet& s, const Point& x) {
  ProjectionResult out;
  out.representatives = {s.point};
  out.cardinality = SetCardinality::kSingleton;
  out.distance = (x - s.point).norm();
  return out;
}

inline ProjectionResult project_impl(const PointCloudSet& s, const Point& x) {
  double best_sq = std::numeric_limits<double>::infinity();
  std::vector<double> sq(s.points.size());
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    sq[i] = (x - s.points[i]).squaredNorm();
    best_sq = std::min(best_sq, sq[i]);
  }
  ProjectionResult out;
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    if (tied_sq(sq[i], best_sq)) out.representatives.push_back(s.points[i]);
  }
  sort_dedupe_reps(out.representatives);
  out.cardinality = out.representatives.size() == 1
                        ? SetCardinality::kSingleton
                        : SetCardinality::kFiniteComplete;
  out.distance = std::sqrt(best_sq);
  return out;
}

inline ProjectionResult project_impl(const SphereSet& s, const Point& x) {
  ProjectionResult out;
  const Point v = x - s.center;
  const double n = v.norm();
  if (n == 0.0) {
    // Center query: the projection set is the whole sphere; report the 2N
    // axis points as canonical representatives.
    for (Eigen::Index i = 0; i < s.center.size(); ++i) {
      Point lo = s.center;
      lo[i] -= s.radius;
      Point hi = s.center;
      hi[i] += s.radius;
      out.representatives.push_back(std::move(lo));
      out.representatives.push_back(std::move(hi));
    }
    sort_dedupe_reps(out.representatives);
    out.cardinality = SetCardinality::kInfinite;
    out.distance = s.radius;
    return out;
  }
  out.representatives = {s.center + (s.radius / n) * v};
  out.cardinality = SetCardinality::kSingleton;
  out.distance = std::abs(n - s.radius);
  return out;
}

inline ProjectionResult project_impl(const ParabolaGraphSet& s, const Point& x) {
  // Stationarity of |(t, a t^2) - x|^2 in t is the depressed cubic
  //   t^3 + c1 t + c0 = 0,  c1 = (1 - 2 a x2) / (2 a^2),  c0 = -x1 / (2 a^2).
  const double a = s.scale;
  const double c1 = (1.0 - 2.0 * a * x[1]) / (2.0 * a * a);
  const double c0 = -x[0] / (2.0 * a * a);
  const CubicRoots roots = depressed_cubic_roots(c1, c0);

  double best_sq = std::numeric_limits<double>::infinity();
  std::array<double, 3> sq{};
  for (int i = 0; i < roots.count; ++i) {
    const double t = roots.roots[i];
    const double dx = t - x[0];
    const double dy = a * t * t - x[1];
    sq[i] = dx * dx + dy * dy;
    best_sq = std::min(best_sq, sq[i]);
  }

  ProjectionResult out;
  for (int i = 0; i < roots.count; ++i) {
    if (tied_sq(sq[i], best_sq)) {
      const double t = roots.roots[i];
      out.representatives.push_back(point({t, a * t * t}));
    }
  }
  sort_dedupe_reps(out.representatives);
  out.cardinality = out.representatives.size() == 1
                        ? SetCardinality::kSingleton
                        : SetCardinality::kFiniteComplete;
  out.distance = std::sqrt(best_sq);
  return out;
}

inline ProjectionResult project_impl(const BoxSet& s, const Point& x) {
  ProjectionResult out;
  Point y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    y[i] = std::clamp(x[i], s.lower[i], s.upper[i]);
  }
  out.distance = (x - y).norm();
  out.representatives = {std::move(y)};
  out.cardinality = SetCardinality::kSingleton;
  return out;
}

inline ProjectionResult project_impl(const AffineSubspaceSet& s, const Point& x) {
  ProjectionResult out;
  Point y = s.anchor;
  const Point rel = x - s.anchor;
  for (const Point& b : s.basis) y += b.dot(rel) * b;
  out.distance = (x - y).norm();
  out.representatives = {std::move(y)};
  out.cardinality = SetCardinality::kSingleton;
  return out;
}

inline ProjectionResult project_impl(const UnionSet& s, const Point& x) {
  std::vector<ProjectionResult> parts;
  parts.reserve(s.members.size());
  double best = std::numeric_limits<double>::infinity();
  for (const ClosedSet& m : s.members) {
    parts.push_back(project(m, x));
    best = std::min(best, parts.back().distance);
  }
  ProjectionResult out;
  out.distance = best;
  out.cardinality = SetCardinality::kSingleton;
  bool infinite = false;
  for (const ProjectionResult& pr : parts) {
    if (!tied_sq(pr.distance * pr.distance, best * best)) continue;
    out.representatives.insert(out.representatives.end(),
                               pr.representatives.begin(),
                               pr.representatives.end());
    if (pr.cardinality == SetCardinality::kInfinite) infinite = true;
  }
  sort_dedupe_reps(out.representatives);
  if (infinite) {
    out.cardinality = SetCardinality::kInfinite;
  } else {
    out.cardinality = out.representatives.size() == 1
                          ? SetCardinality::kSingleton
                          : SetCardinality::kFiniteComplete;
  }
  return out;
}

}  // namespace detail

inline ProjectionResult project(const ClosedSet& set, const Point& x) {
  require_dim(x, set.dim(), "project");
  ProjectionResult out = std::visit(
      [&x](const auto& s) { return detail::project_impl(s, x); }, set.variant());
  if (out.representatives.empty()) {
    throw internal_error("project: produced no representatives");
  }
  return out;
}

}  // namespace pllab
