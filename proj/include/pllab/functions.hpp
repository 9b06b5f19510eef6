#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "pllab/errors.hpp"
#include "pllab/hull.hpp"
#include "pllab/point.hpp"
#include "pllab/sets.hpp"

namespace pllab {

// f(x) = (modulus / exponent) * distance(set, x)^exponent with exponent > 1
// and modulus > 0.  Minimizers are exactly the set, with value 0.
struct PowerDistanceFunction {
  PowerDistanceFunction(ClosedSet set_in, double exponent_in, double modulus_in)
      : set(std::move(set_in)), exponent(exponent_in), modulus(modulus_in) {
    if (!std::isfinite(exponent) || exponent <= 1.0) {
      throw usage_error("power distance: exponent must be finite and > 1");
    }
    if (!std::isfinite(modulus) || modulus <= 0.0) {
      throw usage_error("power distance: modulus must be finite and positive");
    }
  }

  ClosedSet set;
  double exponent;
  double modulus;
};

// Finite witness list for the limiting subdifferential at one point.
// complete means the list is exactly the subdifferential; an infinite
// projection set (sphere queried at its center) makes it a sample only.
struct SubgradientSample {
  std::vector<Point> vectors;  // nonempty, lexicographically sorted
  bool complete = true;
  // Set when 0 < distance < 1e-8: powers of a near-vanishing distance are
  // ill-conditioned, exponents below 2 especially.
  bool near_set_warning = false;
};

inline double value(const PowerDistanceFunction& f, const Point& x) {
  const double d = distance(f.set, x);
  return f.modulus / f.exponent * std::pow(d, f.exponent);
}

namespace detail {

inline SubgradientSample subdiff_from_projection(const PowerDistanceFunction& f,
                                                 const Point& x,
                                                 const ProjectionResult& pr) {
  SubgradientSample out;
  if (pr.distance <= kSetMembershipTol) {
    out.vectors = {Point::Zero(x.size())};
    return out;
  }
  out.near_set_warning = pr.distance < 1e-8;
  out.complete = pr.cardinality != SetCardinality::kInfinite;
  const double factor = f.modulus * std::pow(pr.distance, f.exponent - 2.0);
  out.vectors.reserve(pr.representatives.size());
  for (const Point& w : pr.representatives) {
    out.vectors.push_back(factor * (x - w));
  }
  std::sort(out.vectors.begin(), out.vectors.end(), lex_less);
  return out;
}

// True when the infinite projection set at x is a sphere centered exactly at
// x whose points attain the reported distance; then the scaled witnesses
// sweep a full sphere of radius modulus*distance^(exponent-1) around the
// origin, whose hull contains zero.
inline bool centered_sphere_attains(const ClosedSet& set, const Point& x,
                                    double dist) {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SphereSet>) {
          return (x - s.center).norm() == 0.0 && s.radius <= dist * (1.0 + 1e-12);
        } else if constexpr (std::is_same_v<T, UnionSet>) {
          for (const ClosedSet& m : s.members) {
            if (centered_sphere_attains(m, x, dist)) return true;
          }
          return false;
        } else {
          return false;
        }
      },
      set.variant());
}

}  // namespace detail

inline SubgradientSample limiting_subdiff(const PowerDistanceFunction& f,
                                          const Point& x) {
  require_dim(x, f.set.dim(), "limiting_subdiff");
  const ProjectionResult pr = project(f.set, x);
  return detail::subdiff_from_projection(f, x, pr);
}

// Minimum-norm reduction of a complete limiting sample to a single Clarke
// witness.  Callers with incomplete samples must resolve them analytically
// first; this refuses to guess.
inline Point clarke_witness_from_sample(const SubgradientSample& sample) {
  if (sample.vectors.empty()) {
    throw internal_error("clarke witness: empty subgradient sample");
  }
  if (!sample.complete) {
    throw hull_undecidable_error(
        "clarke witness: sample is incomplete, hull undecidable");
  }
  return min_norm_point(sample.vectors).point;
}

// Minimum-norm element of the Clarke subdifferential (convex hull of the
// limiting one).  The only infinite projection sets in the catalog come from
// spheres queried at their center, where the hull is a full ball around the
// origin and the minimum-norm element is zero exactly.
inline Point clarke_worst_witness(const PowerDistanceFunction& f, const Point& x) {
  require_dim(x, f.set.dim(), "clarke_worst_witness");
  const ProjectionResult pr = project(f.set, x);
  const SubgradientSample sample = detail::subdiff_from_projection(f, x, pr);
  if (sample.complete) return clarke_witness_from_sample(sample);
  if (detail::centered_sphere_attains(f.set, x, pr.distance)) {
    return Point::Zero(x.size());
  }
  throw hull_undecidable_error(
      "clarke witness: infinite projection set without analytic hull");
}

struct ClarkeMinNorm {
  double min_norm = 0.0;
  bool contains_zero = false;
};

inline ClarkeMinNorm clarke_min_norm(const PowerDistanceFunction& f,
                                     const Point& x) {
  const double n = clarke_worst_witness(f, x).norm();
  return ClarkeMinNorm{n, n <= 1e-9};
}

// Smooth comparison functions used by the certification drivers.

// g(x) = 0.5 * (x - shift)' matrix (x - shift); matrix symmetric PSD.
struct QuadraticForm {
  Eigen::MatrixXd matrix;
  Point shift;
};

// g(x) = (modulus / exponent) * |x|^exponent, exponent > 1, modulus > 0.
struct PowerNorm {
  double modulus = 1.0;
  double exponent = 2.0;
};

class SmoothTestFunction {
 public:
  using Variant = std::variant<QuadraticForm, PowerNorm>;

  explicit SmoothTestFunction(Variant v) : v_(std::move(v)) {
    if (const auto* q = std::get_if<QuadraticForm>(&v_)) {
      const Eigen::Index n = q->matrix.rows();
      if (n < 1 || q->matrix.cols() != n) {
        throw usage_error("quadratic: matrix must be square and nonempty");
      }
      if (!q->matrix.allFinite()) {
        throw usage_error("quadratic: matrix has non-finite entries");
      }
      require_dim(q->shift, n, "quadratic shift");
      const double asym = (q->matrix - q->matrix.transpose()).cwiseAbs().maxCoeff();
      if (asym > 1e-12 * (1.0 + q->matrix.cwiseAbs().maxCoeff())) {
        throw usage_error("quadratic: matrix must be symmetric");
      }
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q->matrix);
      const double top = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
      if (eig.eigenvalues().minCoeff() < -1e-9 * top) {
        throw usage_error("quadratic: matrix must be positive semidefinite");
      }
    } else {
      const auto& pn = std::get<PowerNorm>(v_);
      if (!std::isfinite(pn.exponent) || pn.exponent <= 1.0) {
        throw usage_error("power norm: exponent must be finite and > 1");
      }
      if (!std::isfinite(pn.modulus) || pn.modulus <= 0.0) {
        throw usage_error("power norm: modulus must be finite and positive");
      }
    }
  }

  const Variant& variant() const { return v_; }

  // Quadratics pin the ambient dimension; power norms work in any.
  Eigen::Index fixed_dim() const {
    if (const auto* q = std::get_if<QuadraticForm>(&v_)) return q->matrix.rows();
    return 0;
  }

 private:
  Variant v_;
};

struct Evaluation {
  double value = 0.0;
  Point gradient;
};

inline Evaluation eval_test_function(const SmoothTestFunction& g, const Point& x) {
  require_point(x, "eval_test_function");
  Evaluation out;
  if (const auto* q = std::get_if<QuadraticForm>(&g.variant())) {
    require_dim(x, q->matrix.rows(), "eval_test_function");
    const Point rel = x - q->shift;
    const Point grad = q->matrix * rel;
    out.value = 0.5 * rel.dot(grad);
    out.gradient = grad;
    return out;
  }
  const auto& pn = std::get<PowerNorm>(g.variant());
  const double n = x.norm();
  out.value = pn.modulus / pn.exponent * std::pow(n, pn.exponent);
  if (n == 0.0) {
    out.gradient = Point::Zero(x.size());
  } else {
    out.gradient = (pn.modulus * std::pow(n, pn.exponent - 2.0)) * x;
  }
  return out;
}

}  // namespace pllab
