#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pllab/errors.hpp"
#include "pllab/functions.hpp"
#include "pllab/point.hpp"
#include "pllab/sets.hpp"

namespace pllab {

// Relative slack when comparing a claimed constant against the sampled one.
inline constexpr double kEstimateRelTol = 1e-6;
// Additive slack for pointwise inequality checks, scaled by 1 + |value|.
inline constexpr double kPointwiseCheckTol = 1e-9;
inline constexpr double kDefaultExclusionRadius = 1e-8;

enum class Verdict { kHolds, kViolated, kInconclusive };

enum class PropertyKind {
  kPL,                  // gradient-squared inequality, exponent 2
  kPLojasiewicz,        // general exponent > 1
  kConditioning,        // growth: (c/p) d_argmin^p <= gap
  kSubmetricRegularity, // c d_argmin^(p-1) <= least witness norm
  kSandwich,            // two-sided quadratic growth
  kFiniteLength,        // descent-sequence certificate
};

struct Property {
  PropertyKind kind = PropertyKind::kPL;
  double exponent = 2.0;
  double upper_constant = 0.0;  // sandwich only
};

struct CertificationReport {
  Property property;
  // Empirical extremal constant over the used samples; +infinity when every
  // used sample was vacuous.
  double estimated_constant = std::numeric_limits<double>::infinity();
  std::optional<double> claimed_constant;
  Verdict verdict = Verdict::kInconclusive;
  std::optional<Point> witness;  // extremal or violating sample
  long long samples_used = 0;
  double tolerance = 0.0;
};

struct GridPlan {
  std::vector<std::array<double, 2>> bounds;
  int points_per_axis = 2;
};

struct RandomUniformPlan {
  std::vector<std::array<double, 2>> bounds;
  long long count = 1;
  std::uint64_t seed = 0;
};

namespace detail {

inline void validate_bounds(const std::vector<std::array<double, 2>>& bounds) {
  if (bounds.empty()) throw usage_error("sampling plan: needs at least one axis");
  for (const auto& b : bounds) {
    if (!std::isfinite(b[0]) || !std::isfinite(b[1]) || b[0] > b[1]) {
      throw usage_error("sampling plan: bounds must be finite with lo <= hi");
    }
  }
}

// Endpoint-exact affine combination; the midpoint of symmetric bounds is
// exactly zero, which downstream origin-sensitive checks rely on.
inline double grid_coord(double lo, double hi, int i, int n) {
  if (n == 1) return lo;
  return (lo * static_cast<double>(n - 1 - i) + hi * static_cast<double>(i)) /
         static_cast<double>(n - 1);
}

}  // namespace detail

// Deterministic sample generator over an axis-aligned box.
class SamplingPlan {
 public:
  using Mode = std::variant<GridPlan, RandomUniformPlan>;

  explicit SamplingPlan(Mode mode,
                        double exclusion_radius = kDefaultExclusionRadius)
      : mode_(std::move(mode)), exclusion_radius_(exclusion_radius) {
    if (!std::isfinite(exclusion_radius_) || exclusion_radius_ < 0.0) {
      throw usage_error("sampling plan: exclusion radius must be >= 0");
    }
    if (const auto* g = std::get_if<GridPlan>(&mode_)) {
      detail::validate_bounds(g->bounds);
      if (g->points_per_axis < 1) {
        throw usage_error("sampling plan: points_per_axis must be >= 1");
      }
      const double total = std::pow(static_cast<double>(g->points_per_axis),
                                    static_cast<double>(g->bounds.size()));
      if (total > 1e8) throw usage_error("sampling plan: grid is too large");
    } else {
      const auto& r = std::get<RandomUniformPlan>(mode_);
      detail::validate_bounds(r.bounds);
      if (r.count < 1) throw usage_error("sampling plan: count must be >= 1");
      if (r.count > 100000000) throw usage_error("sampling plan: count is too large");
    }
  }

  const Mode& mode() const { return mode_; }
  double exclusion_radius() const { return exclusion_radius_; }

  Eigen::Index dim() const {
    return std::visit(
        [](const auto& m) { return static_cast<Eigen::Index>(m.bounds.size()); },
        mode_);
  }

  // Grids run axis 0 fastest; random draws fill axis 0 first per sample.
  // The output is identical across platforms for a fixed plan.
  std::vector<Point> enumerate() const {
    std::vector<Point> out;
    if (const auto* g = std::get_if<GridPlan>(&mode_)) {
      const int dims = static_cast<int>(g->bounds.size());
      const int n = g->points_per_axis;
      long long total = 1;
      for (int a = 0; a < dims; ++a) total *= n;
      out.reserve(static_cast<std::size_t>(total));
      std::vector<int> idx(dims, 0);
      for (long long s = 0; s < total; ++s) {
        Point x(dims);
        for (int a = 0; a < dims; ++a) {
          x[a] = detail::grid_coord(g->bounds[a][0], g->bounds[a][1], idx[a], n);
        }
        out.push_back(std::move(x));
        for (int a = 0; a < dims; ++a) {
          if (++idx[a] < n) break;
          idx[a] = 0;
        }
      }
      return out;
    }
    const auto& r = std::get<RandomUniformPlan>(mode_);
    const int dims = static_cast<int>(r.bounds.size());
    std::mt19937_64 eng(r.seed);
    out.reserve(static_cast<std::size_t>(r.count));
    for (long long s = 0; s < r.count; ++s) {
      Point x(dims);
      for (int a = 0; a < dims; ++a) {
        // 53-bit mapping in [0,1); avoids distribution objects whose streams
        // differ across standard libraries.
        const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
        x[a] = r.bounds[a][0] + u * (r.bounds[a][1] - r.bounds[a][0]);
      }
      out.push_back(std::move(x));
    }
    return out;
  }

 private:
  Mode mode_;
  double exclusion_radius_;
};

// Pointwise access to a function: value, subgradient witnesses, known
// infimum, and optionally a descriptor of its argmin used for exclusion
// zones and distance-based properties.
struct SubgradientOracle {
  Eigen::Index dim = 0;
  double inf_value = 0.0;
  std::optional<ClosedSet> argmin;
  std::function<double(const Point&)> value;
  std::function<SubgradientSample(const Point&)> subdiff;
};

enum class WitnessMode { kLimiting, kClarke };

inline SubgradientOracle make_oracle(const PowerDistanceFunction& f,
                                     WitnessMode mode = WitnessMode::kLimiting) {
  SubgradientOracle o;
  o.dim = f.set.dim();
  o.inf_value = 0.0;
  o.argmin = f.set;
  o.value = [f](const Point& x) { return value(f, x); };
  if (mode == WitnessMode::kLimiting) {
    o.subdiff = [f](const Point& x) { return limiting_subdiff(f, x); };
  } else {
    o.subdiff = [f](const Point& x) {
      SubgradientSample s;
      s.vectors = {clarke_worst_witness(f, x)};
      return s;
    };
  }
  return o;
}

inline SubgradientOracle make_oracle(const SmoothTestFunction& g,
                                     Eigen::Index dim) {
  if (dim < 1) throw usage_error("make_oracle: dimension must be >= 1");
  if (g.fixed_dim() != 0 && g.fixed_dim() != dim) {
    throw usage_error("make_oracle: dimension disagrees with the quadratic");
  }
  SubgradientOracle o;
  o.dim = dim;
  o.inf_value = 0.0;
  if (const auto* q = std::get_if<QuadraticForm>(&g.variant())) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q->matrix);
    const double top = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    std::vector<Point> null_basis;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (std::abs(eig.eigenvalues()[i]) <= 1e-10 * top) {
        null_basis.push_back(eig.eigenvectors().col(i));
      }
    }
    o.argmin = null_basis.empty()
                   ? make_singleton(q->shift)
                   : make_affine(q->shift, std::move(null_basis));
  } else {
    o.argmin = make_singleton(Point::Zero(dim));
  }
  o.value = [g](const Point& x) { return eval_test_function(g, x).value; };
  o.subdiff = [g](const Point& x) {
    SubgradientSample s;
    s.vectors = {eval_test_function(g, x).gradient};
    return s;
  };
  return o;
}

namespace detail {

inline void require_exponent(double exponent, const char* where) {
  if (!std::isfinite(exponent) || exponent <= 1.0) {
    throw usage_error(std::string(where) + ": exponent must be finite and > 1");
  }
}

inline void require_positive_claim(double claimed, const char* where) {
  if (!std::isfinite(claimed) || claimed <= 0.0) {
    throw usage_error(std::string(where) + ": claimed constant must be positive");
  }
}

inline void spot_check_argmin(const SubgradientOracle& oracle) {
  if (!oracle.argmin) return;
  if (oracle.argmin->dim() != oracle.dim) {
    throw usage_error("oracle: argmin dimension disagrees with the oracle");
  }
  const std::vector<Point> probes = {Point::Zero(oracle.dim),
                                     Point::Ones(oracle.dim)};
  for (const Point& probe : probes) {
    for (const Point& rep : project(*oracle.argmin, probe).representatives) {
      if (std::abs(oracle.value(rep) - oracle.inf_value) >
          1e-7 * (1.0 + std::abs(oracle.inf_value))) {
        throw usage_error("oracle: argmin descriptor leaves the zero level set");
      }
    }
  }
}

// Minimum tracker with a lexicographic tie-break on the witness.
struct MinTracker {
  double best = std::numeric_limits<double>::infinity();
  std::optional<Point> witness;

  void offer(double v, const Point& x) {
    if (!witness) {
      best = v;
      witness = x;
      return;
    }
    if (v < best) {
      best = v;
      witness = x;
    } else if (v == best && lex_less(x, *witness)) {
      witness = x;
    }
  }
};

// Maximum tracker, same tie-break.
struct MaxTracker {
  double best = -std::numeric_limits<double>::infinity();
  std::optional<Point> witness;

  void offer(double v, const Point& x) {
    if (!witness) {
      best = v;
      witness = x;
      return;
    }
    if (v > best) {
      best = v;
      witness = x;
    } else if (v == best && lex_less(x, *witness)) {
      witness = x;
    }
  }
};

inline bool excluded(const SubgradientOracle& oracle, const SamplingPlan& plan,
                     const Point& x) {
  return oracle.argmin &&
         distance(*oracle.argmin, x) < plan.exclusion_radius();
}

}  // namespace detail

// Pointwise Lojasiewicz modulus: the largest c for which the inequality
//   gap <= (1/q) c^(-q/p) |v|^q,  1/p + 1/q = 1,
// holds at x with the least-norm witness v.  Vacuous samples (gap <= 0)
// return +infinity; a zero witness with positive gap returns 0.
inline double loja_ratio(const SubgradientOracle& oracle, double exponent,
                         const Point& x) {
  detail::require_exponent(exponent, "loja_ratio");
  require_dim(x, oracle.dim, "loja_ratio");
  const double gap = oracle.value(x) - oracle.inf_value;
  const SubgradientSample sample = oracle.subdiff(x);
  if (sample.vectors.empty()) {
    throw internal_error("loja_ratio: oracle returned no witnesses");
  }
  if (gap <= 0.0) return std::numeric_limits<double>::infinity();
  double least = std::numeric_limits<double>::infinity();
  for (const Point& v : sample.vectors) least = std::min(least, v.norm());
  if (exponent == 2.0) return least * least / (2.0 * gap);
  const double conjugate = exponent / (exponent - 1.0);
  const double base = std::pow(least, conjugate) / (conjugate * gap);
  return std::pow(base, exponent - 1.0);
}

// Empirical infimum of loja_ratio over the plan.  With a claimed constant the
// verdict is one-sided: Holds certifies only that no sampled point refutes
// the claim at the reported tolerance.
inline CertificationReport estimate_constant(const SubgradientOracle& oracle,
                                             double exponent,
                                             const SamplingPlan& plan,
                                             std::optional<double> claimed = {}) {
  detail::require_exponent(exponent, "estimate_constant");
  if (claimed) detail::require_positive_claim(*claimed, "estimate_constant");
  if (plan.dim() != oracle.dim) {
    throw usage_error("estimate_constant: plan and oracle dimensions differ");
  }
  detail::spot_check_argmin(oracle);

  CertificationReport r;
  r.property.kind =
      exponent == 2.0 ? PropertyKind::kPL : PropertyKind::kPLojasiewicz;
  r.property.exponent = exponent;
  r.claimed_constant = claimed;
  r.tolerance = kEstimateRelTol;

  detail::MinTracker tracker;
  for (const Point& x : plan.enumerate()) {
    if (detail::excluded(oracle, plan, x)) continue;
    ++r.samples_used;
    tracker.offer(loja_ratio(oracle, exponent, x), x);
  }
  if (r.samples_used == 0) return r;

  r.estimated_constant = tracker.best;
  r.witness = tracker.witness;
  if (claimed) {
    r.verdict = *claimed <= tracker.best * (1.0 + kEstimateRelTol)
                    ? Verdict::kHolds
                    : Verdict::kViolated;
  } else {
    r.verdict = tracker.best > 0.0 ? Verdict::kHolds : Verdict::kViolated;
  }
  return r;
}

// Growth check (claimed/p) d_argmin^p <= gap at every sample, plus the
// empirical sharp constant inf p*gap/d^p.
inline CertificationReport conditioning_report(const SubgradientOracle& oracle,
                                               double exponent, double claimed,
                                               const SamplingPlan& plan) {
  detail::require_exponent(exponent, "conditioning_report");
  detail::require_positive_claim(claimed, "conditioning_report");
  if (!oracle.argmin) {
    throw usage_error("conditioning_report: oracle has no argmin descriptor");
  }
  if (plan.dim() != oracle.dim) {
    throw usage_error("conditioning_report: plan and oracle dimensions differ");
  }
  detail::spot_check_argmin(oracle);

  CertificationReport r;
  r.property = {PropertyKind::kConditioning, exponent, 0.0};
  r.claimed_constant = claimed;
  r.tolerance = kPointwiseCheckTol;

  detail::MinTracker estimate;
  detail::MaxTracker violation;
  bool violated = false;
  for (const Point& x : plan.enumerate()) {
    const double d = distance(*oracle.argmin, x);
    if (d < plan.exclusion_radius()) continue;
    ++r.samples_used;
    const double val = oracle.value(x);
    const double gap = val - oracle.inf_value;
    const double dpow = std::pow(d, exponent);
    estimate.offer(exponent * gap / dpow, x);
    const double excess = claimed / exponent * dpow - gap;
    if (excess > kPointwiseCheckTol * (1.0 + std::abs(val))) {
      violated = true;
      violation.offer(excess, x);
    }
  }
  if (r.samples_used == 0) return r;

  r.estimated_constant = estimate.best;
  if (violated) {
    r.verdict = Verdict::kViolated;
    r.witness = violation.witness;
  } else {
    r.verdict = Verdict::kHolds;
    r.witness = estimate.witness;
  }
  return r;
}

// Check claimed * d_argmin^(p-1) <= |least witness| at every sample, plus
// the empirical sharp constant.
inline CertificationReport submetric_report(const SubgradientOracle& oracle,
                                            double exponent, double claimed,
                                            const SamplingPlan& plan) {
  detail::require_exponent(exponent, "submetric_report");
  detail::require_positive_claim(claimed, "submetric_report");
  if (!oracle.argmin) {
    throw usage_error("submetric_report: oracle has no argmin descriptor");
  }
  if (plan.dim() != oracle.dim) {
    throw usage_error("submetric_report: plan and oracle dimensions differ");
  }
  detail::spot_check_argmin(oracle);

  CertificationReport r;
  r.property = {PropertyKind::kSubmetricRegularity, exponent, 0.0};
  r.claimed_constant = claimed;
  r.tolerance = kPointwiseCheckTol;

  detail::MinTracker estimate;
  detail::MaxTracker violation;
  bool violated = false;
  for (const Point& x : plan.enumerate()) {
    const double d = distance(*oracle.argmin, x);
    if (d < plan.exclusion_radius()) continue;
    ++r.samples_used;
    const SubgradientSample sample = oracle.subdiff(x);
    if (sample.vectors.empty()) {
      throw internal_error("submetric_report: oracle returned no witnesses");
    }
    double least = std::numeric_limits<double>::infinity();
    for (const Point& v : sample.vectors) least = std::min(least, v.norm());
    estimate.offer(least / std::pow(d, exponent - 1.0), x);
    const double excess = claimed * std::pow(d, exponent - 1.0) - least;
    if (excess > kPointwiseCheckTol * (1.0 + least)) {
      violated = true;
      violation.offer(excess, x);
    }
  }
  if (r.samples_used == 0) return r;

  r.estimated_constant = estimate.best;
  if (violated) {
    r.verdict = Verdict::kViolated;
    r.witness = violation.witness;
  } else {
    r.verdict = Verdict::kHolds;
    r.witness = estimate.witness;
  }
  return r;
}

// Two-sided growth (lower/2) d^2 <= gap <= (upper/2) d^2.  Samples where the
// subdifferential is multivalued or incomplete are skipped; the estimate is
// the empirical inf of 2*gap/d^2.
inline CertificationReport sandwich_report(const SubgradientOracle& oracle,
                                           double lower, double upper,
                                           const SamplingPlan& plan) {
  if (!std::isfinite(lower) || !std::isfinite(upper) || lower <= 0.0 ||
      upper < lower) {
    throw usage_error("sandwich_report: needs upper >= lower > 0");
  }
  if (!oracle.argmin) {
    throw usage_error("sandwich_report: oracle has no argmin descriptor");
  }
  if (plan.dim() != oracle.dim) {
    throw usage_error("sandwich_report: plan and oracle dimensions differ");
  }
  detail::spot_check_argmin(oracle);

  CertificationReport r;
  r.property = {PropertyKind::kSandwich, 2.0, upper};
  r.claimed_constant = lower;
  r.tolerance = kPointwiseCheckTol;

  detail::MinTracker estimate;
  detail::MaxTracker violation;
  bool violated = false;
  for (const Point& x : plan.enumerate()) {
    const double d = distance(*oracle.argmin, x);
    if (d < plan.exclusion_radius()) continue;
    const SubgradientSample sample = oracle.subdiff(x);
    if (sample.vectors.size() != 1 || !sample.complete) continue;
    ++r.samples_used;
    const double val = oracle.value(x);
    const double gap = val - oracle.inf_value;
    estimate.offer(2.0 * gap / (d * d), x);
    const double slack = kPointwiseCheckTol * (1.0 + std::abs(val));
    const double excess =
        std::max(lower / 2.0 * d * d - gap, gap - upper / 2.0 * d * d);
    if (excess > slack) {
      violated = true;
      violation.offer(excess, x);
    }
  }
  if (r.samples_used == 0) return r;

  r.estimated_constant = estimate.best;
  if (violated) {
    r.verdict = Verdict::kViolated;
    r.witness = violation.witness;
  } else {
    r.verdict = Verdict::kHolds;
    r.witness = estimate.witness;
  }
  return r;
}

}  // namespace pllab
