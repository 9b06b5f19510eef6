#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pllab/certify.hpp"
#include "pllab/errors.hpp"
#include "pllab/functions.hpp"
#include "pllab/point.hpp"
#include "pllab/sets.hpp"

namespace pllab {

// A descent sequence is declared converged once its final gap is this small.
inline constexpr double kGapConvergedTol = 1e-10;
// Additive slack, scaled by 1 + |bound|, for the length-certificate checks.
inline constexpr double kLengthCertTol = 1e-8;

// phi(t) = (p / (q^(1/q) mu^(1/p))) t^(1/p) with 1/p + 1/q = 1.  Composing
// with the gap of (mu/p) d^p turns the descent trajectory's length into a
// telescoping sum; phi_inverse is its exact functional inverse.
class Desingularizer {
 public:
  Desingularizer(double exponent, double modulus)
      : exponent_(exponent), modulus_(modulus) {
    if (!std::isfinite(exponent) || exponent <= 1.0) {
      throw usage_error("desingularizer: exponent must be finite and > 1");
    }
    if (!std::isfinite(modulus) || modulus <= 0.0) {
      throw usage_error("desingularizer: modulus must be finite and positive");
    }
    conjugate_ = exponent / (exponent - 1.0);
    coeff_ = exponent / (std::pow(conjugate_, 1.0 / conjugate_) *
                         std::pow(modulus, 1.0 / exponent));
  }

  double exponent() const { return exponent_; }
  double modulus() const { return modulus_; }
  double conjugate() const { return conjugate_; }

  double phi(double t) const {
    if (!(t >= 0.0)) throw usage_error("desingularizer: phi needs t >= 0");
    return coeff_ * std::pow(t, 1.0 / exponent_);
  }

  double phi_inverse(double s) const {
    if (!(s >= 0.0)) throw usage_error("desingularizer: phi_inverse needs s >= 0");
    return std::pow(s / coeff_, exponent_);
  }

 private:
  double exponent_;
  double modulus_;
  double conjugate_;
  double coeff_;
};

struct ProxStep {
  std::vector<Point> minimizers;  // nonempty, lexicographically sorted
  double objective = 0.0;
};

namespace detail {

// Fraction of the way to the nearest point travelled by one proximal step:
// the unique root in (0,1) of  theta = mu d^(p-2) (1-theta)^(p-1).
inline double prox_theta(double exponent, double modulus, double dist) {
  if (exponent == 2.0) return modulus / (1.0 + modulus);
  const double c = modulus * std::pow(dist, exponent - 2.0);
  double lo = 0.0, hi = 1.0;
  auto g = [&](double th) {
    return th - c * std::pow(1.0 - th, exponent - 1.0);
  };
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double th = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {
    const double slope =
        1.0 + c * (exponent - 1.0) * std::pow(1.0 - th, exponent - 2.0);
    const double next = std::clamp(th - g(th) / slope, lo, hi);
    if (next == th) break;
    th = next;
  }
  return th;
}

}  // namespace detail

// One proximal step of f with unit stepsize: minimize f(u) + |u - x|^2 / 2.
// Every minimizer lies on a segment from x to a nearest point of the set,
// all witnesses give the same objective, and the one-dimensional restriction
// is solved by prox_theta.
inline ProxStep prox_step(const PowerDistanceFunction& f, const Point& x) {
  require_dim(x, f.set.dim(), "prox_step");
  const ProjectionResult pr = project(f.set, x);
  if (pr.distance <= kSetMembershipTol) {
    return ProxStep{{x}, value(f, x)};
  }
  const double d = pr.distance;
  const double theta = detail::prox_theta(f.exponent, f.modulus, d);
  ProxStep out;
  out.objective =
      f.modulus / f.exponent * std::pow((1.0 - theta) * d, f.exponent) +
      0.5 * theta * theta * d * d;
  out.minimizers.reserve(pr.representatives.size());
  for (const Point& w : pr.representatives) {
    out.minimizers.push_back(x + theta * (w - x));
  }
  std::sort(out.minimizers.begin(), out.minimizers.end(), lex_less);
  return out;
}

struct ProxTrace {
  std::vector<Point> iterates;  // starts at x0
  std::vector<double> gaps;     // one per iterate
  std::vector<double> steps;    // one per transition
  double total_length = 0.0;
  Point limit;
  bool converged = false;
};

// Repeated proximal steps from x0, taking the lexicographically smallest
// minimizer at every multivalued step.  Stops on membership, on a step
// shorter than step_tol, or after max_iter steps.
inline ProxTrace prox_sequence(const PowerDistanceFunction& f, const Point& x0,
                               int max_iter = 200, double step_tol = 1e-12) {
  require_dim(x0, f.set.dim(), "prox_sequence");
  if (max_iter < 1) throw usage_error("prox_sequence: max_iter must be >= 1");
  if (!std::isfinite(step_tol) || step_tol <= 0.0) {
    throw usage_error("prox_sequence: step_tol must be positive");
  }

  ProxTrace trace;
  trace.iterates.push_back(x0);
  trace.gaps.push_back(value(f, x0));
  for (int k = 0; k < max_iter; ++k) {
    const Point& current = trace.iterates.back();
    if (contains(f.set, current)) break;
    const ProxStep step = prox_step(f, current);
    const Point& next = step.minimizers.front();
    const double len = (next - current).norm();
    trace.steps.push_back(len);
    trace.iterates.push_back(next);
    trace.gaps.push_back(value(f, next));
    if (len < step_tol) break;
  }
  for (double s : trace.steps) trace.total_length += s;
  trace.limit = trace.iterates.back();
  trace.converged = trace.gaps.back() <= kGapConvergedTol;
  return trace;
}

// Certifies the finite-length bounds of the descent trajectory:
//   (i)   sum of steps        <= phi(gap_0)
//   (ii)  |x0 - limit|        <= phi(gap_0)
//   (iii) phi_inverse(d(x0))  <= gap_0   (growth at the start point)
//   (iv)  step_k <= phi(gap_k) - phi(gap_{k+1}) for every k (telescoping)
// A trace that has not converged is Inconclusive.  The estimate field
// reports the sharp growth constant p*gap_0/d(x0)^p at the start point; the
// claimed field carries the guaranteed modulus mu/(p-1)^(p-1).
inline CertificationReport finite_length_certificate(
    const ProxTrace& trace, const PowerDistanceFunction& f, const Point& x0) {
  if (trace.iterates.empty()) {
    throw usage_error("finite_length_certificate: empty trace");
  }
  require_dim(x0, f.set.dim(), "finite_length_certificate");
  if ((x0 - trace.iterates.front()).norm() > 1e-12 * (1.0 + x0.norm())) {
    throw usage_error("finite_length_certificate: x0 is not the trace start");
  }

  const Desingularizer desing(f.exponent, f.modulus);
  CertificationReport r;
  r.property = {PropertyKind::kFiniteLength, f.exponent, 0.0};
  r.claimed_constant =
      f.modulus / std::pow(f.exponent - 1.0, f.exponent - 1.0);
  r.tolerance = kLengthCertTol;
  r.samples_used = static_cast<long long>(trace.iterates.size());
  r.witness = x0;

  const double gap0 = trace.gaps.front();
  const double d0 = distance(f.set, x0);
  r.estimated_constant =
      d0 <= kSetMembershipTol
          ? std::numeric_limits<double>::infinity()
          : f.exponent * gap0 / std::pow(d0, f.exponent);

  if (!trace.converged) {
    r.verdict = Verdict::kInconclusive;
    return r;
  }

  const double budget = desing.phi(gap0);
  const double slack = kLengthCertTol * (1.0 + budget);
  bool ok = trace.total_length <= budget + slack;
  ok = ok && (x0 - trace.limit).norm() <= budget + slack;
  ok = ok &&
       desing.phi_inverse(d0) <= gap0 + kLengthCertTol * (1.0 + gap0);
  for (std::size_t k = 0; ok && k < trace.steps.size(); ++k) {
    const double lhs = trace.steps[k];
    const double budget_k = desing.phi(trace.gaps[k]);
    const double rhs = budget_k - desing.phi(trace.gaps[k + 1]);
    ok = lhs <= rhs + kLengthCertTol * (1.0 + budget_k);
  }
  r.verdict = ok ? Verdict::kHolds : Verdict::kViolated;
  return r;
}

}  // namespace pllab
