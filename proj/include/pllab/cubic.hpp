#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace pllab {

// Real roots of the depressed cubic t^3 + c1*t + c0 = 0, ascending, deduced
// to distinct values.  count is always >= 1.
struct CubicRoots {
  std::array<double, 3> roots{};
  int count = 0;
};

namespace detail {

inline double cubic_value(double c1, double c0, double t) {
  return (t * t + c1) * t + c0;
}

inline double cubic_slope(double c1, double t) { return 3.0 * t * t + c1; }

// Guarded Newton refinement; keeps the best residual seen.
inline double polish_cubic_root(double c1, double c0, double t) {
  double best = t;
  double best_res = std::abs(cubic_value(c1, c0, t));
  for (int it = 0; it < 12; ++it) {
    const double slope = cubic_slope(c1, t);
    if (slope == 0.0 || !std::isfinite(slope)) break;
    const double next = t - cubic_value(c1, c0, t) / slope;
    if (!std::isfinite(next) || next == t) break;
    const double res = std::abs(cubic_value(c1, c0, next));
    if (res < best_res) {
      best = next;
      best_res = res;
    } else if (res > best_res) {
      break;
    }
    t = next;
  }
  return best;
}

// Requires a sign change between lo and hi.
inline double bisect_cubic_root(double c1, double c0, double lo, double hi) {
  double flo = cubic_value(c1, c0, lo);
  if (flo == 0.0) return lo;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fmid = cubic_value(c1, c0, mid);
    if (fmid == 0.0) return mid;
    if ((flo < 0.0) == (fmid < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Trigonometric branch for three real roots, cancellation-safe Cardano for
// one, Newton polish on every candidate, and a bracketed-bisection rescue if
// the closed forms come back with a bad residual.
inline CubicRoots depressed_cubic_roots(double c1, double c0) {
  std::array<double, 5> cand{};
  int n = 0;

  if (c1 == 0.0 && c0 == 0.0) {
    cand[n++] = 0.0;
  } else {
    const double disc = -4.0 * c1 * c1 * c1 - 27.0 * c0 * c0;
    if (disc > 0.0) {
      // Three distinct real roots; only reachable with c1 < 0.
      const double m = 2.0 * std::sqrt(-c1 / 3.0);
      const double cosarg = std::clamp(3.0 * c0 / (c1 * m), -1.0, 1.0);
      const double angle = std::acos(cosarg) / 3.0;
      constexpr double kTwoThirdsPi = 2.0943951023931953;
      cand[n++] = m * std::cos(angle);
      cand[n++] = m * std::cos(angle - kTwoThirdsPi);
      cand[n++] = m * std::cos(angle - 2.0 * kTwoThirdsPi);
    } else if (c1 == 0.0) {
      cand[n++] = std::cbrt(-c0);
    } else {
      const double s = std::sqrt(std::max(c0 * c0 / 4.0 + c1 * c1 * c1 / 27.0, 0.0));
      // Same-sign combination avoids cancellation in -c0/2 +- s.
      const double w = (c0 >= 0.0) ? (-c0 / 2.0 - s) : (-c0 / 2.0 + s);
      const double u = std::cbrt(w);
      cand[n++] = (u == 0.0) ? 0.0 : u - c1 / (3.0 * u);
      if (c1 < 0.0) {
        // Near-zero discriminant: a double root hides at a critical point.
        const double crit = std::sqrt(-c1 / 3.0);
        cand[n++] = crit;
        cand[n++] = -crit;
      }
    }
  }

  const double scale = 1.0 + std::abs(c1) + std::abs(c0);
  CubicRoots out;
  for (int i = 0; i < n; ++i) {
    const double t = detail::polish_cubic_root(c1, c0, cand[i]);
    if (!std::isfinite(t)) continue;
    if (std::abs(detail::cubic_value(c1, c0, t)) >
        1e-9 * scale * (1.0 + t * t * std::abs(t))) {
      continue;
    }
    bool dup = false;
    for (int j = 0; j < out.count; ++j) {
      if (std::abs(out.roots[j] - t) <= 1e-6 * (1.0 + std::abs(t))) dup = true;
    }
    if (!dup && out.count < 3) out.roots[out.count++] = t;
  }

  if (out.count == 0) {
    // Rescue: scan a Cauchy-style bracket for sign changes and bisect.
    const double radius = 1.0 + std::max(std::abs(c1), std::abs(c0));
    constexpr int kCells = 128;
    double prev_t = -radius;
    double prev_f = detail::cubic_value(c1, c0, prev_t);
    for (int i = 1; i <= kCells && out.count < 3; ++i) {
      const double t = -radius + 2.0 * radius * i / kCells;
      const double f = detail::cubic_value(c1, c0, t);
      if ((prev_f <= 0.0 && f >= 0.0) || (prev_f >= 0.0 && f <= 0.0)) {
        const double root = detail::polish_cubic_root(
            c1, c0, detail::bisect_cubic_root(c1, c0, prev_t, t));
        bool dup = false;
        for (int j = 0; j < out.count; ++j) {
          if (std::abs(out.roots[j] - root) <= 1e-6 * (1.0 + std::abs(root))) dup = true;
        }
        if (!dup) out.roots[out.count++] = root;
      }
      prev_t = t;
      prev_f = f;
    }
  }

  std::sort(out.roots.begin(), out.roots.begin() + out.count);
  return out;
}

}  // namespace pllab
