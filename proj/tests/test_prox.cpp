#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "pllab/prox.hpp"
#include "support/catalog.hpp"

using namespace pllab;
using testsupport::TestRng;

TEST_CASE("desingularizer frozen values and round trip") {
  const Desingularizer d(2.0, 1.0);
  CHECK(d.conjugate() == 2.0);
  CHECK(d.phi(0.5) == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(d.phi_inverse(1.0) == Catch::Approx(0.5).epsilon(1e-14));
  CHECK(d.phi(0.0) == 0.0);

  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    const Desingularizer ds(p, 0.7);
    for (double t : {1e-8, 1e-3, 0.5, 1.0, 42.0}) {
      CHECK(ds.phi_inverse(ds.phi(t)) == Catch::Approx(t).epsilon(1e-12));
      CHECK(ds.phi(ds.phi_inverse(t)) == Catch::Approx(t).epsilon(1e-12));
    }
    // Monotone increasing from zero.
    CHECK(ds.phi(0.0) == 0.0);
    CHECK(ds.phi(0.5) < ds.phi(1.0));
  }

  CHECK_THROWS_AS(Desingularizer(1.0, 1.0), usage_error);
  CHECK_THROWS_AS(Desingularizer(2.0, 0.0), usage_error);
  CHECK_THROWS_AS(d.phi(-1.0), usage_error);
}

TEST_CASE("prox step splits the way to a singleton") {
  const PowerDistanceFunction f(make_singleton(point({0.0})), 2.0, 1.0);
  const ProxStep s = prox_step(f, point({4.0}));
  REQUIRE(s.minimizers.size() == 1);
  CHECK(s.minimizers[0][0] == 2.0);
  CHECK(s.objective == 4.0);
}

TEST_CASE("prox step on the circle walks half the gap at unit modulus") {
  const PowerDistanceFunction f(testsupport::unit_circle(), 2.0, 1.0);
  const ProxStep s = prox_step(f, point({2.0, 0.0}));
  REQUIRE(s.minimizers.size() == 1);
  CHECK(approx_equal(s.minimizers[0], point({1.5, 0.0}), 1e-15));
  CHECK(s.objective == Catch::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("members are fixed points of the prox") {
  const PowerDistanceFunction f(testsupport::unit_circle(), 2.0, 1.0);
  const Point x = point({0.0, 1.0});
  const ProxStep s = prox_step(f, x);
  REQUIRE(s.minimizers.size() == 1);
  CHECK((s.minimizers[0] - x).norm() == 0.0);
  CHECK(s.objective == 0.0);
}

TEST_CASE("multivalued prox at the circle center keeps all candidates") {
  const PowerDistanceFunction f(testsupport::unit_circle(), 2.0, 1.0);
  const ProxStep s = prox_step(f, point({0.0, 0.0}));
  REQUIRE(s.minimizers.size() == 4);
  CHECK(approx_equal(s.minimizers[0], point({-0.5, 0.0}), 1e-15));
  CHECK(s.objective == Catch::Approx(0.25).epsilon(1e-15));
  CHECK(std::is_sorted(s.minimizers.begin(), s.minimizers.end(), lex_less));
}

TEST_CASE("prox objective beats both trivial candidates") {
  TestRng rng(140683);
  for (const auto& [label, set] : testsupport::catalog2d()) {
    for (double p : {1.5, 2.0, 3.0}) {
      const PowerDistanceFunction f(set, p, 0.8);
      for (int i = 0; i < 25; ++i) {
        const Point x = rng.point_in_box(-2.5, 2.5, 2);
        const ProxStep s = prox_step(f, x);
        const double d = distance(f.set, x);
        INFO(label << " p=" << p);
        CHECK(s.objective <= value(f, x) + 1e-12);
        CHECK(s.objective <= 0.5 * d * d + 1e-12);
      }
    }
  }
}

TEST_CASE("prox step is optimal against random probes") {
  TestRng rng(555888);
  const std::vector<ClosedSet> sets = {testsupport::unit_circle(),
                                       testsupport::standard_parabola()};
  for (const ClosedSet& set : sets) {
    const PowerDistanceFunction f(set, 2.0, 1.0);
    for (int i = 0; i < 30; ++i) {
      const Point x = rng.point_in_box(-2.0, 2.0, 2);
      const double d = distance(f.set, x);
      if (d <= 1e-8) continue;
      const ProxStep s = prox_step(f, x);
      for (int probe = 0; probe < 2000; ++probe) {
        Point u(2);
        // Rejection-free: scale a box sample into the 2d ball around x.
        u[0] = rng.uniform(-1.0, 1.0);
        u[1] = rng.uniform(-1.0, 1.0);
        u = x + (2.0 * d) * u;
        const double h = value(f, u) + 0.5 * (u - x).squaredNorm();
        CHECK(h >= s.objective - 1e-12 * (1.0 + std::abs(s.objective)));
      }
    }
  }
}

TEST_CASE("halving trace toward a singleton") {
  const PowerDistanceFunction f(make_singleton(point({0.0})), 2.0, 1.0);
  const ProxTrace t = prox_sequence(f, point({1.0}));
  // Exact halving until the iterate counts as a member (2^-34 <= 1e-10).
  REQUIRE(t.iterates.size() == 35);
  REQUIRE(t.steps.size() == 34);
  CHECK(t.iterates[1][0] == 0.5);
  CHECK(t.iterates[5][0] == std::pow(2.0, -5.0));
  CHECK(t.steps[0] == 0.5);
  CHECK(t.total_length == 1.0 - std::pow(2.0, -34.0));
  CHECK(t.converged);
  CHECK(t.limit[0] == std::pow(2.0, -34.0));
}

TEST_CASE("trace from a member is a single row") {
  const PowerDistanceFunction f(testsupport::unit_circle(), 2.0, 1.0);
  const ProxTrace t = prox_sequence(f, point({0.0, -1.0}));
  CHECK(t.iterates.size() == 1);
  CHECK(t.steps.empty());
  CHECK(t.total_length == 0.0);
  CHECK(t.converged);
  CHECK(t.gaps.front() == 0.0);
}

TEST_CASE("circle trace rides the ray to the nearest point") {
  const PowerDistanceFunction f(testsupport::unit_circle(), 2.0, 1.0);
  const ProxTrace t = prox_sequence(f, point({2.0, 0.0}));
  CHECK(t.converged);
  CHECK((t.limit - point({1.0, 0.0})).norm() <= 1e-10);
  CHECK(t.total_length == Catch::Approx(1.0).epsilon(1e-10));
  for (const Point& it : t.iterates) CHECK(it[1] == 0.0);
}

TEST_CASE("center start breaks the tie lexicographically") {
  const PowerDistanceFunction f(testsupport::unit_circle(), 2.0, 1.0);
  const ProxTrace t = prox_sequence(f, point({0.0, 0.0}));
  REQUIRE(t.iterates.size() >= 2);
  CHECK(approx_equal(t.iterates[1], point({-0.5, 0.0}), 1e-15));
  CHECK((t.limit - point({-1.0, 0.0})).norm() <= 1e-10);
}

TEST_CASE("gaps descend along the trace") {
  TestRng rng(220301);
  const PowerDistanceFunction f(testsupport::standard_parabola(), 2.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const Point x0 = rng.point_in_box(-2.0, 2.0, 2);
    const ProxTrace t = prox_sequence(f, x0);
    for (std::size_t k = 0; k + 1 < t.gaps.size(); ++k) {
      CHECK(t.gaps[k + 1] <= t.gaps[k] + 1e-15);
    }
    // One-step descent including the movement cost.
    for (std::size_t k = 0; k + 1 < t.iterates.size(); ++k) {
      CHECK(t.gaps[k + 1] + 0.5 * t.steps[k] * t.steps[k] <=
            t.gaps[k] + 1e-12);
    }
  }
}

TEST_CASE("quadratic-exponent step law") {
  TestRng rng(71102);
  for (double mu : {0.5, 1.0, 20.0}) {
    const PowerDistanceFunction f(testsupport::unit_circle(), 2.0, mu);
    const double theta = mu / (1.0 + mu);
    const Point x0 = rng.point_in_box(-2.0, 2.0, 2);
    const ProxTrace t = prox_sequence(f, x0);
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
      const double dk = distance(f.set, t.iterates[k]);
      const double dk1 = distance(f.set, t.iterates[k + 1]);
      if (dk <= 1e-9) break;
      CHECK(t.steps[k] ==
            Catch::Approx(theta * dk).epsilon(1e-9).margin(1e-13));
      CHECK(dk1 ==
            Catch::Approx((1.0 - theta) * dk).epsilon(1e-9).margin(1e-13));
    }
  }
}

TEST_CASE("finite length certificate holds on nonconvex instances") {
  TestRng rng(907711);
  const std::vector<ClosedSet> sets = {testsupport::unit_circle(),
                                       testsupport::standard_parabola()};
  for (const ClosedSet& set : sets) {
    for (double mu : {0.5, 1.0, 20.0}) {
      const PowerDistanceFunction f(set, 2.0, mu);
      for (int i = 0; i < 10; ++i) {
        const Point x0 = rng.point_in_box(-2.0, 2.0, 2);
        const ProxTrace t = prox_sequence(f, x0);
        REQUIRE(t.converged);
        const CertificationReport r = finite_length_certificate(t, f, x0);
        CHECK(r.verdict == Verdict::kHolds);
        CHECK(r.property.kind == PropertyKind::kFiniteLength);
        CHECK(*r.claimed_constant == mu);
      }
    }
  }
}

TEST_CASE("length bound is tight on convex instances") {
  TestRng rng(31417);
  const std::vector<ClosedSet> sets = {
      make_singleton(point({0.3, -0.2})),
      make_box(point({-0.5, -0.25}), point({0.5, 0.5})),
      make_affine(point({0.0, 0.3}), {point({std::sqrt(0.5), std::sqrt(0.5)})}),
  };
  for (const ClosedSet& set : sets) {
    for (double mu : {0.5, 1.0, 20.0}) {
      const PowerDistanceFunction f(set, 2.0, mu);
      for (int i = 0; i < 5; ++i) {
        const Point x0 = rng.point_in_box(-2.0, 2.0, 2);
        const ProxTrace t = prox_sequence(f, x0);
        REQUIRE(t.converged);
        const Desingularizer desing(2.0, mu);
        // Straight-line descent: the travelled length equals the budget.
        CHECK(std::abs((x0 - t.limit).norm() - desing.phi(t.gaps.front())) <=
              1e-9);
        CHECK(finite_length_certificate(t, f, x0).verdict == Verdict::kHolds);
      }
    }
  }
}

TEST_CASE("cubic exponent keeps the certificate valid with slack") {
  const PowerDistanceFunction f(make_singleton(point({0.0})), 3.0, 1.0);
  // Above exponent two the tail decays like 1/k, so allow a longer run.
  const ProxTrace t = prox_sequence(f, point({1.0}), 4000);
  REQUIRE(t.converged);
  const CertificationReport r = finite_length_certificate(t, f, point({1.0}));
  CHECK(r.verdict == Verdict::kHolds);
  CHECK(*r.claimed_constant == 0.25);
  CHECK(r.estimated_constant == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exponents below two honestly fail the telescoping bound") {
  // The per-step estimate requires exponent >= 2; below it the trajectory is
  // longer than the budget and the certificate must report the violation.
  const PowerDistanceFunction f(make_singleton(point({0.0})), 1.5, 1.0);
  const ProxTrace t = prox_sequence(f, point({1.0}));
  REQUIRE(t.converged);
  const CertificationReport r = finite_length_certificate(t, f, point({1.0}));
  CHECK(r.verdict == Verdict::kViolated);
  const Desingularizer desing(1.5, 1.0);
  CHECK(t.total_length > desing.phi(t.gaps.front()) + 1e-3);
}

TEST_CASE("unconverged traces are inconclusive") {
  const PowerDistanceFunction f(testsupport::unit_circle(), 2.0, 0.1);
  const ProxTrace t = prox_sequence(f, point({2.0, 0.0}), 3);
  CHECK_FALSE(t.converged);
  const CertificationReport r =
      finite_length_certificate(t, f, point({2.0, 0.0}));
  CHECK(r.verdict == Verdict::kInconclusive);
}

TEST_CASE("prox input validation") {
  const PowerDistanceFunction f(testsupport::unit_circle(), 2.0, 1.0);
  CHECK_THROWS_AS(prox_sequence(f, point({2.0, 0.0}), 0), usage_error);
  CHECK_THROWS_AS(prox_sequence(f, point({2.0, 0.0}), 10, 0.0), usage_error);
  CHECK_THROWS_AS(prox_step(f, point({1.0})), usage_error);

  const ProxTrace t = prox_sequence(f, point({2.0, 0.0}));
  CHECK_THROWS_AS(finite_length_certificate(t, f, point({3.0, 0.0})),
                  usage_error);
}
