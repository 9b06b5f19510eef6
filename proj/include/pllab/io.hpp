#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pllab/certify.hpp"
#include "pllab/errors.hpp"
#include "pllab/functions.hpp"
#include "pllab/point.hpp"
#include "pllab/prox.hpp"
#include "pllab/sets.hpp"

namespace pllab {

// Ordered so that dumps are byte-stable: fields appear exactly as inserted.
using Json = nlohmann::ordered_json;

// Shortest decimal string that round-trips the value; negative zero prints
// as plain zero so equal values never produce different bytes.
inline std::string format_double(double v) {
  if (v == 0.0) v = 0.0;
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline const Json& require_field(const Json& j, const char* name,
                                 const char* ctx) {
  const auto it = j.find(name);
  if (it == j.end()) {
    throw usage_error(std::string(ctx) + ": missing field '" + name + "'");
  }
  return *it;
}

inline void reject_unknown(const Json& j, std::initializer_list<const char*> allowed,
                           const char* ctx) {
  if (!j.is_object()) throw usage_error(std::string(ctx) + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) {
      throw usage_error(std::string(ctx) + ": unknown field '" + key + "'");
    }
  }
}

inline double number_from_json(const Json& j, const char* ctx) {
  if (!j.is_number()) throw usage_error(std::string(ctx) + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw usage_error(std::string(ctx) + ": must be finite");
  return v;
}

}  // namespace detail

inline Point point_from_json(const Json& j, const char* ctx) {
  if (!j.is_array() || j.empty()) {
    throw usage_error(std::string(ctx) + ": expected a nonempty number array");
  }
  Point x(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] = detail::number_from_json(j[static_cast<std::size_t>(i)], ctx);
  }
  return x;
}

inline Json point_to_json(const Point& x) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) out.push_back(x[i]);
  return out;
}

inline std::vector<Point> points_from_json(const Json& j, const char* ctx) {
  if (!j.is_array() || j.empty()) {
    throw usage_error(std::string(ctx) + ": expected a nonempty array of points");
  }
  std::vector<Point> out;
  out.reserve(j.size());
  for (const Json& row : j) out.push_back(point_from_json(row, ctx));
  return out;
}

inline Json points_to_json(const std::vector<Point>& pts) {
  Json out = Json::array();
  for (const Point& p : pts) out.push_back(point_to_json(p));
  return out;
}

inline ClosedSet set_from_json(const Json& j);

inline Json set_to_json(const ClosedSet& set);

namespace detail {

inline ClosedSet parse_set_variant(const std::string& variant, const Json& j) {
  if (variant == "singleton") {
    reject_unknown(j, {"variant", "point"}, "singleton set");
    return make_singleton(point_from_json(require_field(j, "point", "singleton set"),
                                          "singleton point"));
  }
  if (variant == "point_cloud") {
    reject_unknown(j, {"variant", "points"}, "point cloud set");
    return make_point_cloud(points_from_json(
        require_field(j, "points", "point cloud set"), "point cloud points"));
  }
  if (variant == "sphere") {
    reject_unknown(j, {"variant", "center", "radius"}, "sphere set");
    return make_sphere(
        point_from_json(require_field(j, "center", "sphere set"), "sphere center"),
        number_from_json(require_field(j, "radius", "sphere set"), "sphere radius"));
  }
  if (variant == "parabola") {
    reject_unknown(j, {"variant", "scale"}, "parabola set");
    return make_parabola(
        number_from_json(require_field(j, "scale", "parabola set"), "parabola scale"));
  }
  if (variant == "box") {
    reject_unknown(j, {"variant", "lower", "upper"}, "box set");
    return make_box(
        point_from_json(require_field(j, "lower", "box set"), "box lower"),
        point_from_json(require_field(j, "upper", "box set"), "box upper"));
  }
  if (variant == "affine") {
    reject_unknown(j, {"variant", "anchor", "basis"}, "affine set");
    const Json& basis = require_field(j, "basis", "affine set");
    if (!basis.is_array()) {
      throw usage_error("affine set: basis must be an array of points");
    }
    std::vector<Point> dirs;
    dirs.reserve(basis.size());
    for (const Json& row : basis) dirs.push_back(point_from_json(row, "affine basis"));
    return make_affine(
        point_from_json(require_field(j, "anchor", "affine set"), "affine anchor"),
        std::move(dirs));
  }
  if (variant == "union") {
    reject_unknown(j, {"variant", "members"}, "union set");
    const Json& members = require_field(j, "members", "union set");
    if (!members.is_array() || members.empty()) {
      throw usage_error("union set: members must be a nonempty array");
    }
    std::vector<ClosedSet> sets;
    sets.reserve(members.size());
    for (const Json& m : members) sets.push_back(set_from_json(m));
    return make_union(std::move(sets));
  }
  throw usage_error("set: unknown variant '" + variant + "'");
}

}  // namespace detail

inline ClosedSet set_from_json(const Json& j) {
  if (!j.is_object()) throw usage_error("set: expected an object");
  const Json& v = detail::require_field(j, "variant", "set");
  if (!v.is_string()) throw usage_error("set: variant must be a string");
  return detail::parse_set_variant(v.get<std::string>(), j);
}

inline Json set_to_json(const ClosedSet& set) {
  return std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        Json out;
        if constexpr (std::is_same_v<T, SingletonSet>) {
          out["variant"] = "singleton";
          out["point"] = point_to_json(s.point);
        } else if constexpr (std::is_same_v<T, PointCloudSet>) {
          out["variant"] = "point_cloud";
          out["points"] = points_to_json(s.points);
        } else if constexpr (std::is_same_v<T, SphereSet>) {
          out["variant"] = "sphere";
          out["center"] = point_to_json(s.center);
          out["radius"] = s.radius;
        } else if constexpr (std::is_same_v<T, ParabolaGraphSet>) {
          out["variant"] = "parabola";
          out["scale"] = s.scale;
        } else if constexpr (std::is_same_v<T, BoxSet>) {
          out["variant"] = "box";
          out["lower"] = point_to_json(s.lower);
          out["upper"] = point_to_json(s.upper);
        } else if constexpr (std::is_same_v<T, AffineSubspaceSet>) {
          out["variant"] = "affine";
          out["anchor"] = point_to_json(s.anchor);
          out["basis"] = points_to_json(s.basis);
        } else {
          static_assert(std::is_same_v<T, UnionSet>);
          out["variant"] = "union";
          Json members = Json::array();
          for (const ClosedSet& m : s.members) members.push_back(set_to_json(m));
          out["members"] = std::move(members);
        }
        return out;
      },
      set.variant());
}

// Either of the two certifiable function families.
using FunctionSpec = std::variant<PowerDistanceFunction, SmoothTestFunction>;

inline FunctionSpec function_from_json(const Json& j) {
  if (!j.is_object()) throw usage_error("function: expected an object");
  const Json& k = detail::require_field(j, "kind", "function");
  if (!k.is_string()) throw usage_error("function: kind must be a string");
  const std::string kind = k.get<std::string>();
  if (kind == "power_distance") {
    detail::reject_unknown(j, {"kind", "mu", "p", "set"}, "power distance");
    return PowerDistanceFunction(
        set_from_json(detail::require_field(j, "set", "power distance")),
        detail::number_from_json(detail::require_field(j, "p", "power distance"),
                                 "power distance p"),
        detail::number_from_json(detail::require_field(j, "mu", "power distance"),
                                 "power distance mu"));
  }
  if (kind == "quadratic") {
    detail::reject_unknown(j, {"kind", "matrix", "shift"}, "quadratic");
    const std::vector<Point> rows = points_from_json(
        detail::require_field(j, "matrix", "quadratic"), "quadratic matrix");
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (rows[static_cast<std::size_t>(r)].size() != n) {
        throw usage_error("quadratic matrix: rows must be square");
      }
      a.row(r) = rows[static_cast<std::size_t>(r)].transpose();
    }
    return SmoothTestFunction(QuadraticForm{
        std::move(a),
        point_from_json(detail::require_field(j, "shift", "quadratic"),
                        "quadratic shift")});
  }
  if (kind == "power_norm") {
    detail::reject_unknown(j, {"kind", "mu", "p"}, "power norm");
    return SmoothTestFunction(PowerNorm{
        detail::number_from_json(detail::require_field(j, "mu", "power norm"),
                                 "power norm mu"),
        detail::number_from_json(detail::require_field(j, "p", "power norm"),
                                 "power norm p")});
  }
  throw usage_error("function: unknown kind '" + kind + "'");
}

inline Json function_to_json(const FunctionSpec& spec) {
  if (const auto* f = std::get_if<PowerDistanceFunction>(&spec)) {
    Json out;
    out["kind"] = "power_distance";
    out["mu"] = f->modulus;
    out["p"] = f->exponent;
    out["set"] = set_to_json(f->set);
    return out;
  }
  const auto& g = std::get<SmoothTestFunction>(spec);
  if (const auto* q = std::get_if<QuadraticForm>(&g.variant())) {
    Json out;
    out["kind"] = "quadratic";
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < q->matrix.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < q->matrix.cols(); ++c) {
        row.push_back(q->matrix(r, c));
      }
      rows.push_back(std::move(row));
    }
    out["matrix"] = std::move(rows);
    out["shift"] = point_to_json(q->shift);
    return out;
  }
  const auto& n = std::get<PowerNorm>(g.variant());
  Json out;
  out["kind"] = "power_norm";
  out["mu"] = n.modulus;
  out["p"] = n.exponent;
  return out;
}

inline SamplingPlan plan_from_json(const Json& j) {
  if (!j.is_object()) throw usage_error("plan: expected an object");
  const Json& m = detail::require_field(j, "mode", "plan");
  if (!m.is_string()) throw usage_error("plan: mode must be a string");
  const std::string mode = m.get<std::string>();

  auto parse_bounds = [&](const Json& b) {
    if (!b.is_array() || b.empty()) {
      throw usage_error("plan bounds: expected a nonempty array of [lo, hi]");
    }
    std::vector<std::array<double, 2>> out;
    out.reserve(b.size());
    for (const Json& axis : b) {
      if (!axis.is_array() || axis.size() != 2) {
        throw usage_error("plan bounds: each axis needs exactly [lo, hi]");
      }
      out.push_back({detail::number_from_json(axis[0], "plan bounds"),
                     detail::number_from_json(axis[1], "plan bounds")});
    }
    return out;
  };
  double exclusion = kDefaultExclusionRadius;
  if (j.contains("exclusion_radius")) {
    exclusion = detail::number_from_json(j["exclusion_radius"],
                                         "plan exclusion_radius");
  }

  if (mode == "grid") {
    detail::reject_unknown(
        j, {"mode", "bounds", "points_per_axis", "exclusion_radius"}, "grid plan");
    GridPlan g;
    g.bounds = parse_bounds(detail::require_field(j, "bounds", "grid plan"));
    const Json& n = detail::require_field(j, "points_per_axis", "grid plan");
    if (!n.is_number_integer()) {
      throw usage_error("grid plan: points_per_axis must be an integer");
    }
    g.points_per_axis = n.get<int>();
    return SamplingPlan(g, exclusion);
  }
  if (mode == "random_uniform") {
    detail::reject_unknown(
        j, {"mode", "bounds", "count", "seed", "exclusion_radius"},
        "random plan");
    RandomUniformPlan r;
    r.bounds = parse_bounds(detail::require_field(j, "bounds", "random plan"));
    const Json& c = detail::require_field(j, "count", "random plan");
    if (!c.is_number_integer()) {
      throw usage_error("random plan: count must be an integer");
    }
    r.count = c.get<long long>();
    const Json& s = detail::require_field(j, "seed", "random plan");
    if (!s.is_number_integer() || s.get<long long>() < 0) {
      throw usage_error("random plan: seed must be a nonnegative integer");
    }
    r.seed = s.get<std::uint64_t>();
    return SamplingPlan(r, exclusion);
  }
  throw usage_error("plan: unknown mode '" + mode + "'");
}

inline Json plan_to_json(const SamplingPlan& plan) {
  Json out;
  auto bounds_to_json = [](const std::vector<std::array<double, 2>>& bounds) {
    Json b = Json::array();
    for (const auto& axis : bounds) b.push_back(Json::array({axis[0], axis[1]}));
    return b;
  };
  if (const auto* g = std::get_if<GridPlan>(&plan.mode())) {
    out["mode"] = "grid";
    out["bounds"] = bounds_to_json(g->bounds);
    out["points_per_axis"] = g->points_per_axis;
  } else {
    const auto& r = std::get<RandomUniformPlan>(plan.mode());
    out["mode"] = "random_uniform";
    out["bounds"] = bounds_to_json(r.bounds);
    out["count"] = r.count;
    out["seed"] = r.seed;
  }
  out["exclusion_radius"] = plan.exclusion_radius();
  return out;
}

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kHolds: return "holds";
    case Verdict::kViolated: return "violated";
    case Verdict::kInconclusive: return "inconclusive";
  }
  throw internal_error("verdict: unknown value");
}

inline const char* property_kind_name(PropertyKind k) {
  switch (k) {
    case PropertyKind::kPL: return "pl";
    case PropertyKind::kPLojasiewicz: return "p_lojasiewicz";
    case PropertyKind::kConditioning: return "conditioning";
    case PropertyKind::kSubmetricRegularity: return "submetric_regularity";
    case PropertyKind::kSandwich: return "sandwich";
    case PropertyKind::kFiniteLength: return "finite_length";
  }
  throw internal_error("property kind: unknown value");
}

// Non-finite estimates (vacuous runs) serialize as null.
inline Json report_to_json(const CertificationReport& r) {
  Json prop;
  prop["kind"] = property_kind_name(r.property.kind);
  switch (r.property.kind) {
    case PropertyKind::kPLojasiewicz:
    case PropertyKind::kConditioning:
    case PropertyKind::kSubmetricRegularity:
    case PropertyKind::kFiniteLength:
      prop["p"] = r.property.exponent;
      break;
    case PropertyKind::kSandwich:
      prop["upper_constant"] = r.property.upper_constant;
      break;
    case PropertyKind::kPL:
      break;
  }
  Json out;
  out["property"] = std::move(prop);
  out["estimated_constant"] = r.estimated_constant;
  out["claimed_constant"] =
      r.claimed_constant ? Json(*r.claimed_constant) : Json(nullptr);
  out["verdict"] = verdict_name(r.verdict);
  out["witness"] = r.witness ? point_to_json(*r.witness) : Json(nullptr);
  out["samples_used"] = r.samples_used;
  out["tolerance"] = r.tolerance;
  return out;
}

inline Json trace_to_json(const ProxTrace& t) {
  Json out;
  out["iterates"] = points_to_json(t.iterates);
  Json gaps = Json::array();
  for (double g : t.gaps) gaps.push_back(g);
  out["gaps"] = std::move(gaps);
  Json steps = Json::array();
  for (double s : t.steps) steps.push_back(s);
  out["steps"] = std::move(steps);
  out["total_length"] = t.total_length;
  out["limit"] = point_to_json(t.limit);
  out["converged"] = t.converged;
  return out;
}

// One row per iterate; the step column holds the step leaving that row and
// zero on the final row.
inline void write_trace_csv(std::ostream& os, const ProxTrace& t) {
  if (t.iterates.empty()) throw usage_error("trace csv: empty trace");
  const Eigen::Index dims = t.iterates.front().size();
  os << "k";
  for (Eigen::Index a = 0; a < dims; ++a) os << ",x" << (a + 1);
  os << ",gap,step\n";
  for (std::size_t k = 0; k < t.iterates.size(); ++k) {
    os << k;
    for (Eigen::Index a = 0; a < dims; ++a) {
      os << ',' << format_double(t.iterates[k][a]);
    }
    os << ',' << format_double(t.gaps[k]);
    os << ',' << format_double(k < t.steps.size() ? t.steps[k] : 0.0);
    os << '\n';
  }
}

}  // namespace pllab
