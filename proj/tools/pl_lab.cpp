#include <array>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include <CLI11.hpp>

#include "pllab/certify.hpp"
#include "pllab/errors.hpp"
#include "pllab/figure.hpp"
#include "pllab/functions.hpp"
#include "pllab/io.hpp"
#include "pllab/prox.hpp"
#include "pllab/sets.hpp"

namespace {

using pllab::Json;

Json load_json_file(const std::string& path, const char* ctx) {
  std::ifstream in(path);
  if (!in) {
    throw pllab::usage_error(std::string(ctx) + ": cannot read '" + path + "'");
  }
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw pllab::usage_error(std::string(ctx) + ": " + e.what());
  }
}

double require_number(const Json& config, const char* field, const char* ctx) {
  return pllab::detail::number_from_json(
      pllab::detail::require_field(config, field, ctx),
      (std::string(ctx) + " " + field).c_str());
}

int verdict_exit_code(pllab::Verdict v) {
  switch (v) {
    case pllab::Verdict::kHolds: return 0;
    case pllab::Verdict::kViolated: return 2;
    case pllab::Verdict::kInconclusive: return 3;
  }
  return 1;
}

pllab::SubgradientOracle build_oracle(const Json& config,
                                      const pllab::SamplingPlan& plan) {
  const pllab::FunctionSpec spec = pllab::function_from_json(
      pllab::detail::require_field(config, "function", "certify config"));

  pllab::SubgradientOracle oracle;
  if (const auto* f = std::get_if<pllab::PowerDistanceFunction>(&spec)) {
    pllab::WitnessMode mode = pllab::WitnessMode::kLimiting;
    if (config.contains("witness_mode")) {
      const Json& m = config["witness_mode"];
      if (m == "limiting") {
        mode = pllab::WitnessMode::kLimiting;
      } else if (m == "clarke") {
        mode = pllab::WitnessMode::kClarke;
      } else {
        throw pllab::usage_error(
            "certify config: witness_mode must be 'limiting' or 'clarke'");
      }
    }
    oracle = pllab::make_oracle(*f, mode);
  } else {
    if (config.contains("witness_mode")) {
      throw pllab::usage_error(
          "certify config: witness_mode applies only to power_distance");
    }
    oracle = pllab::make_oracle(std::get<pllab::SmoothTestFunction>(spec),
                                plan.dim());
  }
  if (config.contains("argmin")) {
    oracle.argmin = pllab::set_from_json(config["argmin"]);
  }
  return oracle;
}

int cmd_certify(const std::string& config_path) {
  const Json config = load_json_file(config_path, "certify config");
  pllab::detail::reject_unknown(config,
                                {"function", "property", "p", "plan", "claimed",
                                 "claimed_mu", "claimed_L", "witness_mode",
                                 "argmin"},
                                "certify config");

  const pllab::SamplingPlan plan = pllab::plan_from_json(
      pllab::detail::require_field(config, "plan", "certify config"));
  const pllab::SubgradientOracle oracle = build_oracle(config, plan);

  const Json& prop =
      pllab::detail::require_field(config, "property", "certify config");
  if (!prop.is_string()) {
    throw pllab::usage_error("certify config: property must be a string");
  }
  const std::string property = prop.get<std::string>();

  std::optional<double> claimed;
  if (config.contains("claimed")) {
    claimed = require_number(config, "claimed", "certify config");
  }

  pllab::CertificationReport report;
  if (property == "pl") {
    report = pllab::estimate_constant(oracle, 2.0, plan, claimed);
  } else if (property == "p_lojasiewicz") {
    report = pllab::estimate_constant(
        oracle, require_number(config, "p", "certify config"), plan, claimed);
  } else if (property == "conditioning" || property == "submetric_regularity") {
    if (!claimed) {
      throw pllab::usage_error("certify config: '" + property +
                               "' requires a claimed constant");
    }
    const double p = require_number(config, "p", "certify config");
    report = property == "conditioning"
                 ? pllab::conditioning_report(oracle, p, *claimed, plan)
                 : pllab::submetric_report(oracle, p, *claimed, plan);
  } else if (property == "sandwich") {
    if (claimed) {
      throw pllab::usage_error(
          "certify config: sandwich takes claimed_mu and claimed_L");
    }
    report = pllab::sandwich_report(
        oracle, require_number(config, "claimed_mu", "certify config"),
        require_number(config, "claimed_L", "certify config"), plan);
  } else {
    throw pllab::usage_error("certify config: unknown property '" + property +
                             "'");
  }

  std::cout << pllab::report_to_json(report).dump(2) << '\n';
  return verdict_exit_code(report.verdict);
}

int cmd_prox(const std::string& config_path) {
  const Json config = load_json_file(config_path, "prox config");
  pllab::detail::reject_unknown(
      config, {"function", "x0", "max_iter", "tol", "trace_csv"}, "prox config");

  const pllab::FunctionSpec spec = pllab::function_from_json(
      pllab::detail::require_field(config, "function", "prox config"));
  const auto* f = std::get_if<pllab::PowerDistanceFunction>(&spec);
  if (f == nullptr) {
    throw pllab::usage_error("prox config: function must be a power_distance");
  }
  const pllab::Point x0 = pllab::point_from_json(
      pllab::detail::require_field(config, "x0", "prox config"), "prox x0");

  int max_iter = 200;
  if (config.contains("max_iter")) {
    const Json& m = config["max_iter"];
    if (!m.is_number_integer()) {
      throw pllab::usage_error("prox config: max_iter must be an integer");
    }
    max_iter = m.get<int>();
  }
  double tol = 1e-12;
  if (config.contains("tol")) tol = require_number(config, "tol", "prox config");

  const pllab::ProxTrace trace = pllab::prox_sequence(*f, x0, max_iter, tol);

  if (config.contains("trace_csv")) {
    const Json& path = config["trace_csv"];
    if (!path.is_string()) {
      throw pllab::usage_error("prox config: trace_csv must be a path string");
    }
    std::ofstream out(path.get<std::string>());
    if (!out) {
      throw pllab::usage_error("prox config: cannot write '" +
                               path.get<std::string>() + "'");
    }
    pllab::write_trace_csv(out, trace);
  } else {
    pllab::write_trace_csv(std::cout, trace);
  }

  const pllab::CertificationReport report =
      pllab::finite_length_certificate(trace, *f, x0);
  std::cout << pllab::report_to_json(report).dump(2) << '\n';
  return verdict_exit_code(report.verdict);
}

int cmd_figure(const std::string& set_path, double mu, double p,
               const std::string& bounds_text, int resolution,
               const std::string& out_path) {
  const pllab::ClosedSet set =
      pllab::set_from_json(load_json_file(set_path, "figure set"));

  const auto comma = bounds_text.find(',');
  if (comma == std::string::npos) {
    throw pllab::usage_error("figure: bounds must be LO,HI");
  }
  std::array<double, 2> bounds{};
  try {
    bounds[0] = std::stod(bounds_text.substr(0, comma));
    bounds[1] = std::stod(bounds_text.substr(comma + 1));
  } catch (const std::exception&) {
    throw pllab::usage_error("figure: bounds must be numeric LO,HI");
  }

  const pllab::PowerDistanceFunction f(set, p, mu);
  const pllab::FigureGrid grid =
      pllab::sample_figure_grid(f, bounds, bounds, resolution);

  std::ofstream out(out_path);
  if (!out) {
    throw pllab::usage_error("figure: cannot write '" + out_path + "'");
  }
  pllab::write_figure_csv(out, grid);
  return 0;
}

// The planar witness gap: at the circle center the limiting witnesses keep
// unit norm while their convex hull contains zero, so the gradient-style
// inequality survives for the limiting subdifferential only.
int cmd_counterexample() {
  using namespace pllab;
  const PowerDistanceFunction f(
      make_sphere(point({0.0, 0.0}), 1.0), 2.0, 1.0);
  const Point origin = point({0.0, 0.0});

  const double gap = value(f, origin);
  const SubgradientSample limiting = limiting_subdiff(f, origin);
  double limiting_min = std::numeric_limits<double>::infinity();
  for (const Point& v : limiting.vectors) {
    limiting_min = std::min(limiting_min, v.norm());
  }
  const ClarkeMinNorm clarke = clarke_min_norm(f, origin);

  const SamplingPlan plan(GridPlan{{{-2.0, 2.0}, {-2.0, 2.0}}, 41});
  const CertificationReport with_limiting = estimate_constant(
      make_oracle(f, WitnessMode::kLimiting), 2.0, plan, 1.0);
  const CertificationReport with_clarke = estimate_constant(
      make_oracle(f, WitnessMode::kClarke), 2.0, plan, 1.0);

  Json out;
  out["gap_at_origin"] = gap;
  out["limiting_min_norm"] = limiting_min;
  out["clarke_min_norm"] = clarke.min_norm;
  out["pl_limiting_holds_with_mu_1"] =
      with_limiting.verdict == Verdict::kHolds;
  out["pl_clarke_holds"] = with_clarke.verdict == Verdict::kHolds;
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certification toolkit for powered distance functions"};
  app.require_subcommand(1);

  std::string certify_config;
  CLI::App* certify = app.add_subcommand(
      "certify", "Estimate or verify an inequality constant from a JSON config");
  certify->add_option("--config", certify_config, "JSON config file")
      ->required();

  std::string prox_config;
  CLI::App* prox = app.add_subcommand(
      "prox", "Run a proximal descent trace and certify its length bounds");
  prox->add_option("--config", prox_config, "JSON config file")->required();

  std::string figure_set;
  std::string figure_bounds = "-2,2";
  std::string figure_out;
  double figure_mu = 1.0;
  double figure_p = 2.0;
  int figure_res = 101;
  CLI::App* figure = app.add_subcommand(
      "figure", "Sample a powered distance on a square grid to CSV");
  figure->add_option("--set", figure_set, "JSON set file")->required();
  figure->add_option("--mu", figure_mu, "modulus");
  figure->add_option("--p", figure_p, "exponent");
  figure->add_option("--bounds", figure_bounds, "axis bounds LO,HI");
  figure->add_option("--res", figure_res, "points per axis");
  figure->add_option("--out", figure_out, "output CSV path")->required();

  app.add_subcommand("counterexample",
                     "Report the circle-center witness computation");

  try {
    app.parse(argc, argv);
    if (certify->parsed()) return cmd_certify(certify_config);
    if (prox->parsed()) return cmd_prox(prox_config);
    if (figure->parsed()) {
      return cmd_figure(figure_set, figure_mu, figure_p, figure_bounds,
                        figure_res, figure_out);
    }
    return cmd_counterexample();
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "pl-lab: " << e.what() << '\n';
    return 1;
  }
}
