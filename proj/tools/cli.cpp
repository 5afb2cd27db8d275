#include "cli.hpp"

#include <cmath>
#include <numbers>
#include <optional>

#include <CLI11.hpp>

#include "carnot/diffops.hpp"
#include "carnot/hardy.hpp"
#include "carnot/random.hpp"
#include "emit.hpp"
#include "group_file.hpp"

namespace carnot::cli {

namespace {

struct RunConfig {
  std::string command;
  std::string group;
  double alpha = 0.0;
  std::uint64_t seed = 1;
  std::uint64_t budget = 100000;
  double tol = 1e-2;
  std::string output = "json";
  std::string method = "radial";
  std::string quadrature = "mc";
  std::string profile = "sin";
  double L = std::log(100.0);
  std::optional<double> beta;
  double r_in = 1.0;
  int count = 1;
  std::vector<double> L_grid;
  int decades = 6;
  std::optional<double> Q;
  std::string candidate = "builtin";
  double scale = 4.0;
  int samples = 1000;
  double R = 2.0;
};

/// A command's result: the JSON document, plus the tabular view used for CSV.
struct Report {
  Json doc;
  std::vector<std::string> columns;
  Json rows = Json::array();
  int exit_code = ExitCode::ok;
};

const std::vector<std::string> kEchoColumns = {"version", "group", "alpha", "seed", "budget", "method"};

Json echo(const RunConfig& c) {
  Json j;
  j["version"] = kVersion;
  j["command"] = c.command;
  j["group"] = c.group;
  j["alpha"] = c.alpha;
  j["seed"] = c.seed;
  j["budget"] = c.budget;
  j["method"] = c.quadrature;
  j["tol"] = c.tol;
  return j;
}

QuadratureConfig quadrature(const RunConfig& c) {
  QuadratureConfig q;
  q.method = parse_quadrature_method(c.quadrature);
  q.budget = c.budget;
  q.seed = c.seed;
  q.target_rel_tol = c.tol;
  q.validate();
  return q;
}

Json result_json(const IntegrationResult& r) {
  Json j;
  j["value"] = r.value;
  j["error_estimate"] = r.error_estimate;
  j["evals"] = r.evals;
  j["tolerance_met"] = r.tolerance_met;
  return j;
}

Json report_json(const HardyReport& r) {
  Json j;
  j["group"] = r.group;
  j["alpha"] = r.alpha;
  j["quotient_method"] = std::string(to_string(r.method));
  j["numerator"] = result_json(r.numerator);
  j["denominator"] = result_json(r.denominator);
  j["quotient"] = r.quotient;
  j["quotient_error"] = r.quotient_error;
  j["sharp_constant"] = r.sharp_constant;
  j["relative_gap"] = r.relative_gap;
  j["relative_gap_error"] = r.relative_gap_error;
  j["tolerance_met"] = r.tolerance_met;
  j["bound_holds"] = r.satisfies_bound(3.0);
  return j;
}

Json vector_json(const Vector& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Json bump_json(const Bump& b) {
  Json j;
  j["center"] = vector_json(b.center);
  j["radii"] = vector_json(b.radii);
  j["tilt"] = vector_json(b.tilt);
  j["plateau"] = b.plateau;
  return j;
}

Json quotient_row(std::uint64_t index, const HardyReport& r) {
  Json j;
  j["index"] = index;
  j["numerator"] = r.numerator.value;
  j["numerator_error"] = r.numerator.error_estimate;
  j["denominator"] = r.denominator.value;
  j["denominator_error"] = r.denominator.error_estimate;
  j["quotient"] = r.quotient;
  j["quotient_error"] = r.quotient_error;
  j["sharp_constant"] = r.sharp_constant;
  j["relative_gap"] = r.relative_gap;
  j["bound_holds"] = r.satisfies_bound(3.0);
  return j;
}

ScalarField candidate_norm(const GroupSpec& g, const RunConfig& c) {
  if (c.candidate == "builtin") return norm_field(g);
  const int m = g.horizontal_dim();
  const auto split = [m](const auto& vars, Eigen::Index n) {
    using J = std::decay_t<decltype(vars[0])>;
    J a = J::constant(0.0, n), b = J::constant(0.0, n);
    for (Eigen::Index i = 0; i < n; ++i) (i < m ? a : b) = (i < m ? a : b) + square(vars[i]);
    return std::pair{a, b};
  };
  if (c.candidate == "quadratic-mixed") {
    return ScalarField::from_generic(
        [split](const auto& vars, Eigen::Index n) {
          const auto [v2, z2] = split(vars, n);
          return sqrt(v2 + z2);
        },
        Smoothness::away_from_origin);
  }
  if (c.candidate == "scaled") {
    const double s = c.scale;
    return ScalarField::from_generic(
        [split, s](const auto& vars, Eigen::Index n) {
          const auto [v2, z2] = split(vars, n);
          return pow(square(v2) + s * z2, 0.25);
        },
        Smoothness::away_from_origin);
  }
  throw InvalidArgument("unknown candidate norm '" + c.candidate + "'");
}

Report cmd_groups(const RunConfig& c) {
  Report r;
  std::vector<GroupSpec> groups;
  if (!c.group.empty()) {
    groups.push_back(resolve_group(c.group));
  } else {
    for (const char* name : {"h1", "h2", "h3", "quaternionic-h1", "abelian-3"}) groups.push_back(builtin_group(name));
  }
  for (const auto& g : groups) r.rows.push_back(describe_group(g));
  r.doc["config"] = echo(c);
  r.doc["groups"] = r.rows;
  r.columns = {"name", "kind", "dim", "horizontal_dim", "step", "homogeneous_dimension", "norm"};
  return r;
}

Report cmd_check_identities(const RunConfig& c) {
  const GroupSpec g = resolve_group(c.group);
  IdentityBatteryOptions opts;
  opts.samples = c.samples;
  opts.seed = c.seed;
  Report r;
  bool all = true;
  for (const auto& check : identity_battery(g, opts)) {
    Json j;
    j["name"] = check.name;
    j["max_residual"] = check.max_residual;
    j["threshold"] = check.threshold;
    j["samples"] = check.samples;
    j["passed"] = check.passed;
    all = all && check.passed;
    r.rows.push_back(std::move(j));
  }
  r.doc["config"] = echo(c);
  r.doc["samples"] = c.samples;
  r.doc["passed"] = all;
  r.doc["checks"] = r.rows;
  r.columns = {"name", "max_residual", "threshold", "samples", "passed"};
  r.exit_code = all ? ExitCode::ok : ExitCode::violation;
  return r;
}

Report cmd_quotient(const RunConfig& c) {
  const HardyProblem p(resolve_group(c.group), c.alpha);
  const auto method = parse_quotient_method(c.method);
  Report r;
  r.doc["config"] = echo(c);
  r.doc["config"]["quotient_method"] = c.method;
  r.doc["config"]["profile"] = c.profile;
  if (c.profile == "sin") {
    const double beta = c.beta.value_or(optimal_beta(p.homogeneous_dimension(), c.alpha));
    const auto phi = TestFunction::log_sine(beta, c.r_in, c.L);
    const auto rep = rayleigh_quotient(p, phi, quadrature(c), method);
    r.doc["config"]["L"] = c.L;
    r.doc["config"]["r_in"] = c.r_in;
    r.doc["config"]["beta"] = beta;
    const Json flat = report_json(rep);
    for (const auto& [key, value] : flat.items()) r.doc[key] = value;
    if (method == QuotientMethod::radial_1d) r.doc["predicted"] = p.sharp_constant() + std::pow(std::numbers::pi / c.L, 2);
    r.rows.push_back(quotient_row(0, rep));
    r.exit_code = rep.satisfies_bound(3.0) ? ExitCode::ok : ExitCode::violation;
  } else if (c.profile == "bump") {
    if (method != QuotientMethod::full_dim) throw InvalidArgument("bump profiles need --method full");
    r.doc["config"]["count"] = c.count;
    r.doc["sharp_constant"] = p.sharp_constant();
    try {
      for (const auto& row : inequality_battery(p, c.count, c.seed, quadrature(c))) {
        Json j = quotient_row(row.index, row.report);
        r.rows.push_back(j);
        j["bump"] = bump_json(row.bump);
        r.doc["results"].push_back(std::move(j));
      }
      if (!r.doc.contains("results")) r.doc["results"] = Json::array();
      r.doc["violation"] = nullptr;
    } catch (const InequalityViolation& v) {
      r.doc["results"] = r.rows;
      r.doc["violation"] = report_json(v.report());
      r.doc["violation"]["diagnostic"] = v.what();
      r.exit_code = ExitCode::violation;
    }
  } else {
    throw InvalidArgument("unknown profile '" + c.profile + "'");
  }
  r.columns = {"index",           "numerator", "numerator_error", "denominator",  "denominator_error",
               "quotient",        "quotient_error", "sharp_constant", "relative_gap", "bound_holds"};
  return r;
}

Report cmd_sweep(const RunConfig& c) {
  const HardyProblem p(resolve_group(c.group), c.alpha);
  const auto grid = c.L_grid.empty() ? decade_grid(c.decades) : c.L_grid;
  const auto s = sharpness_sweep(p, grid, c.r_in);
  Report r;
  bool below = false;
  for (const auto& row : s.rows) {
    Json j;
    j["L"] = row.L;
    j["quotient"] = row.quotient;
    j["predicted"] = row.predicted;
    j["deviation"] = row.deviation;
    r.rows.push_back(std::move(j));
    below = below || row.quotient < s.sharp_constant * (1.0 - 1e-9);
  }
  r.doc["config"] = echo(c);
  r.doc["config"]["r_in"] = c.r_in;
  r.doc["group"] = s.group;
  r.doc["alpha"] = s.alpha;
  r.doc["sharp_constant"] = s.sharp_constant;
  r.doc["gap_slope"] = s.gap_slope;
  r.doc["rows"] = r.rows;
  r.columns = {"L", "quotient", "predicted", "deviation"};
  r.exit_code = below ? ExitCode::violation : ExitCode::ok;
  return r;
}

Report cmd_uncertainty(const RunConfig& c) {
  const GroupSpec g = resolve_group(c.group);
  const auto cfg = quadrature(c);
  if (c.count < 0) throw InvalidArgument("--count must be nonnegative");
  Report r;
  bool all = true;
  for (int i = 0; i < c.count; ++i) {
    const auto index = static_cast<std::uint64_t>(i);
    const Bump b = random_bump(g, c.seed, index);
    QuadratureConfig local = cfg;
    local.seed = splitmix64(cfg.seed + index);
    const auto u = uncertainty_check(g, TestFunction::bump(b), local);
    Json j;
    j["index"] = index;
    j["lhs"] = u.lhs;
    j["lhs_error"] = u.lhs_error;
    j["rhs"] = u.rhs;
    j["rhs_error"] = u.rhs_error;
    j["ok"] = u.ok;
    all = all && u.ok;
    r.rows.push_back(std::move(j));
  }
  r.doc["config"] = echo(c);
  r.doc["config"]["count"] = c.count;
  r.doc["all_ok"] = all;
  r.doc["results"] = r.rows;
  r.columns = {"index", "lhs", "lhs_error", "rhs", "rhs_error", "ok"};
  r.exit_code = all ? ExitCode::ok : ExitCode::violation;
  return r;
}

Report cmd_certify(const RunConfig& c) {
  const GroupSpec g = resolve_group(c.group);
  CertifyOptions opts;
  opts.samples = c.samples;
  opts.seed = c.seed;
  const auto cert = certify_norm(g, candidate_norm(g, c), opts);
  Report r;
  r.doc["config"] = echo(c);
  r.doc["config"]["candidate"] = c.candidate;
  if (c.candidate == "scaled") r.doc["config"]["scale"] = c.scale;
  const std::pair<const char*, std::pair<double, bool>> gates[] = {
      {"homogeneity", {cert.homogeneity, cert.homogeneity_ok}},
      {"symmetry", {cert.symmetry, cert.symmetry_ok}},
      {"positivity", {cert.positivity, cert.positivity_ok}},
      {"harmonicity", {cert.harmonicity, cert.harmonicity_ok}},
  };
  for (const auto& [name, gate] : gates) {
    Json j;
    j["gate"] = name;
    j["residual"] = gate.first;
    j["threshold"] = std::string(name) == "harmonicity" ? opts.harmonic_threshold : opts.algebraic_threshold;
    j["passed"] = gate.second;
    r.rows.push_back(std::move(j));
  }
  r.doc["samples"] = cert.samples;
  r.doc["passed"] = cert.passed();
  r.doc["gates"] = r.rows;
  r.columns = {"gate", "residual", "threshold", "passed"};
  r.exit_code = cert.passed() ? ExitCode::ok : ExitCode::violation;
  return r;
}

Report cmd_volume(const RunConfig& c) {
  const GroupSpec g = resolve_group(c.group);
  const auto cfg = quadrature(c);
  QuadratureConfig unit_cfg = cfg;
  unit_cfg.seed = splitmix64(cfg.seed);
  const auto big = ball_volume(g, c.R, cfg);
  const auto unit = ball_volume(g, 1.0, unit_cfg);
  const double q = g.homogeneous_dimension();
  const double ratio = big.value / unit.value;
  const double ratio_error = ratio * std::hypot(big.error_estimate / big.value, unit.error_estimate / unit.value);
  const double predicted = std::pow(c.R, q);
  Report r;
  r.doc["config"] = echo(c);
  r.doc["config"]["R"] = c.R;
  r.doc["homogeneous_dimension"] = g.homogeneous_dimension();
  r.doc["volume"] = result_json(big);
  r.doc["unit_volume"] = result_json(unit);
  r.doc["ratio"] = ratio;
  r.doc["ratio_error"] = ratio_error;
  r.doc["predicted_ratio"] = predicted;
  const bool within = std::abs(ratio - predicted) <= 3.0 * ratio_error;
  r.doc["within_3_sigma"] = within;
  Json row;
  row["R"] = c.R;
  row["volume"] = big.value;
  row["volume_error"] = big.error_estimate;
  row["unit_volume"] = unit.value;
  row["unit_volume_error"] = unit.error_estimate;
  row["ratio"] = ratio;
  row["ratio_error"] = ratio_error;
  row["predicted_ratio"] = predicted;
  r.rows.push_back(std::move(row));
  r.columns = {"R", "volume", "volume_error", "unit_volume", "unit_volume_error", "ratio", "ratio_error",
               "predicted_ratio"};
  r.exit_code = within ? ExitCode::ok : ExitCode::violation;
  return r;
}

Report cmd_sharp_constant(const RunConfig& c) {
  if (!c.Q && c.group.empty()) throw InvalidArgument("sharp-constant needs --Q or --group");
  const double q = c.Q ? *c.Q : resolve_group(c.group).homogeneous_dimension();
  Report r;
  r.doc["config"] = echo(c);
  r.doc["Q"] = q;
  r.doc["alpha"] = c.alpha;
  r.doc["constant"] = sharp_constant(q, c.alpha);
  r.doc["optimal_beta"] = optimal_beta(q, c.alpha);
  Json row;
  row["Q"] = q;
  row["constant"] = r.doc["constant"];
  row["optimal_beta"] = r.doc["optimal_beta"];
  r.rows.push_back(std::move(row));
  r.columns = {"Q", "constant", "optimal_beta"};
  return r;
}

std::string render(const Report& r, const RunConfig& c) {
  if (c.output == "json") return to_json_text(r.doc);
  std::vector<std::string> header = kEchoColumns;
  header.insert(header.end(), r.columns.begin(), r.columns.end());
  const Json e = echo(c);
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json full;
    for (const auto& k : kEchoColumns) full[k] = e[k];
    for (const auto& [k, v] : row.items()) full[k] = v;
    rows.push_back(std::move(full));
  }
  return to_csv_text(header, rows);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Hardy inequalities and sub-Laplacian identities on Carnot groups", "carnot"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  const auto common = [&](CLI::App* s, bool needs_group) {
    auto* g = s->add_option("--group", c.group, "Built-in group name or path to a JSON group spec");
    if (needs_group) g->required();
    s->add_option("--seed", c.seed, "64-bit seed")->capture_default_str();
    s->add_option("--output", c.output, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  };
  const auto hardy = [&](CLI::App* s) {
    s->add_option("--alpha", c.alpha, "Weight exponent")->capture_default_str();
  };
  const auto quad = [&](CLI::App* s) {
    s->add_option("--budget", c.budget, "Integrand evaluations per integral")->capture_default_str();
    s->add_option("--tol", c.tol, "Target relative tolerance")->capture_default_str();
    s->add_option("--quadrature", c.quadrature, "Integration method")
        ->check(CLI::IsMember({"mc", "qmc", "adaptive", "monte_carlo", "quasi_monte_carlo", "adaptive_tensor"}))
        ->capture_default_str();
  };

  auto* groups = app.add_subcommand("groups", "Describe built-in groups or a group spec file");
  common(groups, false);

  auto* ident = app.add_subcommand("check-identities", "Run the pointwise identity battery");
  common(ident, true);
  ident->add_option("--samples", c.samples, "Random points per identity")->check(CLI::PositiveNumber)->capture_default_str();

  auto* quot = app.add_subcommand("quotient", "Hardy quotient of a test function");
  common(quot, true);
  hardy(quot);
  quad(quot);
  quot->add_option("--profile", c.profile, "Test function family")->check(CLI::IsMember({"sin", "bump"}))->capture_default_str();
  quot->add_option("--method", c.method, "Quotient method")
      ->check(CLI::IsMember({"radial", "full", "radial_1d", "full_dim"}))
      ->capture_default_str();
  quot->add_option("--L", c.L, "Log-width of the sine profile")->capture_default_str();
  quot->add_option("--beta", c.beta, "Radial exponent (defaults to the optimal one)");
  quot->add_option("--r-in", c.r_in, "Inner radius of the sine profile")->capture_default_str();
  quot->add_option("--count", c.count, "Number of random bumps")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Sharpness sweep of the log-sine family");
  common(sweep, true);
  hardy(sweep);
  sweep->add_option("--L-grid", c.L_grid, "Comma-separated increasing log-widths")->delimiter(',');
  sweep->add_option("--decades", c.decades, "Use L = ln 10^k, k = 1..decades")->capture_default_str();
  sweep->add_option("--r-in", c.r_in, "Inner radius")->capture_default_str();

  auto* unc = app.add_subcommand("uncertainty", "Uncertainty principle on random bumps");
  common(unc, true);
  quad(unc);
  unc->add_option("--count", c.count, "Number of random bumps")->capture_default_str();

  auto* cert = app.add_subcommand("certify-norm", "Check a candidate homogeneous norm");
  common(cert, true);
  cert->add_option("--candidate", c.candidate, "Candidate norm")
      ->check(CLI::IsMember({"builtin", "quadratic-mixed", "scaled"}))
      ->capture_default_str();
  cert->add_option("--scale", c.scale, "Center coefficient of the scaled candidate")->capture_default_str();
  cert->add_option("--samples", c.samples, "Random sample points")->check(CLI::PositiveNumber)->capture_default_str();

  auto* vol = app.add_subcommand("volume", "Monte Carlo volume of a norm ball and its scaling");
  common(vol, true);
  quad(vol);
  vol->add_option("--R", c.R, "Ball radius")->capture_default_str();

  auto* sharp = app.add_subcommand("sharp-constant", "Sharp Hardy constant ((Q + alpha - 2) / 2)^2");
  common(sharp, false);
  hardy(sharp);
  sharp->add_option("--Q", c.Q, "Homogeneous dimension");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ExitCode::ok;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return ExitCode::ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto chosen = app.get_subcommands();
    err << (chosen.empty() ? app.help() : chosen.front()->help());
    return ExitCode::usage_error;
  }

  CLI::App* chosen = app.get_subcommands().front();
  c.command = chosen->get_name();
  try {
    Report r;
    if (chosen == groups) r = cmd_groups(c);
    else if (chosen == ident) r = cmd_check_identities(c);
    else if (chosen == quot) r = cmd_quotient(c);
    else if (chosen == sweep) r = cmd_sweep(c);
    else if (chosen == unc) r = cmd_uncertainty(c);
    else if (chosen == cert) r = cmd_certify(c);
    else if (chosen == vol) r = cmd_volume(c);
    else r = cmd_sharp_constant(c);
    out << render(r, c);
    if (r.exit_code == ExitCode::violation && r.doc.contains("violation") && r.doc["violation"].is_object()) {
      err << r.doc["violation"]["diagnostic"].get<std::string>() << '\n';
    }
    return r.exit_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::usage_error;
  }
}

}  // namespace carnot::cli
