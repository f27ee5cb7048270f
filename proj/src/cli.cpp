#include "shrinker/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "shrinker/catalog.hpp"
#include "shrinker/errors.hpp"
#include "shrinker/functional.hpp"
#include "shrinker/report.hpp"
#include "shrinker/stability.hpp"

namespace shrinker {

namespace {

using nlohmann::json;

// Options shared by every command that builds a shrinker.
struct SpecOptions {
  std::string name;
  std::string file;
  int n = 0;
  std::vector<int> resolution;
  std::string profile;
  int index = 0;
  int pieces = 0;
  std::vector<double> bracket;
  std::string out;
  std::uint64_t seed = 0;
  Tolerances tolerances;
};

void add_spec_options(CLI::App& cmd, SpecOptions& o) {
  cmd.add_option("spec", o.name, "catalog name (see `catalog list`)");
  cmd.add_option("--spec-file", o.file, "ShrinkerSpec JSON file")->check(CLI::ExistingFile);
  cmd.add_option("--n", o.n, "shrinker dimension")->check(CLI::PositiveNumber);
  cmd.add_option("--resolution", o.resolution, "node count per axis")->delimiter(',');
  cmd.add_option("--profile", o.profile, "anciaux profile: circle or shoot");
  cmd.add_option("--index", o.index, "anciaux rotation index l")->check(CLI::PositiveNumber);
  cmd.add_option("--pieces", o.pieces, "anciaux piece count m")->check(CLI::PositiveNumber);
  cmd.add_option("--bracket", o.bracket, "shooting bracket lo,hi as fractions of E_max")->delimiter(',')->expected(2);
  cmd.add_option("--out", o.out, "write the JSON report here instead of stdout");
  cmd.add_option("--seed", o.seed, "seed for random fields");
  cmd.add_option("--eps-Q", o.tolerances.eps_Q, "instability threshold")->check(CLI::PositiveNumber);
  cmd.add_option("--eps-c", o.tolerances.eps_c, "constraint tolerance per unit weighted area")->check(CLI::PositiveNumber);
  cmd.add_option("--tol-differential", o.tolerances.differential, "nodewise identity tolerance")->check(CLI::PositiveNumber);
  cmd.add_option("--tol-identity", o.tolerances.identity, "integral identity tolerance")->check(CLI::PositiveNumber);
}

ShrinkerSpec resolve_spec(const SpecOptions& o) {
  ShrinkerSpec spec;
  if (!o.file.empty()) {
    std::ifstream in(o.file);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidSpec, std::string("cannot parse spec file: ") + e.what());
    }
    spec = j.get<ShrinkerSpec>();
    if (o.n > 0) spec.n = o.n;
  } else {
    if (o.name.empty()) throw Error(ErrorCode::InvalidSpec, "a catalog name or --spec-file is required");
    spec = named_spec(o.name, o.n);
  }
  if (!o.resolution.empty()) spec.resolution = o.resolution;
  if (!o.profile.empty()) spec.profile = o.profile;
  if (o.index > 0) spec.index = o.index;
  if (o.pieces > 0) spec.pieces = o.pieces;
  if (o.bracket.size() == 2) {
    if (!(o.bracket[0] > 0.0 && o.bracket[0] < o.bracket[1] && o.bracket[1] < 1.0)) {
      throw Error(ErrorCode::InvalidSpec, "bracket must satisfy 0 < lo < hi < 1");
    }
    spec.bracket_lo = o.bracket[0];
    spec.bracket_hi = o.bracket[1];
  }
  return spec;
}

void emit(const SpecOptions& o, const json& doc, std::ostream& out) {
  const std::string text = dump(doc);
  if (o.out.empty()) {
    out << text;
  } else {
    write_atomic(o.out, text);
  }
}

Vec random_vector(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> normal;
  Vec v(m);
  for (int a = 0; a < m; ++a) v(a) = normal(rng);
  return v;
}

// Normal projection of c + B X with random c, B: a smooth random normal field.
NormalField random_normal_field(const Grid& grid, std::mt19937_64& rng) {
  const int m = grid.ambient();
  const Vec c = random_vector(rng, m);
  Mat b(m, m);
  for (int a = 0; a < m; ++a) b.col(a) = random_vector(rng, m);
  const Mat ambient = c.replicate(1, grid.size()) + b * grid.positions() / std::sqrt(static_cast<double>(m));
  return make_normal_field(grid, ambient);
}

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  double observed_order = 0.0;  // set when a coarser grid was compared
  bool converging = false;
  bool passed() const { return value <= tolerance || converging; }
};

double max_column_norm(const Mat& m) { return m.cols() == 0 ? 0.0 : m.colwise().norm().maxCoeff(); }

// Relative nodewise errors of the scalar and normal eigen-identities.
std::vector<std::pair<std::string, double>> differential_errors(const Grid& grid, std::uint64_t seed) {
  const int n = grid.dim();
  const auto relative = [](double err, double scale) { return err / std::max(1.0, scale); };
  const Mat x = grid.positions();
  const Vec r2 = column_dot(x, x);
  double lx = 0.0;
  for (int a = 0; a < grid.ambient(); ++a) {
    const Vec xa = x.row(a).transpose();
    lx = std::max(lx, relative((scalar_script_L(grid, xa) + 0.5 * xa).cwiseAbs().maxCoeff(), xa.cwiseAbs().maxCoeff()));
  }
  const double lr = relative((scalar_script_L(grid, r2) - (2.0 * n - r2.array()).matrix()).cwiseAbs().maxCoeff(), r2.maxCoeff());
  const NormalField h = mean_curvature_field(grid);
  const double lh = relative(max_column_norm(apply_L_perp(grid, h) - h.values), max_column_norm(h.values));
  std::mt19937_64 rng(seed);
  const Vec y = random_vector(rng, grid.ambient());
  const NormalField ty = translation_field(grid, y);
  const double ly = relative(max_column_norm(apply_L_perp(grid, ty) - 0.5 * ty.values), y.norm());
  return {{"script-L X_i = -X_i/2", lx}, {"script-L |X|^2 = 2n - |X|^2", lr}, {"L H = H", lh}, {"L y^perp = y^perp/2", ly}};
}

std::vector<Check> verify_checks(const BuiltShrinker& built, const Tolerances& tol, std::uint64_t seed) {
  const Grid& grid = built.grid;
  std::vector<Check> checks;
  const bool exact = grid.chart().analytic() && built.spec.kind != ShrinkerKind::anciaux;
  checks.push_back({"self-shrinker residual", grid.max_residual(), exact ? tol.residual_analytic : tol.residual_numeric});

  IdentityOptions identity;
  identity.tolerance = tol.identity;
  identity.seed = seed;
  for (const auto& c : integral_identities(grid, identity)) checks.push_back({c.name, c.residual, c.tolerance});

  // Nodewise differential identities carry discretization error: each passes when it is below
  // the tolerance or when halving the resolution shows convergence at order >= 1.9.
  const auto fine = differential_errors(grid, seed);
  std::vector<std::pair<std::string, double>> coarse;
  std::vector<int> half = built.grid.shape();
  if (built.spec.kind == ShrinkerKind::anciaux) half[0] = static_cast<int>(built.lagrangian->curve.samples.size()) / built.lagrangian->curve.pieces;
  bool coarse_ok = true;
  for (int& r : half) {
    r = r % 2 == 1 ? (r + 1) / 2 : r / 2;
    if (r < 8) coarse_ok = false;
  }
  if (coarse_ok) coarse = differential_errors(build(built.spec, half, grid.options()).grid, seed);
  for (size_t k = 0; k < fine.size(); ++k) {
    Check c{fine[k].first, fine[k].second, tol.differential};
    if (!c.passed() && !coarse.empty() && coarse[k].second > 0.0) {
      c.observed_order = std::log2(coarse[k].second / fine[k].second);
      c.converging = c.observed_order >= 1.9;
    }
    checks.push_back(c);
  }

  if (built.lagrangian) {
    const LagrangianShrinker& lag = *built.lagrangian;
    checks.push_back({"Lagrangian |omega(u_a, u_b)|", lag.max_omega, tol.lagrangian});
    checks.push_back({"metric blocks g_ss = 1, g_sj = 0, g_jk = r^2 h_jk", lag.max_metric_block_error, tol.lagrangian});
    checks.push_back({"H parallel to J u_s", lag.max_mean_curvature_alignment, tol.residual_numeric});
    checks.push_back({"profile closure gap", lag.curve.closure_gap, tol.closure});
    checks.push_back({"profile conservation drift", lag.curve.conservation_drift, 1e-9});
  }
  return checks;
}

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::UnknownName:
    case ErrorCode::InvalidSpec:
    case ErrorCode::InvalidDimension:
    case ErrorCode::ResolutionTooLow:
    case ErrorCode::GridTooCoarse: return kExitUsage;
    case ErrorCode::CaseNotCovered: return kExitCaseNotCovered;
    case ErrorCode::NoRoot: return kExitNoRoot;
    default: return kExitCheckFailed;
  }
}

int cmd_verify(const SpecOptions& o, std::ostream& out, std::ostream& err) {
  const ShrinkerSpec spec = resolve_spec(o);
  const BuiltShrinker built = build(spec, spec.resolution);
  const auto checks = verify_checks(built, o.tolerances, o.seed);
  json list = json::array();
  bool ok = true;
  for (const auto& c : checks) {
    json entry{{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"passed", c.passed()}};
    if (c.observed_order != 0.0) entry["observed_order"] = c.observed_order;
    list.push_back(entry);
    if (!c.passed()) {
      ok = false;
      err << "check failed: " << c.name << " (" << c.value << " > " << c.tolerance << ")\n";
    }
  }
  json doc{{"schema_version", kSchemaVersion}, {"shrinker_spec", spec},   {"checks", list},
           {"passed", ok},                     {"tolerances", o.tolerances}, {"grid_meta", grid_meta(built.grid)}};
  emit(o, doc, out);
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_certify(const SpecOptions& o, const std::string& mode_name, int degree, std::ostream& out, std::ostream& err) {
  const ShrinkerSpec spec = resolve_spec(o);
  const CertificateMode mode = certificate_mode(mode_name);
  if (spec.kind == ShrinkerKind::anciaux && mode == CertificateMode::lagrangian) {
    // The covered range depends only on (n, E): decide it before assembling the grid.
    const ProfileCurve curve = anciaux_profile(spec, 8);
    require_covered_case(spec.n, curve.energy, mode);
  }
  const BuiltShrinker built = build(spec, spec.resolution);
  StabilityReport report;
  if (spec.kind == ShrinkerKind::product) {
    report = certify_product_instability(built.factors.at(0), built.factors.at(1), o.tolerances);
  } else if (spec.kind == ShrinkerKind::anciaux) {
    report = certify_anciaux_instability(*built.lagrangian, mode, o.tolerances);
  } else {
    double scale = 0.0;
    for (int node = 0; node < built.grid.size(); ++node) scale = std::max(scale, built.grid.geometry(node).x.norm());
    report = stability_verdict_on_trial_space(built.grid, polynomial_trial_basis(built.grid, degree, std::max(scale, 1.0)),
                                              o.tolerances);
  }
  emit(o, stability_document(spec, built.grid, report, o.tolerances), out);
  if (report.verdict != Verdict::unstable_certificate) {
    err << "no instability certificate: verdict " << to_string(report.verdict) << "\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

int cmd_f_eval(const SpecOptions& o, const std::vector<double>& center, double t, std::ostream& out) {
  const ShrinkerSpec spec = resolve_spec(o);
  const BuiltShrinker built = build(spec, spec.resolution);
  Vec x = Vec::Zero(built.grid.ambient());
  if (!center.empty()) {
    if (static_cast<int>(center.size()) != built.grid.ambient()) {
      throw Error(ErrorCode::InvalidSpec, "--x needs " + std::to_string(built.grid.ambient()) + " components");
    }
    x = Eigen::Map<const Vec>(center.data(), static_cast<Eigen::Index>(center.size()));
  }
  const FEvaluation eval = evaluate_F(built.grid, x, t);
  json doc{{"schema_version", kSchemaVersion}, {"shrinker_spec", spec}, {"F", eval}, {"grid_meta", grid_meta(built.grid)}};
  emit(o, doc, out);
  return kExitOk;
}

int cmd_variation(const SpecOptions& o, int order, std::ostream& out) {
  const ShrinkerSpec spec = resolve_spec(o);
  const BuiltShrinker built = build(spec, spec.resolution);
  const Grid& grid = built.grid;
  std::mt19937_64 rng(o.seed);
  VariationData var = VariationData::normal(random_normal_field(grid, rng));
  var.y = random_vector(rng, grid.ambient());
  var.tau = random_vector(rng, 1)(0);
  const Vec x0 = Vec::Zero(grid.ambient());
  json doc{{"schema_version", kSchemaVersion}, {"shrinker_spec", spec}, {"order", order}, {"seed", o.seed},
           {"y", std::vector<double>(var.y.data(), var.y.data() + var.y.size())}, {"tau", var.tau}};
  if (order == 1) {
    doc["first_variation"] = first_variation(grid, var, x0, 1.0);
  } else {
    doc["second_variation_general"] = second_variation_general(grid, var, x0, 1.0);
    try {
      doc["second_variation_at_critical"] = second_variation_at_critical(grid, var, o.tolerances.residual_numeric);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotCritical) throw;
      doc["second_variation_at_critical"] = nullptr;
      doc["note"] = e.what();
    }
  }
  doc["grid_meta"] = grid_meta(grid);
  emit(o, doc, out);
  return kExitOk;
}

int cmd_anciaux_solve(int n, int pieces, int index, const std::vector<double>& bracket, bool circle, int spp,
                      const std::string& csv_path, const std::string& summary_path, std::ostream& out) {
  ProfileCurve curve;
  if (circle) {
    curve = circle_profile(n, pieces, spp);
  } else {
    ShootOptions options;
    if (!bracket.empty()) {
      if (bracket.size() != 2 || !(bracket[0] > 0.0 && bracket[0] < bracket[1] && bracket[1] < 1.0)) {
        throw Error(ErrorCode::InvalidSpec, "bracket must satisfy 0 < lo < hi < 1");
      }
      options.lo_ratio = bracket[0];
      options.hi_ratio = bracket[1];
    }
    options.samples_per_piece = spp;
    curve = shoot_closed(n, index, pieces, options);
  }
  const json summary = profile_summary(curve);
  if (!csv_path.empty()) write_atomic(csv_path, profile_csv(curve));
  if (summary_path.empty()) {
    out << dump(summary);
  } else {
    write_atomic(summary_path, dump(summary));
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Self-shrinker construction, F-functional evaluation and stability certificates"};
  app.name("shrinker");
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value configuration file");

  auto* catalog = app.add_subcommand("catalog", "list or show built-in shrinker specs");
  catalog->require_subcommand(1);
  auto* list = catalog->add_subcommand("list", "list catalog entries");
  auto* show = catalog->add_subcommand("show", "print the JSON spec of an entry");
  std::string show_name;
  int show_n = 0;
  show->add_option("name", show_name, "catalog name")->required();
  show->add_option("--n", show_n, "shrinker dimension")->check(CLI::PositiveNumber);

  SpecOptions verify_opts, certify_opts, feval_opts, variation_opts;
  auto* verify = app.add_subcommand("verify", "run residual, identity and eigen-identity checks");
  add_spec_options(*verify, verify_opts);

  auto* certify = app.add_subcommand("certify", "produce an instability certificate or trial-space verdict");
  add_spec_options(*certify, certify_opts);
  std::string mode = "general";
  int degree = 3;
  certify->add_option("--mode", mode, "general or lagrangian")->check(CLI::IsMember({"general", "lagrangian"}));
  certify->add_option("--degree", degree, "trial-basis polynomial degree")->check(CLI::NonNegativeNumber);

  auto* feval = app.add_subcommand("f-eval", "evaluate the F-functional");
  add_spec_options(*feval, feval_opts);
  std::vector<double> center;
  double scale = 1.0;
  feval->add_option("--x", center, "center x")->delimiter(',');
  feval->add_option("--t", scale, "scale t");

  auto* variation = app.add_subcommand("variation", "first or second variation along a random variation");
  add_spec_options(*variation, variation_opts);
  int order = 1;
  variation->add_option("--order", order, "1 or 2")->check(CLI::IsMember({1, 2}));

  auto* anciaux = app.add_subcommand("anciaux", "profile-curve tools");
  anciaux->require_subcommand(1);
  auto* solve = anciaux->add_subcommand("solve", "shoot a closed profile curve");
  int an = 2, pieces = 2, index = 1, spp = 96;
  std::vector<double> bracket;
  bool circle = false;
  std::string csv_path, summary_path;
  solve->add_option("--n", an, "shrinker dimension")->check(CLI::Range(2, 64));
  solve->add_option("--pieces", pieces, "piece count m")->check(CLI::PositiveNumber);
  solve->add_option("--index", index, "rotation index l")->check(CLI::PositiveNumber);
  solve->add_option("--bracket", bracket, "lo,hi as fractions of E_max")->delimiter(',')->expected(2);
  solve->add_flag("--circle", circle, "use the fixed-point circle profile");
  solve->add_option("--samples-per-piece", spp, "output samples per piece")->check(CLI::Range(4, 100000));
  solve->add_option("--csv", csv_path, "profile CSV output path");
  solve->add_option("--summary", summary_path, "JSON summary output path (stdout otherwise)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*list) {
      for (const auto& entry : catalog_entries()) out << entry.name << "\t" << entry.description << "\n";
      return kExitOk;
    }
    if (*show) {
      out << dump(json(named_spec(show_name, show_n)));
      return kExitOk;
    }
    if (*verify) return cmd_verify(verify_opts, out, err);
    if (*certify) return cmd_certify(certify_opts, mode, degree, out, err);
    if (*feval) return cmd_f_eval(feval_opts, center, scale, out);
    if (*variation) return cmd_variation(variation_opts, order, out);
    if (*solve) return cmd_anciaux_solve(an, pieces, index, bracket, circle, spp, csv_path, summary_path, out);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace shrinker
