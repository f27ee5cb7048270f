#include "shrinker/report.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "shrinker/errors.hpp"

namespace shrinker {

namespace {

using nlohmann::json;

json vec_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

Vec json_vec(const json& j) {
  Vec out(static_cast<Eigen::Index>(j.size()));
  for (size_t k = 0; k < j.size(); ++k) out(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  return out;
}

const char* axis_kind(AxisKind kind) {
  switch (kind) {
    case AxisKind::periodic: return "periodic";
    case AxisKind::polar: return "polar";
    case AxisKind::bounded: return "bounded";
  }
  return "unknown";
}

}  // namespace

void to_json(json& j, const Tolerances& t) {
  j = json{{"rank", t.rank},
           {"residual_analytic", t.residual_analytic},
           {"residual_numeric", t.residual_numeric},
           {"eps_Q", t.eps_Q},
           {"eps_c", t.eps_c},
           {"gram_cutoff", t.gram_cutoff},
           {"gram_condition", t.gram_condition},
           {"basis_cutoff", t.basis_cutoff},
           {"constraint_cutoff", t.constraint_cutoff},
           {"closure", t.closure},
           {"lagrangian", t.lagrangian},
           {"oracle_rel", t.oracle_rel},
           {"identity", t.identity},
           {"differential", t.differential}};
}

void from_json(const json& j, Tolerances& t) {
  const Tolerances defaults;
  t.rank = j.value("rank", defaults.rank);
  t.residual_analytic = j.value("residual_analytic", defaults.residual_analytic);
  t.residual_numeric = j.value("residual_numeric", defaults.residual_numeric);
  t.eps_Q = j.value("eps_Q", defaults.eps_Q);
  t.eps_c = j.value("eps_c", defaults.eps_c);
  t.gram_cutoff = j.value("gram_cutoff", defaults.gram_cutoff);
  t.gram_condition = j.value("gram_condition", defaults.gram_condition);
  t.basis_cutoff = j.value("basis_cutoff", defaults.basis_cutoff);
  t.constraint_cutoff = j.value("constraint_cutoff", defaults.constraint_cutoff);
  t.closure = j.value("closure", defaults.closure);
  t.lagrangian = j.value("lagrangian", defaults.lagrangian);
  t.oracle_rel = j.value("oracle_rel", defaults.oracle_rel);
  t.identity = j.value("identity", defaults.identity);
  t.differential = j.value("differential", defaults.differential);
}

void to_json(json& j, const ConstraintResiduals& r) {
  j = json{{"h_pairing", r.h_pairing},
           {"translation_pairing", vec_json(r.translation_pairing)},
           {"tolerance", r.tolerance},
           {"admissible", r.admissible()}};
}

void from_json(const json& j, ConstraintResiduals& r) {
  r.h_pairing = j.at("h_pairing").get<double>();
  r.translation_pairing = json_vec(j.at("translation_pairing"));
  r.tolerance = j.at("tolerance").get<double>();
}

void to_json(json& j, const StabilityReport& report) {
  j = json{{"mode", report.mode},
           {"Q", report.Q},
           {"residuals", report.residuals},
           {"verdict", to_string(report.verdict)},
           {"certificate_field", report.certificate_field},
           {"trial_space_dim", report.trial_space_dim},
           {"values", report.values},
           {"flags", report.flags}};
}

void from_json(const json& j, StabilityReport& report) {
  report.mode = j.at("mode").get<std::string>();
  report.Q = j.at("Q").get<double>();
  report.residuals = j.at("residuals").get<ConstraintResiduals>();
  report.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  report.certificate_field = j.at("certificate_field").get<std::string>();
  report.trial_space_dim = j.at("trial_space_dim").get<int>();
  report.values = j.at("values").get<std::map<std::string, double>>();
  report.flags = j.at("flags").get<std::vector<std::string>>();
}

void to_json(json& j, const FEvaluation& eval) {
  j = json{{"value", eval.value},
           {"quadrature_error", eval.quadrature_error},
           {"truncation_bound", eval.truncation_bound},
           {"center", vec_json(eval.center)},
           {"scale", eval.scale}};
}

json grid_meta(const Grid& grid) {
  json axes = json::array();
  for (size_t a = 0; a < grid.chart().axes().size(); ++a) {
    const Axis& axis = grid.chart().axes()[a];
    axes.push_back({{"kind", axis_kind(axis.kind)},
                    {"lo", axis.lo},
                    {"hi", axis.hi},
                    {"nodes", grid.shape()[a]},
                    {"truncated", axis.truncated}});
  }
  json meta{{"dim", grid.dim()},
            {"ambient", grid.ambient()},
            {"nodes", grid.size()},
            {"fd_order", grid.fd_order()},
            {"jets", grid.chart().analytic() ? "analytic" : "finite_difference"},
            {"axes", axes},
            {"area", grid.area()},
            {"weighted_area", grid.weighted_area()},
            {"max_residual", grid.max_residual()}};
  if (grid.truncated()) {
    meta["truncation_radius"] = grid.tail().radius;
    meta["tail_bound"] = grid.tail_bound(0);
    meta["growth_note"] = "polynomial growth checked on the truncated grid only";
  }
  return meta;
}

json stability_document(const ShrinkerSpec& spec, const Grid& grid, const StabilityReport& report, const Tolerances& tolerances) {
  json doc = report;
  doc["schema_version"] = kSchemaVersion;
  doc["shrinker_spec"] = spec;
  doc["tolerances"] = tolerances;
  doc["grid_meta"] = grid_meta(grid);
  return doc;
}

std::string profile_csv(const ProfileCurve& curve) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "s,r,theta,phi,E_check\n";
  for (const auto& s : curve.samples) {
    out << s.s << ',' << s.r << ',' << s.theta << ',' << s.phi << ','
        << conserved_quantity(s.r, s.delta(), curve.n) - curve.energy << '\n';
  }
  return out.str();
}

json profile_summary(const ProfileCurve& curve) {
  return json{{"schema_version", kSchemaVersion},
              {"n", curve.n},
              {"E", curve.energy},
              {"E_max", max_energy(curve.n)},
              {"E_ratio", curve.energy / max_energy(curve.n)},
              {"rotation_index", curve.rotation_index},
              {"pieces", curve.pieces},
              {"closed", curve.closed},
              {"closure_gap", curve.closure_gap},
              {"length", curve.length},
              {"samples", curve.samples.size()},
              {"conservation_drift", curve.conservation_drift}};
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidSpec, "cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out.flush()) throw Error(ErrorCode::InvalidSpec, "write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string dump(const json& document) { return document.dump(2) + "\n"; }

}  // namespace shrinker
