#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "shrinker/cli.hpp"
#include "shrinker/report.hpp"
#include "shrinker/stability.hpp"

using namespace shrinker;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "shrinker_cli_tests";
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const json* find_check(const json& doc, const std::string& name) {
  for (const auto& c : doc.at("checks"))
    if (c.at("name") == name) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("catalog list and show") {
  const Run list = run({"catalog", "list"});
  CHECK(list.code == kExitOk);
  for (const char* name : {"sphere", "cylinder", "plane", "product", "anciaux"}) CHECK(list.out.find(name) != std::string::npos);

  const Run show = run({"catalog", "show", "sphere", "--n", "2"});
  REQUIRE(show.code == kExitOk);
  const json spec = show.doc();
  CHECK(spec.at("m") == 3);
  CHECK(spec.at("radius").get<double>() == doctest::Approx(2.0));

  const Run unknown = run({"catalog", "show", "nosuch"});
  CHECK(unknown.code == kExitUsage);
  CHECK(unknown.err.find("UnknownName") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"verify", "sphere", "--n", "-1"}).code == kExitUsage);
  const Run bad = run({"frobnicate"});
  CHECK(bad.code == kExitUsage);
  CHECK(bad.err.find("usage error") != std::string::npos);
}

TEST_CASE("verify a sphere") {
  const Run r = run({"verify", "sphere", "--n", "2"});
  REQUIRE(r.code == kExitOk);
  const json doc = r.doc();
  CHECK(doc.at("passed") == true);
  CHECK(doc.at("schema_version") == 1);
  CHECK(doc.at("shrinker_spec").at("kind") == "sphere");
  for (const auto& c : doc.at("checks")) {
    CAPTURE(c.at("name").get<std::string>());
    CHECK(c.at("passed") == true);
    CHECK(c.at("value").get<double>() <= c.at("tolerance").get<double>());
  }
  CHECK(doc.at("grid_meta").at("dim") == 2);
}

TEST_CASE("verify the unit circle from a spec file fails the residual check") {
  const fs::path path = scratch_dir() / "unit_circle.json";
  write_file(path, json{{"kind", "circle"}, {"n", 1}, {"m", 2}, {"radius", 1.0}}.dump());
  const Run r = run({"verify", "--spec-file", path.string()});
  CHECK(r.code == kExitCheckFailed);
  CHECK(r.err.find("check failed: self-shrinker residual") != std::string::npos);
  const json doc = r.doc();
  CHECK(doc.at("passed") == false);
  const json* residual = find_check(doc, "self-shrinker residual");
  REQUIRE(residual);
  CHECK(residual->at("value").get<double>() == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("verify anciaux n = 2 includes the Lagrangian and metric-block checks") {
  const Run r = run({"verify", "anciaux", "--n", "2"});
  REQUIRE(r.code == kExitOk);
  const json doc = r.doc();
  for (const char* name : {"Lagrangian |omega(u_a, u_b)|", "metric blocks g_ss = 1, g_sj = 0, g_jk = r^2 h_jk", "H parallel to J u_s"}) {
    CAPTURE(name);
    const json* c = find_check(doc, name);
    REQUIRE(c);
    CHECK(c->at("passed") == true);
  }
}

TEST_CASE("certify the product of circles") {
  const Run r = run({"certify", "product"});
  REQUIRE(r.code == kExitOk);
  const json doc = r.doc();
  CHECK(doc.at("verdict") == "unstable_certificate");
  CHECK(doc.at("Q").get<double>() == doctest::Approx(oracle::product_certificate_Q()).epsilon(1e-8));
  CHECK(doc.at("shrinker_spec").at("kind") == "product");
}

TEST_CASE("certify anciaux: covered and uncovered Lagrangian cases") {
  const Run covered = run({"certify", "anciaux", "--n", "2", "--mode", "lagrangian"});
  CHECK(covered.code == kExitOk);
  CHECK(covered.doc().at("Q").get<double>() < 0.0);

  const Run uncovered = run({"certify", "anciaux", "--n", "4", "--profile", "shoot", "--index", "2", "--pieces", "7", "--mode", "lagrangian"});
  CHECK(uncovered.code == kExitCaseNotCovered);
  CHECK(uncovered.err.find("CaseNotCovered") != std::string::npos);
}

TEST_CASE("anciaux solve: circle summary and CSV") {
  const fs::path csv = scratch_dir() / "circle.csv";
  const Run r = run({"anciaux", "solve", "--n", "2", "--circle", "--pieces", "2", "--csv", csv.string()});
  REQUIRE(r.code == kExitOk);
  const json summary = r.doc();
  CHECK(summary.at("E").get<double>() == doctest::Approx(4.0 / oracle::kE).epsilon(1e-14));
  CHECK(summary.at("E_ratio").get<double>() == doctest::Approx(1.0));
  CHECK(summary.at("closed") == true);

  std::istringstream lines(read_file(csv));
  std::string line;
  std::getline(lines, line);
  CHECK(line == "s,r,theta,phi,E_check");
  int rows = 0;
  double worst = 0.0;
  while (std::getline(lines, line)) {
    worst = std::max(worst, std::abs(std::stod(line.substr(line.rfind(',') + 1))));
    ++rows;
  }
  CHECK(rows == summary.at("samples").get<int>());
  CHECK(worst <= 1e-10);
}

TEST_CASE("anciaux solve: bracket errors") {
  const Run malformed = run({"anciaux", "solve", "--n", "2", "--bracket", "0.7,0.3"});
  CHECK(malformed.code == kExitUsage);
  CHECK(malformed.err.find("InvalidSpec") != std::string::npos);
  const Run no_root = run({"anciaux", "solve", "--n", "2", "--index", "1", "--pieces", "2", "--bracket", "0.5,0.6"});
  CHECK(no_root.code == kExitNoRoot);
  CHECK(no_root.err.find("NoRoot") != std::string::npos);
}

TEST_CASE("stability report JSON round-trip") {
  const Run r = run({"certify", "product"});
  REQUIRE(r.code == kExitOk);
  const StabilityReport report = r.doc().get<StabilityReport>();
  CHECK(report.verdict == Verdict::unstable_certificate);
  const json again = report;
  CHECK(again.get<StabilityReport>() == report);
}

TEST_CASE("output is deterministic for a fixed seed") {
  const std::vector<std::string> args{"variation", "sphere", "--n", "1", "--order", "2", "--seed", "7"};
  const Run a = run(args);
  const Run b = run(args);
  REQUIRE(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(run({"verify", "sphere", "--n", "1"}).out == run({"verify", "sphere", "--n", "1"}).out);
}

TEST_CASE("--out writes the report file and leaves no temporaries") {
  const fs::path dir = scratch_dir() / "out";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path path = dir / "report.json";
  const Run r = run({"f-eval", "sphere", "--n", "1", "--out", path.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.empty());
  const json doc = json::parse(read_file(path));
  CHECK(doc.at("F").at("value").get<double>() == doctest::Approx(oracle::circle_F()).epsilon(1e-12));
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
}

TEST_CASE("--config supplies options") {
  const fs::path path = scratch_dir() / "verify.ini";
  write_file(path, "[verify]\nspec = sphere\nn = 2\ntol-identity = 1e-5\n");
  const Run r = run({"--config", path.string(), "verify"});
  REQUIRE(r.code == kExitOk);
  const json doc = r.doc();
  CHECK(doc.at("shrinker_spec").at("n") == 2);
  CHECK(doc.at("tolerances").at("identity").get<double>() == doctest::Approx(1e-5));
}
