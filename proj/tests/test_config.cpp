#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "rfbm/config.hpp"
#include "rfbm/experiment.hpp"

using namespace rfbm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kSphere =
    "scenario = sphere\n"
    "analyses = supermartingale, local-time, explosion, drift-check\n"
    "model {\n"
    "  kind = sphere\n"
    "  dim = 2\n"
    "  r0 = 1.0   # radius at t = 0\n"
    "}\n"
    "run {\n"
    "  T = 0.5\n"
    "  h = 2e-3\n"
    "  paths = 400\n"
    "  radii = 5.0, 10.0  # beyond the diameter\n"
    "}\n";

}  // namespace

TEST_CASE("parsing fills every block") {
  const ExperimentConfig c = parse_config(kSphere);
  CHECK(c.scenario == "sphere");
  CHECK(c.model.kind == "sphere");
  CHECK(c.run.horizon == 0.5);
  CHECK(c.run.paths == 400);
  CHECK(c.run.radii == std::vector<double>{5.0, 10.0});
  REQUIRE(c.analyses.size() == 4);
  CHECK(c.wants(Analysis::LocalTime));
  CHECK_FALSE(c.wants(Analysis::Qv));
  CHECK(parse_analysis("assumption-check") == Analysis::AssumptionCheck);
  for (Analysis a : {Analysis::Qv, Analysis::Feller, Analysis::Constants})
    CHECK(parse_analysis(to_string(a)) == a);
}

TEST_CASE("malformed configs are rejected with a line number") {
  CHECK(error_of("analyses = qv\nmodel {\n  colour = red\n}\n").find("line 3") !=
        std::string::npos);
  CHECK(error_of("analyses = qv\nmodel {\n  colour = red\n}\n").find("unknown key 'colour'") !=
        std::string::npos);
  CHECK(error_of("analyses = qv\nrun {\n  T = 1\n  T = 2\n}\n").find("duplicate key 'T'") !=
        std::string::npos);
  CHECK(error_of("analyses = qv\nrun {\n  h = 1e-3x\n}\n").find("trailing") != std::string::npos);
  CHECK(error_of("analyses = qv\nrun {\n  h = 1e-3\n").find("not closed") != std::string::npos);
  CHECK(error_of("analyses = warp-speed\n").find("warp-speed") != std::string::npos);
  CHECK(error_of("scenario = x\n").find("no analyses") != std::string::npos);
}

TEST_CASE("incompatible analyses name the model") {
  const std::string msg = error_of("analyses = local-time\nmodel {\n  kind = euclidean\n}\n");
  CHECK(msg.find("local-time") != std::string::npos);
  CHECK(msg.find("euclidean") != std::string::npos);
  CHECK(error_of("analyses = explosion\nmodel {\n  kind = hyperbolic\n}\n").find("radii") !=
        std::string::npos);
  CHECK(error_of("analyses = qv\nmodel {\n  kind = sphere\n}\n"
                 "drift {\n  kind = linear\n  matrix = 1, 0, 0, 1\n}\n")
            .find("linear") != std::string::npos);
}

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("minimal euclidean run writes its artifacts") {
  const fs::path dir = fs::temp_directory_path() / "rfbm_test_config_qv";
  fs::remove_all(dir);
  ExperimentConfig c = parse_config(
      "analyses = qv\nmodel {\n  kind = euclidean\n  dim = 3\n}\n"
      "run {\n  T = 0.2\n  h = 1e-2\n  paths = 50\n}\n");
  c.output = dir.string();
  const RunOutcome out = run_experiment(c);
  CHECK(out.exit_code == kExitOk);
  CHECK(out.run_hash.size() == 16);
  CHECK(fs::exists(dir / "report.txt"));
  CHECK(fs::exists(dir / "qv.csv"));
  CHECK(fs::exists(dir / "plotdata" / "qv_curve.csv"));
  CHECK(slurp(dir / "report.txt").find("exit_code = 0") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("sphere backwards flow run: non-explosion and reported conventions") {
  const fs::path dir = fs::temp_directory_path() / "rfbm_test_config_sphere";
  fs::remove_all(dir);
  ExperimentConfig c = parse_config(kSphere);
  c.output = dir.string();
  const RunOutcome out = run_experiment(c);
  CHECK(out.exit_code == kExitOk);
  CHECK(out.violations.empty());
  const std::string report = slurp(dir / "report.txt");
  CHECK(report.find("explosion.verdict = non-explosion") != std::string::npos);
  CHECK(report.find("profile.k1 = ") != std::string::npos);
  CHECK(report.find("convention.generator") != std::string::npos);
  CHECK(report.find("run_hash = " + out.run_hash) != std::string::npos);
  for (const char* f : {"supermartingale.csv", "local_time.csv", "explosion.csv",
                        "drift_check.csv", "plotdata/cutlocus_occupation.csv"})
    CHECK_MESSAGE(fs::exists(dir / f), f);
  fs::remove_all(dir);
}

TEST_CASE("run_config_file maps validation errors to exit code 2") {
  const fs::path p = fs::temp_directory_path() / "rfbm_bad.cfg";
  std::ofstream(p) << "analyses = local-time\nmodel {\n  kind = euclidean\n}\n";
  std::ostringstream log;
  CHECK(run_config_file(p.string(), log) == kExitValidation);
  CHECK(log.str().find("local-time") != std::string::npos);
  CHECK(run_config_file((fs::temp_directory_path() / "rfbm_missing.cfg").string(), log) ==
        kExitValidation);
  fs::remove(p);
}
