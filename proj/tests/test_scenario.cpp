#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "simopo/errors.hpp"
#include "simopo/scenario.hpp"

using namespace simopo;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("simopo_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ScenarioConfig parse(const std::string& text, const fs::path& out) {
  std::istringstream in(text + "output.path = " + out.string() + "\n");
  return parse_config(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("coherence report writes its table and a summary") {
    const fs::path dir = fresh_dir("coherence");
    const ScenarioResult res = run_scenario(parse("scenario = coherence-report\ngrid.points = 256\n", dir));
    CHECK(res.summary == dir / "summary.json");
    CHECK(fs::exists(dir / "coherence_report.csv"));
    CHECK(slurp(dir / "summary.json").find("\"kappa\"") != std::string::npos);
    for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".partial");
  }

  TEST_CASE("near-field position scan table") {
    const fs::path dir = fresh_dir("scan");
    const ScenarioConfig cfg = parse(
        "scenario = nearfield-scan(position)\nkernel.thin_crystal = true\ngrid.points = 256\n"
        "pump.amplitudes = 0.9\nscan.start = 0 wp\nscan.stop = 3 wp\nscan.steps = 7\n",
        dir);
    const ScanTable t = compute_scan(cfg);
    REQUIRE(t.rows.size() == 7);
    CHECK(t.rows.front().v_minus < 0.1);
    CHECK(t.rows.back().v_minus > 0.9);
    for (const ScanRow& r : t.rows) {
      CHECK_FALSE(r.s12.has_value());
      CHECK(r.v_minus * r.v_plus >= 1.0 - 1e-9);
    }
  }

  TEST_CASE("failures leave no staged files behind") {
    const fs::path dir = fresh_dir("fail");
    const ScenarioConfig cfg = parse("scenario = modes-report\ngrid.points = 256\npump.ratios = 0.5, 1.2\n", dir);
    CHECK_THROWS_AS(run_scenario(cfg), AboveThresholdError);
    CHECK(fs::is_empty(dir));
  }

  TEST_CASE("exit codes by error family") {
    CHECK(exit_code_for(ConfigError(3, "x")) == 2);
    CHECK(exit_code_for(AboveThresholdError("x")) == 3);
    CHECK(exit_code_for(ResolutionError("x", 2.0)) == 3);
    CHECK(exit_code_for(DataError("x")) == 4);
  }
}
