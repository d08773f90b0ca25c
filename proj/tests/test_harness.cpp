#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "kslab/harness.hpp"

using namespace kslab;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("kslab_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config parsing") {
  SUBCASE("minimal subcritical scenario expands defaults") {
    auto batch = harness::parse_config_text(
        "[scenario diffuse]\n"
        "module = ks_radial\n"
        "mass_factor = 0.5\n");
    REQUIRE(batch.scenarios.size() == 1);
    const auto& s = batch.scenarios[0];
    CHECK(s.name == "diffuse");
    CHECK(s.params.at("mass_factor") == "0.5");
    CHECK(s.params.count("cells") == 1);  // defaults filled
  }
  SUBCASE("unknown keys are rejected by name and line") {
    try {
      harness::parse_config_text(
          "[scenario bad]\n"
          "module = ks_radial\n"
          "masss = 1.0\n");
      FAIL("expected ConfigError");
    } catch (const harness::ConfigError& e) {
      CHECK(std::string(e.what()).find("masss") != std::string::npos);
      CHECK(e.line == 3);
    }
  }
  SUBCASE("three scenarios make three run plans") {
    auto batch = harness::parse_config_text(
        "[scenario a]\nmodule = burgers\n"
        "[scenario b]\nmodule = burgers\nprofile = neg-linear\n"
        "[scenario c]\nmodule = stationary\n");
    CHECK(batch.scenarios.size() == 3);
  }
  SUBCASE("duplicate names are rejected") {
    CHECK_THROWS_AS(harness::parse_config_text(
                        "[scenario x]\nmodule = burgers\n"
                        "[scenario x]\nmodule = burgers\n"),
                    harness::ConfigError);
  }
  SUBCASE("assignment outside a section is rejected") {
    CHECK_THROWS_AS(harness::parse_config_text("module = burgers\n"),
                    harness::ConfigError);
  }
  SUBCASE("preset expansion inside a scenario") {
    auto batch = harness::parse_config_text(
        "[scenario mine]\n"
        "preset = burgers-shock\n"
        "fit_points = 8\n");
    REQUIRE(batch.scenarios.size() == 1);
    CHECK(batch.scenarios[0].name == "mine");
    CHECK(batch.scenarios[0].module == "burgers");
    CHECK(batch.scenarios[0].params.at("fit_points") == "8");
  }
  SUBCASE("unknown modules and presets") {
    CHECK_THROWS_AS(harness::parse_config_text("[scenario z]\nmodule = nope\n"),
                    harness::ConfigError);
    CHECK_THROWS_AS(harness::preset("nope"), harness::ConfigError);
  }
  SUBCASE("malformed section headers") {
    CHECK_THROWS_AS(harness::parse_config_text("[scenarioX]\nmodule = burgers\n"),
                    harness::ConfigError);
    CHECK_THROWS_AS(harness::parse_config_text("[run x]\nmodule = burgers\n"),
                    harness::ConfigError);
  }
  SUBCASE("preset after other keys is rejected instead of dropping them") {
    CHECK_THROWS_AS(harness::parse_config_text("[scenario x]\n"
                                               "fit_points = 8\n"
                                               "preset = burgers-shock\n"),
                    harness::ConfigError);
  }
}

TEST_CASE("preset catalog is runnable") {
  for (const auto& [name, summary] : harness::preset_catalog()) {
    CAPTURE(name);
    CHECK_FALSE(summary.empty());
    auto batch = harness::preset(name);
    CHECK_FALSE(batch.scenarios.empty());
  }
}

TEST_CASE("burgers scenario writes deterministic artifacts") {
  auto batch = harness::preset("burgers-shock");
  auto dir_a = temp_dir("burgers_a");
  auto dir_b = temp_dir("burgers_b");
  CHECK(harness::run_batch(batch, dir_a.string()).empty());
  CHECK(harness::run_batch(batch, dir_b.string()).empty());

  auto traj = dir_a / "burgers-shock" / "trajectory.csv";
  REQUIRE(fs::exists(traj));
  // byte-identical reruns
  CHECK(slurp(traj) == slurp(dir_b / "burgers-shock" / "trajectory.csv"));
  CHECK(slurp(dir_a / "burgers-shock" / "summary.json") ==
        slurp(dir_b / "burgers-shock" / "summary.json"));
  // schema comment + header + LF endings
  std::string text = slurp(traj);
  CHECK(text.rfind("# kslab burgers", 0) == 0);
  CHECK(text.find("\r") == std::string::npos);

  auto summary = nlohmann::json::parse(slurp(dir_a / "burgers-shock" / "summary.json"));
  CHECK(summary.at("shock_time").get<double>() == doctest::Approx(1.0).epsilon(1e-8));
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("ks scenario artifacts carry the run summary") {
  auto batch = harness::parse_config_text(
      "[scenario mini]\nmodule = ks_radial\nmass_factor = 0.5\nradius = 12.0\n"
      "cells = 256\nt_end = 0.05\ndt_initial = 1e-3\nrecord_every = 10\n");
  auto dir = temp_dir("ks_mini");
  CHECK(harness::run_batch(batch, dir.string()).empty());
  auto summary = nlohmann::json::parse(slurp(dir / "mini" / "summary.json"));
  CHECK(summary.at("termination") == "reached_t_end");
  CHECK(summary.at("mass_relative_drift").get<double>() <= 1e-12);
  CHECK(fs::exists(dir / "mini" / "diagnostics.csv"));
  CHECK(fs::exists(dir / "mini" / "final_state.csv"));
  fs::remove_all(dir);
}

TEST_CASE("golden comparison") {
  auto golden = temp_dir("golden");
  auto arts = temp_dir("arts");
  {
    std::ofstream(golden / "a.csv") << "# c\nx,y\n1,2\n";
    std::ofstream(arts / "a.csv") << "# c\nx,y\n1,2\n";
    std::ofstream(golden / "s.json") << "{\"v\": 1.0}\n";
    std::ofstream(arts / "s.json") << "{\"v\": 1.0}\n";
  }
  SUBCASE("identical trees pass") {
    auto report = harness::compare_dirs(arts.string(), golden.string());
    CHECK(report.pass);
  }
  SUBCASE("a perturbed value beyond tolerance fails, naming the cell") {
    std::ofstream(arts / "a.csv") << "# c\nx,y\n1,2.5\n";
    auto report = harness::compare_dirs(arts.string(), golden.string(), 0.1, 0.0);
    REQUIRE_FALSE(report.pass);
    CHECK(report.mismatches[0].find("a.csv:3:2") != std::string::npos);
    auto loose = harness::compare_dirs(arts.string(), golden.string(), 0.3, 0.0);
    CHECK(loose.pass);
  }
  SUBCASE("missing files are reported") {
    fs::remove(arts / "s.json");
    auto report = harness::compare_dirs(arts.string(), golden.string());
    REQUIRE_FALSE(report.pass);
    bool found = false;
    for (const auto& m : report.mismatches)
      if (m.find("s.json") != std::string::npos) found = true;
    CHECK(found);
  }
  fs::remove_all(golden);
  fs::remove_all(arts);
}

TEST_CASE("17-digit float formatting round-trips") {
  for (double v : {1.0, -0.1, 3.141592653589793, 1e-300, 8.0 * 3.14159}) {
    double back = std::stod(harness::format_double(v));
    CHECK(back == v);
  }
  CHECK(harness::format_double(std::nan("")) == "nan");
}

}  // TEST_SUITE
