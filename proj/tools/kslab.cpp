// Command-line front end for the kslab scenario harness. Talks to the core
// exclusively through the C API in kslab/capi.h.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kslab/capi.h"

namespace {

int exit_code_for(kslab_status status) {
  switch (status) {
    case KSLAB_OK:
      return 0;
    case KSLAB_ERR_CONFIG:
      return 2;
    default:
      return 1;
  }
}

void print_error(const char* prefix) {
  std::fprintf(stderr, "%s: %s\n", prefix, kslab_last_error());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kslab: scenario runner for the chemotaxis numerics laboratory"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run a config file or a named preset");
  std::string config_path, preset_name, out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  run->add_option("--config", config_path, "scenario config file");
  run->add_option("--preset", preset_name, "named preset (see list-presets)");
  run->add_option("--out", out_dir, "output directory")->capture_default_str();
  run->add_option("--seed", seed, "override every scenario seed")
      ->each([&](const std::string&) { seed_set = true; });

  // list-presets
  auto* list = app.add_subcommand("list-presets", "print the preset catalog");

  // compare
  auto* compare =
      app.add_subcommand("compare", "compare an artifact tree against goldens");
  std::string artifact_dir, golden_dir;
  double rel_tol = 0.0, abs_tol = 0.0;
  compare->add_option("artifacts", artifact_dir, "artifact directory")->required();
  compare->add_option("golden", golden_dir, "golden directory")->required();
  compare->add_option("--rel-tol", rel_tol, "relative tolerance")
      ->capture_default_str();
  compare->add_option("--abs-tol", abs_tol, "absolute tolerance")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) {
    int n = kslab_preset_count();
    for (int i = 0; i < n; ++i)
      std::printf("%-24s %s\n", kslab_preset_name(i), kslab_preset_summary(i));
    return 0;
  }

  if (run->parsed()) {
    if (config_path.empty() == preset_name.empty()) {
      std::fprintf(stderr, "run: give exactly one of --config or --preset\n");
      return 2;
    }
    kslab_batch* batch = nullptr;
    kslab_status status =
        config_path.empty() ? kslab_batch_from_preset(preset_name.c_str(), &batch)
                            : kslab_batch_from_file(config_path.c_str(), &batch);
    if (status != KSLAB_OK) {
      print_error("run");
      return exit_code_for(status);
    }
    if (seed_set) kslab_batch_set_seed(batch, seed);
    int count = kslab_batch_count(batch);
    for (int i = 0; i < count; ++i)
      std::printf("scenario %s\n", kslab_batch_name(batch, i));
    status = kslab_batch_run(batch, out_dir.c_str());
    if (status != KSLAB_OK)
      print_error("run");
    else
      std::printf("wrote %d scenario(s) under %s\n", count, out_dir.c_str());
    kslab_batch_free(batch);
    return exit_code_for(status);
  }

  if (compare->parsed()) {
    std::vector<char> report(1 << 16);
    kslab_status status =
        kslab_compare_dirs(artifact_dir.c_str(), golden_dir.c_str(), rel_tol,
                           abs_tol, report.data(), report.size());
    std::fputs(report.data(), stdout);
    if (status != KSLAB_OK && status != KSLAB_ERR_SCENARIO) print_error("compare");
    return exit_code_for(status);
  }

  return 2;
}
