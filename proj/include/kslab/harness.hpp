#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace kslab::harness {

// Configuration problems carry the offending line (0 when not line-bound).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line_number = 0)
      : std::runtime_error(line_number > 0
                               ? message + " (line " + std::to_string(line_number) + ")"
                               : message),
        line(line_number) {}
  int line;
};

struct Scenario {
  std::string name;
  std::string module;  // ks_radial | jko | fp | particles | burgers | stationary
  std::uint64_t seed = 1;
  std::map<std::string, std::string> params;  // validated against the module schema
};

struct Batch {
  std::vector<Scenario> scenarios;
};

// One assignment per line, scenarios introduced by "[scenario NAME]",
// '#' comments. Keys are validated against the target module's schema;
// unknown keys are rejected by name with their line number.
Batch parse_config_text(const std::string& text);
Batch parse_config_file(const std::string& path);

std::vector<std::pair<std::string, std::string>> preset_catalog();
Batch preset(const std::string& name);

// Writes trajectory.csv, diagnostics.csv (module-dependent), final_state.csv
// and summary.json under out_dir/<scenario name>/. Deterministic per seed.
void run_scenario(const Scenario& scenario, const std::string& out_dir);

// Runs every scenario of the batch; returns per-scenario error messages
// (empty when everything passed).
std::vector<std::string> run_batch(const Batch& batch, const std::string& out_dir);

struct CompareReport {
  bool pass = false;
  std::vector<std::string> mismatches;
};

// Per-file numeric comparison of every CSV/JSON in golden_dir against
// artifact_dir, within |a - b| <= abs_tol + rel_tol |b|.
CompareReport compare_dirs(const std::string& artifact_dir,
                           const std::string& golden_dir, double rel_tol = 0.0,
                           double abs_tol = 0.0);

// Fixed float formatting used across all artifacts: shortest 17-significant-
// digit form, LF line endings.
std::string format_double(double value);

}  // namespace kslab::harness
