#include "kslab/capi.h"

#include <cstring>
#include <string>

#include "kslab/harness.hpp"

using kslab::harness::Batch;

struct kslab_batch {
  Batch batch;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

template <typename Fn>
kslab_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const kslab::harness::ConfigError& e) {
    set_error(e.what());
    return KSLAB_ERR_CONFIG;
  } catch (const std::exception& e) {
    set_error(e.what());
    return KSLAB_ERR_SCENARIO;
  } catch (...) {
    set_error("unknown error");
    return KSLAB_ERR_SCENARIO;
  }
}

}  // namespace

extern "C" {

const char* kslab_version(void) { return "1.0.0"; }

const char* kslab_last_error(void) { return g_last_error.c_str(); }

int kslab_preset_count(void) {
  return static_cast<int>(kslab::harness::preset_catalog().size());
}

const char* kslab_preset_name(int index) {
  static thread_local std::string storage;
  auto catalog = kslab::harness::preset_catalog();
  if (index < 0 || index >= static_cast<int>(catalog.size())) return nullptr;
  storage = catalog[static_cast<std::size_t>(index)].first;
  return storage.c_str();
}

const char* kslab_preset_summary(int index) {
  static thread_local std::string storage;
  auto catalog = kslab::harness::preset_catalog();
  if (index < 0 || index >= static_cast<int>(catalog.size())) return nullptr;
  storage = catalog[static_cast<std::size_t>(index)].second;
  return storage.c_str();
}

kslab_status kslab_batch_from_file(const char* path, kslab_batch** out) {
  if (!path || !out) {
    set_error("null argument");
    return KSLAB_ERR_INVALID;
  }
  *out = nullptr;
  return guarded([&] {
    auto handle = new kslab_batch{kslab::harness::parse_config_file(path)};
    *out = handle;
    return KSLAB_OK;
  });
}

kslab_status kslab_batch_from_preset(const char* name, kslab_batch** out) {
  if (!name || !out) {
    set_error("null argument");
    return KSLAB_ERR_INVALID;
  }
  *out = nullptr;
  return guarded([&] {
    auto handle = new kslab_batch{kslab::harness::preset(name)};
    *out = handle;
    return KSLAB_OK;
  });
}

void kslab_batch_free(kslab_batch* batch) { delete batch; }

int kslab_batch_count(const kslab_batch* batch) {
  return batch ? static_cast<int>(batch->batch.scenarios.size()) : -1;
}

const char* kslab_batch_name(const kslab_batch* batch, int index) {
  if (!batch || index < 0 ||
      index >= static_cast<int>(batch->batch.scenarios.size()))
    return nullptr;
  return batch->batch.scenarios[static_cast<std::size_t>(index)].name.c_str();
}

kslab_status kslab_batch_set_seed(kslab_batch* batch, uint64_t seed) {
  if (!batch) {
    set_error("null batch");
    return KSLAB_ERR_INVALID;
  }
  for (auto& scenario : batch->batch.scenarios) scenario.seed = seed;
  return KSLAB_OK;
}

kslab_status kslab_batch_run(const kslab_batch* batch, const char* out_dir) {
  if (!batch || !out_dir) {
    set_error("null argument");
    return KSLAB_ERR_INVALID;
  }
  return guarded([&]() -> kslab_status {
    auto errors = kslab::harness::run_batch(batch->batch, out_dir);
    if (errors.empty()) return KSLAB_OK;
    std::string joined;
    for (const auto& e : errors) {
      if (!joined.empty()) joined += "; ";
      joined += e;
    }
    set_error(joined);
    return KSLAB_ERR_SCENARIO;
  });
}

kslab_status kslab_compare_dirs(const char* artifact_dir, const char* golden_dir,
                                double rel_tol, double abs_tol, char* report,
                                size_t report_capacity) {
  if (!artifact_dir || !golden_dir) {
    set_error("null argument");
    return KSLAB_ERR_INVALID;
  }
  return guarded([&]() -> kslab_status {
    auto result = kslab::harness::compare_dirs(artifact_dir, golden_dir, rel_tol,
                                               abs_tol);
    std::string text = result.pass ? "match\n" : "";
    for (const auto& m : result.mismatches) text += m + "\n";
    if (report && report_capacity > 0) {
      std::size_t n = text.size() < report_capacity - 1 ? text.size()
                                                        : report_capacity - 1;
      std::memcpy(report, text.data(), n);
      report[n] = '\0';
    }
    if (result.pass) return KSLAB_OK;
    set_error("comparison found mismatches");
    return KSLAB_ERR_SCENARIO;
  });
}

}  // extern "C"
