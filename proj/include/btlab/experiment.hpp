// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

// Declarative experiment runner shared by the C API and the command line.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "btlab/common.hpp"

namespace btlab {

struct RunOptions {
  /// Overrides config.output_dir; empty means no files are written unless the config names a directory.
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
};

struct RunResult {
  nlohmann::json report;
  bool passed = false;
};

/// Validates a config and fills defaults. Unknown keys and out-of-range values are config errors.
nlohmann::json normalize_config(const nlohmann::json& config);

/// Runs the configured experiment and writes report.json plus side files when an output directory is set.
RunResult run_experiment(const nlohmann::json& config, const RunOptions& options);

/// JSON schema of the config format.
const char* config_schema();

const char* library_version() noexcept;

}  // namespace btlab
