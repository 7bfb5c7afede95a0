#pragma once

#include <filesystem>
#include <optional>

#include "cyma/config.hpp"

namespace cyma {

struct RunRequest {
  std::filesystem::path config_path;
  std::optional<std::filesystem::path> output_override;
  bool no_timestamp = false;
};

/// Exit codes of the run driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSolverFailure = 2;
inline constexpr int kExitConfigError = 3;

/// Loads, validates, runs, and writes artifacts (solution.cyf,
/// solution.meta.json, report.json, monitors.csv). Nothing is written when
/// validation fails. Returns an exit code; human-readable messages go to the
/// provided stream via `message`.
int run(const RunRequest& request, std::string& message);

}  // namespace cyma
