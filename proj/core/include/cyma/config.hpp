#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cyma/field.hpp"
#include "cyma/metric.hpp"
#include "cyma/solver.hpp"

namespace cyma {

/// Cosine mode of a configured function: amplitude * cos(2 pi k.x / L + phase).
struct FourierMode {
  std::vector<int> index;  // one integer per real axis
  double amplitude = 0.0;
  double phase = 0.0;
};

/// Finite Fourier description of a density/obstacle plus optional klt part.
struct FunctionSpec {
  double constant = 0.0;
  std::vector<FourierMode> modes;

  ScalarField realize(GridPtr grid) const;
  bool trivial() const { return modes.empty() && constant == 0.0; }
};

struct KltConfig {
  std::vector<std::vector<double>> points;
  std::vector<double> exponents;
  double mollification = 0.0;
};

enum class RunMode { solve, calabi, envelope, degenerate, singular, gauduchon, check };

struct ScheduleConfig {
  int t_steps = 8;
  std::vector<int> lambda_path = {4, 8, 16, 32};
  std::vector<double> eps;              // empty -> default 2^-j, j = 1..6
  std::vector<double> delta_factors = {4.0, 2.0, 1.0};  // x grid spacing
  double lambda_max = 10240.0;          // envelope: 10 * 2^k capped here
};

struct RunConfig {
  // geometry
  int n = 1;
  int res = 64;
  std::vector<double> periods;  // empty -> all 1.0

  MetricSpec metric;

  // problem
  RunMode mode = RunMode::solve;
  double lambda = 1.0;
  double p_exponent = 2.0;
  FunctionSpec density;
  std::optional<KltConfig> klt;
  FunctionSpec obstacle;
  std::string suite = "all";

  // solver
  double tol = 1e-9;
  int max_newton = 50;
  ScheduleConfig schedules;

  // output
  std::filesystem::path output_directory = ".";
  bool emit_fields = true;
  bool emit_csv = true;

  GridPtr make_grid() const;
  std::string mode_name() const;
};

/// Parses and validates a config file. Unknown keys are rejected; messages
/// name the offending key; paths resolve relative to the config location.
/// Throws Error(ErrorCode::config) on any violation.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);

}  // namespace cyma
