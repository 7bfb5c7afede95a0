#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cyma/checks.hpp"
#include "cyma/errors.hpp"
#include "cyma/io.hpp"
#include "cyma/runner.hpp"

namespace {

int cmd_run(const std::string& config, const std::string& out, bool no_timestamp) {
  cyma::RunRequest req;
  req.config_path = config;
  if (!out.empty()) req.output_override = out;
  req.no_timestamp = no_timestamp;
  std::string message;
  const int code = cyma::run(req, message);
  if (code != cyma::kExitOk)
    std::cerr << "cyma run: " << message << "\n";
  else
    std::cout << "cyma run: " << message << "\n";
  return code;
}

int cmd_check(const std::string& suite, const std::string& out, bool no_timestamp) {
  cyma::CheckOptions opts;
  opts.record_timings = !no_timestamp;
  cyma::CheckReport report;
  try {
    report = cyma::run_checks(suite, opts);
  } catch (const cyma::Error& e) {
    std::cerr << "cyma check: " << e.what() << "\n";
    return cyma::kExitConfigError;
  }
  for (const cyma::CheckRecord& c : report.checks) {
    std::printf("%-44s %s  measured=%.6e  threshold%s%.6e\n", c.id.c_str(),
                c.pass ? "PASS" : "FAIL", c.measured, c.comparison == "<=" ? "<=" : ">=",
                c.threshold);
  }
  std::printf("suite %s: %s (%zu checks, seed %llu)\n", report.suite.c_str(),
              report.overall_pass ? "PASS" : "FAIL", report.checks.size(),
              static_cast<unsigned long long>(report.seed));
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    std::ofstream f(std::filesystem::path(out) / "report.json", std::ios::trunc);
    f << cyma::report_to_json(report, !no_timestamp) << "\n";
  }
  return report.overall_pass ? cyma::kExitOk : cyma::kExitSolverFailure;
}

int cmd_info(const std::string& path) {
  try {
    const cyma::AnyField field = cyma::read_field(path);
    if (std::holds_alternative<cyma::ScalarField>(field)) {
      const auto& f = std::get<cyma::ScalarField>(field);
      std::printf("CYF1 scalar field: n=%d res=%d points=%zu\n", f.grid().n(),
                  f.grid().res(), f.size());
      std::printf("min=%.9g max=%.9g mean=%.9g osc=%.9g\n", f.min(), f.max(), f.mean(),
                  f.osc());
    } else {
      const auto& f = std::get<cyma::HermitianField>(field);
      std::printf("CYF1 hermitian field: n=%d res=%d points=%zu\n", f.grid().n(),
                  f.grid().res(), f.grid().point_count());
    }
    const std::filesystem::path meta = path + ".meta.json";
    if (std::filesystem::exists(meta)) {
      std::ifstream in(meta);
      nlohmann::json j;
      in >> j;
      std::printf("meta: %s\n", j.dump().c_str());
    }
    return 0;
  } catch (const cyma::Error& e) {
    std::cerr << "cyma info: " << e.what() << "\n";
    return cyma::kExitConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monge-Ampere toolkit for periodic model geometries"};
  app.require_subcommand(1);

  std::string config_path, out_dir, suite = "all", field_path;
  bool no_timestamp = false;

  CLI::App* run = app.add_subcommand("run", "run a JSON-configured job");
  run->add_option("config", config_path, "path to config.json")->required();
  run->add_option("--out", out_dir, "output directory override");
  run->add_flag("--no-timestamp", no_timestamp, "omit timestamps for reproducible output");

  CLI::App* check = app.add_subcommand("check", "run property suites");
  check->add_option("--suite", suite, "smooth|envelope|degenerate|singular|all");
  check->add_option("--out", out_dir, "where to write report.json");
  check->add_flag("--no-timestamp", no_timestamp, "omit timings for reproducible output");

  CLI::App* info = app.add_subcommand("info", "describe a CYF1 field file");
  info->add_option("field", field_path, "path to a .cyf file")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config_path, out_dir, no_timestamp);
  if (check->parsed()) return cmd_check(suite, out_dir, no_timestamp);
  if (info->parsed()) return cmd_info(field_path);
  return 1;
}
