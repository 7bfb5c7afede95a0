#include "cyma/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "cyma/calculus.hpp"
#include "cyma/checks.hpp"
#include "cyma/envelope.hpp"
#include "cyma/errors.hpp"
#include "cyma/io.hpp"
#include "cyma/ma.hpp"

namespace cyma {

using nlohmann::json;

namespace {

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&tt, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

json solution_json(const MASolution& sol) {
  json j;
  j["c"] = sol.c;
  j["b"] = sol.b;
  j["residual"] = sol.residual;
  j["iterations"] = sol.iterations;
  j["positivity_margin"] = sol.positivity_margin;
  j["osc_phi"] = sol.diagnostics.osc_phi;
  j["mass"] = sol.diagnostics.mass;
  j["max_laplacian"] = sol.diagnostics.max_laplacian;
  j["spectral_tail"] = sol.diagnostics.spectral_tail;
  return j;
}

void write_monitors_csv(const std::filesystem::path& path,
                        const std::vector<double>& steps,
                        const std::vector<MASolution>& sols,
                        const std::vector<double>& constants) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::io_failure, "cannot write " + path.string());
  out << "step,residual,osc_phi,max_laplacian,c_or_b,mass\n";
  out.setf(std::ios::scientific);
  out.precision(17);
  for (std::size_t i = 0; i < sols.size(); ++i) {
    out << steps[i] << "," << sols[i].residual << "," << sols[i].diagnostics.osc_phi << ","
        << sols[i].diagnostics.max_laplacian << "," << constants[i] << ","
        << sols[i].diagnostics.mass << "\n";
  }
}

struct RunArtifacts {
  json report;
  std::optional<ScalarField> solution;
  std::string solution_desc;
  std::optional<ScalarField> extra_field;  // e.g. contact mask
  std::string extra_name;
  std::vector<double> monitor_steps;
  std::vector<MASolution> monitor_solutions;
  std::vector<double> monitor_constants;
  bool solver_ok = true;
};

RunArtifacts execute(const RunConfig& cfg, bool no_timestamp) {
  RunArtifacts art;
  const GridPtr grid = cfg.make_grid();
  art.report["mode"] = cfg.mode_name();
  art.report["geometry"] = {{"n", cfg.n}, {"res", cfg.res}, {"periods", grid->periods()}};
  art.report["metric"] = {{"kind", cfg.metric.name()},
                          {"epsilon", cfg.metric.epsilon},
                          {"amplitude", cfg.metric.amplitude}};

  SolverOptions opts;
  opts.tol = cfg.tol;
  opts.max_newton = cfg.max_newton;

  switch (cfg.mode) {
    case RunMode::solve: {
      const HermitianField omega = build_metric(grid, cfg.metric);
      MAProblem problem{omega, cfg.lambda, cfg.density.realize(grid),
                        Normalization::none, cfg.tol, cfg.max_newton};
      const MASolution sol = newton_solve(problem, opts);
      art.report["solution"] = solution_json(sol);
      art.solution = sol.phi;
      art.solution_desc = "potential phi solving the lambda > 0 equation";
      art.monitor_steps = {cfg.lambda};
      art.monitor_constants = {sol.b};
      art.monitor_solutions = {sol};
      break;
    }
    case RunMode::calabi: {
      const HermitianField omega = build_metric(grid, cfg.metric);
      ScalarField f = cfg.density.realize(grid);
      if (cfg.density.trivial()) f = f + 1.0;  // default density 1
      const MASolution sol = solve_calabi(omega, f, cfg.p_exponent, opts);
      art.report["solution"] = solution_json(sol);
      art.solution = sol.phi;
      art.solution_desc = "sup-normalized potential of the constant-unknown problem";
      art.monitor_steps = {0.0};
      art.monitor_constants = {sol.c};
      art.monitor_solutions = {sol};
      break;
    }
    case RunMode::envelope: {
      const HermitianField omega = build_metric(grid, cfg.metric);
      const ScalarField g = cfg.obstacle.realize(grid);
      std::vector<double> schedule;
      for (double lam = 10.0; lam <= cfg.schedules.lambda_max; lam *= 2.0)
        schedule.push_back(lam);
      EnvelopeOptions eopts;
      eopts.solver = opts;
      const EnvelopeResult env = envelope_penalized(omega, g, schedule, eopts);
      art.solver_ok = env.completed;
      json steps = json::array();
      for (const EnvelopeStep& s : env.lambda_trace) {
        steps.push_back({{"lambda", s.lambda},
                         {"sup_distance", s.sup_distance_to_previous},
                         {"lower_violation", s.lower_violation},
                         {"upper_violation", s.upper_violation},
                         {"max_trace", s.max_trace},
                         {"orthogonality_defect", s.orthogonality_defect},
                         {"residual", s.residual}});
      }
      art.report["envelope"] = {{"steps", steps},
                                {"upper_constant", env.upper_constant},
                                {"eps_contact", env.eps_contact},
                                {"orthogonality_defect", env.orthogonality_defect},
                                {"completed", env.completed}};
      if (!env.completed) art.report["envelope"]["failure"] = env.failure;
      art.solution = env.P;
      art.solution_desc = "penalized approximation of the psh envelope";
      art.extra_field = env.contact_mask;
      art.extra_name = "contact_mask";
      break;
    }
    case RunMode::degenerate: {
      if (cfg.metric.kind != MetricKind::degenerate)
        fail(ErrorCode::config, "'metric.kind' must be degenerate in degenerate mode");
      const HermitianField theta = build_metric(grid, cfg.metric);
      const HermitianField omega = HermitianField::identity(grid);
      ScalarField f = cfg.density.realize(grid);
      if (cfg.density.trivial()) f = f + 1.0;
      std::vector<double> eps =
          cfg.schedules.eps.empty() ? default_eps_schedule() : cfg.schedules.eps;
      const PathResult path = solve_degenerate(theta, omega, f, eps, cfg.p_exponent, opts);
      art.solver_ok = path.completed;
      art.report["path"] = {{"schedule", path.schedule},
                            {"constants", path.constants_trace},
                            {"refined", path.refined},
                            {"completed", path.completed}};
      if (!path.completed) art.report["path"]["failure"] = path.failure;
      if (!path.solutions.empty()) {
        art.report["solution"] = solution_json(path.solutions.back());
        art.solution = path.solutions.back().phi;
        art.solution_desc = "final potential of the degenerate-form path";
      }
      art.monitor_steps = path.schedule;
      art.monitor_constants = path.constants_trace;
      art.monitor_solutions = path.solutions;
      break;
    }
    case RunMode::singular: {
      const HermitianField omega = build_metric(grid, cfg.metric);
      KltDensitySpec spec;
      spec.points = cfg.klt->points;
      spec.exponents = cfg.klt->exponents;
      if (!cfg.density.trivial()) spec.smooth_factor = cfg.density.realize(grid);
      const double h = grid->spacing(0);
      std::vector<double> deltas;
      for (double fac : cfg.schedules.delta_factors) deltas.push_back(fac * h);
      const PathResult path = solve_singular(omega, spec, deltas, cfg.p_exponent, opts);
      art.solver_ok = path.completed;
      art.report["path"] = {{"schedule", path.schedule},
                            {"constants", path.constants_trace},
                            {"completed", path.completed}};
      if (!path.solutions.empty()) {
        art.report["solution"] = solution_json(path.solutions.back());
        art.solution = path.solutions.back().phi;
        art.solution_desc = "final potential of the mollified singular-density path";
      }
      art.monitor_steps = path.schedule;
      art.monitor_constants = path.constants_trace;
      art.monitor_solutions = path.solutions;
      break;
    }
    case RunMode::gauduchon: {
      const HermitianField omega = build_metric(grid, cfg.metric);
      const ScalarField h = gauduchon_factor(omega);
      const double residual = closedness_defect(omega.scaled_by(h));
      art.report["gauduchon"] = {{"residual", residual},
                                 {"min", h.min()},
                                 {"max", h.max()},
                                 {"mean", h.mean()}};
      art.solution = h;
      art.solution_desc = "Gauduchon conformal factor, mean normalized to 1";
      break;
    }
    case RunMode::check: {
      CheckOptions copts;
      copts.record_timings = !no_timestamp;
      const CheckReport rep = run_checks(cfg.suite, copts);
      art.report["check"] = json::parse(report_to_json(rep, !no_timestamp));
      art.solver_ok = rep.overall_pass;
      break;
    }
  }
  return art;
}

}  // namespace

int run(const RunRequest& request, std::string& message) {
  RunConfig cfg;
  try {
    cfg = load_config(request.config_path);
    if (request.output_override) cfg.output_directory = *request.output_override;
  } catch (const Error& e) {
    message = e.what();
    return kExitConfigError;
  }

  RunArtifacts art;
  try {
    art = execute(cfg, request.no_timestamp);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) {
      message = e.what();
      return kExitConfigError;
    }
    message = e.what();
    return kExitSolverFailure;
  }

  try {
    std::filesystem::create_directories(cfg.output_directory);
    if (!request.no_timestamp) art.report["created_at"] = timestamp_utc();
    art.report["config"] = request.config_path.filename().string();

    if (art.solution && cfg.emit_fields) {
      const auto field_path = cfg.output_directory / "solution.cyf";
      write_field(field_path, *art.solution);
      write_field_meta(field_path, art.solution->grid(), art.solution_desc);
      if (art.extra_field) {
        const auto extra_path = cfg.output_directory / (art.extra_name + ".cyf");
        write_field(extra_path, *art.extra_field);
        write_field_meta(extra_path, art.extra_field->grid(), art.extra_name);
      }
    }
    if (cfg.emit_csv && !art.monitor_solutions.empty())
      write_monitors_csv(cfg.output_directory / "monitors.csv", art.monitor_steps,
                         art.monitor_solutions, art.monitor_constants);

    std::ofstream out(cfg.output_directory / "report.json", std::ios::trunc);
    if (!out) fail(ErrorCode::io_failure, "cannot write report.json");
    out << art.report.dump(2) << "\n";
  } catch (const Error& e) {
    message = e.what();
    return kExitSolverFailure;
  }

  if (!art.solver_ok) {
    message = "run finished with failures; see report.json";
    return kExitSolverFailure;
  }
  message = "ok";
  return kExitOk;
}

}  // namespace cyma
