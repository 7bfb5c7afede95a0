#include "cyma/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cyma/errors.hpp"

namespace cyma {

using nlohmann::json;

namespace {

[[noreturn]] void config_fail(const std::string& msg) { fail(ErrorCode::config, msg); }

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      config_fail("unknown key '" + where + "." + it.key() + "'");
}

double require_number(const json& obj, const std::string& where, const std::string& key,
                      std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    config_fail("missing key '" + where + "." + key + "'");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) config_fail("'" + where + "." + key + "' must be a number");
  return v.get<double>();
}

int require_int(const json& obj, const std::string& where, const std::string& key,
                std::optional<int> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    config_fail("missing key '" + where + "." + key + "'");
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) config_fail("'" + where + "." + key + "' must be an integer");
  return v.get<int>();
}

std::string require_string(const json& obj, const std::string& where, const std::string& key,
                           std::optional<std::string> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    config_fail("missing key '" + where + "." + key + "'");
  }
  const json& v = obj.at(key);
  if (!v.is_string()) config_fail("'" + where + "." + key + "' must be a string");
  return v.get<std::string>();
}

bool require_bool(const json& obj, const std::string& where, const std::string& key,
                  bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) config_fail("'" + where + "." + key + "' must be a boolean");
  return v.get<bool>();
}

FunctionSpec parse_function(const json& obj, const std::string& where, int real_dim) {
  reject_unknown(obj, where, {"constant", "modes"});
  FunctionSpec spec;
  spec.constant = require_number(obj, where, "constant", 0.0);
  if (obj.contains("modes")) {
    const json& modes = obj.at("modes");
    if (!modes.is_array()) config_fail("'" + where + ".modes' must be an array");
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const std::string mwhere = where + ".modes[" + std::to_string(m) + "]";
      const json& mode = modes[m];
      if (!mode.is_object()) config_fail("'" + mwhere + "' must be an object");
      reject_unknown(mode, mwhere, {"index", "amplitude", "phase"});
      FourierMode fm;
      if (!mode.contains("index") || !mode.at("index").is_array())
        config_fail("'" + mwhere + ".index' must be an array of integers");
      for (const json& k : mode.at("index")) {
        if (!k.is_number_integer()) config_fail("'" + mwhere + ".index' must hold integers");
        fm.index.push_back(k.get<int>());
      }
      if (fm.index.size() != static_cast<std::size_t>(real_dim))
        config_fail("'" + mwhere + ".index' needs one entry per real axis");
      fm.amplitude = require_number(mode, mwhere, "amplitude");
      fm.phase = require_number(mode, mwhere, "phase", 0.0);
      spec.modes.push_back(std::move(fm));
    }
  }
  return spec;
}

KltConfig parse_klt(const json& obj, const std::string& where, int real_dim) {
  reject_unknown(obj, where, {"points", "exponents", "mollification"});
  KltConfig klt;
  if (!obj.contains("points") || !obj.at("points").is_array())
    config_fail("'" + where + ".points' must be an array");
  for (const json& p : obj.at("points")) {
    if (!p.is_array() || p.size() != static_cast<std::size_t>(real_dim))
      config_fail("'" + where + ".points' entries need one coordinate per real axis");
    std::vector<double> pt;
    for (const json& c : p) {
      if (!c.is_number()) config_fail("'" + where + ".points' must hold numbers");
      pt.push_back(c.get<double>());
    }
    klt.points.push_back(std::move(pt));
  }
  if (!obj.contains("exponents") || !obj.at("exponents").is_array())
    config_fail("'" + where + ".exponents' must be an array");
  for (const json& a : obj.at("exponents")) {
    if (!a.is_number()) config_fail("'" + where + ".exponents' must hold numbers");
    const double av = a.get<double>();
    if (!(av > -1.0)) config_fail("'" + where + ".exponents' must exceed -1");
    klt.exponents.push_back(av);
  }
  if (klt.points.size() != klt.exponents.size())
    config_fail("'" + where + "' needs one exponent per point");
  klt.mollification = require_number(obj, where, "mollification", 0.0);
  if (klt.mollification < 0.0)
    config_fail("'" + where + ".mollification' must be nonnegative");
  return klt;
}

}  // namespace

ScalarField FunctionSpec::realize(GridPtr grid) const {
  const double two_pi = 2.0 * std::numbers::pi;
  const int dim = grid->real_dim();
  std::vector<double> v(grid->point_count(), constant);
  for (const FourierMode& m : modes) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      double arg = m.phase;
      for (int a = 0; a < dim; ++a)
        arg += two_pi * m.index[static_cast<size_t>(a)] * grid->coordinate(i, a) /
               grid->period(a);
      v[i] += m.amplitude * std::cos(arg);
    }
  }
  return ScalarField(std::move(grid), std::move(v));
}

GridPtr RunConfig::make_grid() const {
  if (periods.empty()) return TorusGrid::make(n, res);
  return TorusGrid::make(n, res, periods);
}

std::string RunConfig::mode_name() const {
  switch (mode) {
    case RunMode::solve: return "solve";
    case RunMode::calabi: return "calabi";
    case RunMode::envelope: return "envelope";
    case RunMode::degenerate: return "degenerate";
    case RunMode::singular: return "singular";
    case RunMode::gauduchon: return "gauduchon";
    case RunMode::check: return "check";
  }
  return "unknown";
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // Recover a line/column from the byte offset for a usable message.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    config_fail("malformed JSON at line " + std::to_string(line) + ", column " +
                std::to_string(col));
  }
  if (!root.is_object()) config_fail("config root must be an object");
  reject_unknown(root, "config", {"geometry", "metric", "problem", "solver", "output"});

  RunConfig cfg;

  if (!root.contains("geometry") || !root.at("geometry").is_object())
    config_fail("missing object 'config.geometry'");
  const json& geo = root.at("geometry");
  reject_unknown(geo, "geometry", {"n", "res", "periods"});
  cfg.n = require_int(geo, "geometry", "n");
  cfg.res = require_int(geo, "geometry", "res");
  if (cfg.n != 1 && cfg.n != 2) config_fail("'geometry.n' must be 1 or 2");
  if (cfg.res < 8 || (cfg.res & (cfg.res - 1)) != 0)
    config_fail("'geometry.res' must be a power of two >= 8");
  if (geo.contains("periods")) {
    if (!geo.at("periods").is_array())
      config_fail("'geometry.periods' must be an array");
    for (const json& p : geo.at("periods")) {
      if (!p.is_number() || !(p.get<double>() > 0.0))
        config_fail("'geometry.periods' must hold positive numbers");
      cfg.periods.push_back(p.get<double>());
    }
    if (cfg.periods.size() != static_cast<std::size_t>(2 * cfg.n))
      config_fail("'geometry.periods' needs one entry per real axis");
  }
  const int real_dim = 2 * cfg.n;

  if (!root.contains("metric") || !root.at("metric").is_object())
    config_fail("missing object 'config.metric'");
  const json& met = root.at("metric");
  reject_unknown(met, "metric", {"kind", "epsilon", "amplitude"});
  const std::string kind = require_string(met, "metric", "kind");
  if (kind == "flat") {
    cfg.metric = MetricSpec::flat_metric();
  } else if (kind == "hermitian_nonkahler") {
    cfg.metric = MetricSpec::nonkahler(require_number(met, "metric", "epsilon", 0.1));
    if (cfg.n != 2) config_fail("'metric.kind' hermitian_nonkahler needs n = 2");
    if (!(cfg.metric.epsilon >= 0.0 && cfg.metric.epsilon < 1.0))
      config_fail("'metric.epsilon' must satisfy 0 <= epsilon < 1");
  } else if (kind == "degenerate") {
    cfg.metric = MetricSpec::degenerate_big(require_number(met, "metric", "amplitude", 1.0));
    if (cfg.n != 1) config_fail("'metric.kind' degenerate needs n = 1");
    if (!(cfg.metric.amplitude > 0.0)) config_fail("'metric.amplitude' must be positive");
  } else {
    config_fail("'metric.kind' must be flat, hermitian_nonkahler, or degenerate");
  }

  if (!root.contains("problem") || !root.at("problem").is_object())
    config_fail("missing object 'config.problem'");
  const json& prob = root.at("problem");
  reject_unknown(prob, "problem",
                 {"mode", "lambda", "p_exponent", "density", "klt", "obstacle", "suite"});
  const std::string mode = require_string(prob, "problem", "mode");
  if (mode == "solve") cfg.mode = RunMode::solve;
  else if (mode == "calabi") cfg.mode = RunMode::calabi;
  else if (mode == "envelope") cfg.mode = RunMode::envelope;
  else if (mode == "degenerate") cfg.mode = RunMode::degenerate;
  else if (mode == "singular") cfg.mode = RunMode::singular;
  else if (mode == "gauduchon") cfg.mode = RunMode::gauduchon;
  else if (mode == "check") cfg.mode = RunMode::check;
  else config_fail("'problem.mode' must be one of solve|calabi|envelope|degenerate|singular|gauduchon|check");

  cfg.lambda = require_number(prob, "problem", "lambda", 1.0);
  if (cfg.lambda < 0.0) config_fail("'problem.lambda' must be nonnegative");
  if (cfg.mode == RunMode::solve && !(cfg.lambda > 0.0))
    config_fail("'problem.lambda' must be positive in solve mode (use calabi for lambda = 0)");
  cfg.p_exponent = require_number(prob, "problem", "p_exponent", 2.0);
  if (!(cfg.p_exponent > 1.0)) config_fail("'problem.p_exponent' must exceed 1");

  if (prob.contains("density")) {
    if (!prob.at("density").is_object()) config_fail("'problem.density' must be an object");
    cfg.density = parse_function(prob.at("density"), "problem.density", real_dim);
  }
  if (prob.contains("klt")) {
    if (!prob.at("klt").is_object()) config_fail("'problem.klt' must be an object");
    cfg.klt = parse_klt(prob.at("klt"), "problem.klt", real_dim);
  }
  if (prob.contains("obstacle")) {
    if (!prob.at("obstacle").is_object()) config_fail("'problem.obstacle' must be an object");
    cfg.obstacle = parse_function(prob.at("obstacle"), "problem.obstacle", real_dim);
  }
  cfg.suite = require_string(prob, "problem", "suite", "all");
  if (cfg.mode == RunMode::check && cfg.suite != "smooth" && cfg.suite != "envelope" &&
      cfg.suite != "degenerate" && cfg.suite != "singular" && cfg.suite != "all")
    config_fail("'problem.suite' must be smooth|envelope|degenerate|singular|all");
  if (cfg.mode == RunMode::singular && !cfg.klt)
    config_fail("'problem.klt' is required in singular mode");
  if (cfg.mode == RunMode::envelope && cfg.obstacle.trivial() && cfg.obstacle.constant == 0.0
      && cfg.obstacle.modes.empty() && !prob.contains("obstacle"))
    config_fail("'problem.obstacle' is required in envelope mode");

  if (root.contains("solver")) {
    const json& sol = root.at("solver");
    if (!sol.is_object()) config_fail("'config.solver' must be an object");
    reject_unknown(sol, "solver", {"tol", "max_newton", "schedules"});
    cfg.tol = require_number(sol, "solver", "tol", cfg.tol);
    if (!(cfg.tol > 0.0)) config_fail("'solver.tol' must be positive");
    cfg.max_newton = require_int(sol, "solver", "max_newton", cfg.max_newton);
    if (cfg.max_newton < 1) config_fail("'solver.max_newton' must be at least 1");
    if (sol.contains("schedules")) {
      const json& sch = sol.at("schedules");
      if (!sch.is_object()) config_fail("'solver.schedules' must be an object");
      reject_unknown(sch, "solver.schedules",
                     {"t_steps", "lambda_path", "eps", "delta_factors", "lambda_max"});
      cfg.schedules.t_steps = require_int(sch, "solver.schedules", "t_steps", 8);
      if (cfg.schedules.t_steps < 1) config_fail("'solver.schedules.t_steps' must be >= 1");
      if (sch.contains("lambda_path")) {
        cfg.schedules.lambda_path.clear();
        for (const json& j : sch.at("lambda_path")) {
          if (!j.is_number_integer() || j.get<int>() < 1)
            config_fail("'solver.schedules.lambda_path' must hold positive integers");
          cfg.schedules.lambda_path.push_back(j.get<int>());
        }
      }
      if (sch.contains("eps")) {
        cfg.schedules.eps.clear();
        for (const json& e : sch.at("eps")) {
          if (!e.is_number() || !(e.get<double>() > 0.0))
            config_fail("'solver.schedules.eps' must hold positive numbers");
          cfg.schedules.eps.push_back(e.get<double>());
        }
      }
      if (sch.contains("delta_factors")) {
        cfg.schedules.delta_factors.clear();
        for (const json& d : sch.at("delta_factors")) {
          if (!d.is_number() || d.get<double>() < 0.0)
            config_fail("'solver.schedules.delta_factors' must hold nonnegative numbers");
          cfg.schedules.delta_factors.push_back(d.get<double>());
        }
      }
      cfg.schedules.lambda_max =
          require_number(sch, "solver.schedules", "lambda_max", cfg.schedules.lambda_max);
      if (!(cfg.schedules.lambda_max >= 10.0))
        config_fail("'solver.schedules.lambda_max' must be at least 10");
    }
  }

  if (root.contains("output")) {
    const json& out = root.at("output");
    if (!out.is_object()) config_fail("'config.output' must be an object");
    reject_unknown(out, "output", {"directory", "emit_fields", "emit_csv"});
    const std::string dir = require_string(out, "output", "directory", ".");
    cfg.output_directory = base_dir / dir;
    cfg.emit_fields = require_bool(out, "output", "emit_fields", true);
    cfg.emit_csv = require_bool(out, "output", "emit_csv", true);
  } else {
    cfg.output_directory = base_dir;
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::config, "cannot open config: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.has_parent_path() ? path.parent_path()
                                                           : std::filesystem::path("."));
}

}  // namespace cyma
