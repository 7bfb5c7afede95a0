#include "cyma/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cyma/calculus.hpp"
#include "cyma/errors.hpp"
#include "cyma/linear.hpp"
#include "cyma/spectral.hpp"

namespace cyma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Inverse blocks of a Hermitian field (n <= 2, closed form). Blocks flagged
// in `dead` are replaced by the identity; their rows use the flat form.
std::vector<complex_t> inverse_blocks(const HermitianField& a,
                                      const std::vector<char>& dead) {
  const int n = a.grid().n();
  const std::size_t npts = a.grid().point_count();
  const std::size_t nn = a.block_size();
  std::vector<complex_t> inv(npts * nn);
  for (std::size_t i = 0; i < npts; ++i) {
    if (!dead.empty() && dead[i]) {
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          inv[i * nn + static_cast<std::size_t>(j) * n + k] =
              complex_t(j == k ? 1.0 : 0.0, 0.0);
      continue;
    }
    const auto blk = a.block(i);
    const double d = linalg::det(blk, n);
    if (std::abs(d) < 1e-300) fail(ErrorCode::singular_matrix, "singular form in Newton step");
    if (n == 1) {
      inv[i] = complex_t(1.0 / d, 0.0);
    } else {
      inv[i * 4 + 0] = blk[3] / d;
      inv[i * 4 + 1] = -blk[1] / d;
      inv[i * 4 + 2] = -blk[2] / d;
      inv[i * 4 + 3] = blk[0] / d;
    }
  }
  return inv;
}

std::vector<complex_t> inverse_blocks(const HermitianField& a) {
  return inverse_blocks(a, {});
}

// tr(B_i * H(delta)_i) with precomputed inverse blocks B.
std::vector<double> chern_laplacian_apply(const GridPtr& grid,
                                          const std::vector<complex_t>& inv,
                                          const std::vector<double>& delta) {
  const int n = grid->n();
  const HermitianField h = ddc(ScalarField(grid, delta));
  const std::size_t npts = grid->point_count();
  const std::size_t nn = h.block_size();
  std::vector<double> out(npts);
  for (std::size_t i = 0; i < npts; ++i) {
    const auto hb = h.block(i);
    complex_t tr(0.0, 0.0);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        tr += inv[i * nn + static_cast<std::size_t>(j) * n + k] *
              hb[static_cast<std::size_t>(k) * n + j];
    out[i] = tr.real();
  }
  return out;
}

struct ResidualEval {
  double sup = kInf;          // sup |r| (saturated points contribute zero)
  double l2 = kInf;           // Euclidean norm of the same residual
  double margin = -kInf;      // min eigenvalue of omega + ddc(phi)
  std::vector<double> r;      // pointwise residual
  std::vector<char> dead;     // saturated points
  HermitianField perturbed;   // omega + ddc(phi)
};

// r_i = log det((g + H)_i)/det(g_i) - lambda phi_i - f_i - b. Points where
// both the density and the exponential right-hand side sit below the
// saturation floor compare numbers beneath arithmetic resolution; they are
// treated as satisfied (the positivity corridor keeps the density pinned
// near zero there).
ResidualEval evaluate_residual(const HermitianField& omega, const ScalarField& phi,
                               const ScalarField& f, double lambda, double b,
                               const SolverOptions& opts) {
  const int n = omega.grid().n();
  const std::size_t npts = omega.grid().point_count();
  ResidualEval ev;
  ev.perturbed = omega + ddc(phi);
  ev.margin = kInf;
  for (std::size_t i = 0; i < npts; ++i)
    ev.margin = std::min(ev.margin, linalg::min_eigenvalue(ev.perturbed.block(i), n));
  if (!(ev.margin > -opts.positivity_floor) || !(ev.margin > -kInf)) {
    ev.sup = kInf;
    return ev;
  }
  const double sat = opts.saturation_log;
  const double sat_density = std::exp(sat);  // 0 when saturation is disabled
  ev.r.assign(npts, 0.0);
  ev.dead.assign(npts, 0);
  ev.sup = 0.0;
  double l2sq = 0.0;
  for (std::size_t i = 0; i < npts; ++i) {
    const double ratio =
        linalg::det(ev.perturbed.block(i), n) / linalg::det(omega.block(i), n);
    const double rhs_exp = lambda * phi[i] + f[i] + b;
    if (rhs_exp <= sat && ratio <= sat_density) {
      ev.dead[i] = 1;
      continue;
    }
    if (!(ratio > 0.0)) {
      ev.sup = kInf;
      return ev;
    }
    ev.r[i] = std::log(ratio) - rhs_exp;
    ev.sup = std::max(ev.sup, std::abs(ev.r[i]));
    l2sq += ev.r[i] * ev.r[i];
  }
  ev.l2 = std::sqrt(l2sq);
  return ev;
}

SolutionDiagnostics collect_diagnostics(const HermitianField& omega,
                                        const ScalarField& phi,
                                        const HermitianField& perturbed) {
  SolutionDiagnostics d;
  d.osc_phi = phi.osc();
  d.mass = mass(omega, phi);
  const int n = omega.grid().n();
  double max_lap = -kInf;
  for (std::size_t i = 0; i < omega.grid().point_count(); ++i)
    max_lap = std::max(max_lap, linalg::trace_of_inverse_product(
                                    omega.block(i), perturbed.block(i), n) -
                                    n);
  d.max_laplacian = max_lap;
  d.spectral_tail = spectral_tail(phi);
  return d;
}

// Damped Newton for lambda > 0 (fixed c = 1).
MASolution newton_positive_lambda(const HermitianField& omega, const ScalarField& f,
                                  double lambda, const ScalarField& init,
                                  const SolverOptions& opts) {
  const GridPtr grid = omega.grid_ptr();
  const std::size_t npts = grid->point_count();
  SpectralWorkspace& ws = SpectralWorkspace::local(grid);
  const auto& flat = ws.flat_laplacian_multiplier();

  ScalarField phi = init;
  ResidualEval ev = evaluate_residual(omega, phi, f, lambda, 0.0, opts);
  if (!(ev.margin > -opts.positivity_floor) || ev.sup == kInf)
    fail(ErrorCode::positivity, "initial guess is not strictly omega-psh");

  MASolution sol;
  for (int it = 0; it < opts.max_newton; ++it) {
    if (ev.sup <= opts.tol) {
      sol.iterations = it;
      break;
    }
    const std::vector<complex_t> inv = inverse_blocks(ev.perturbed, ev.dead);
    const std::vector<char>& dead = ev.dead;
    auto op = [&](const std::vector<double>& v) {
      std::vector<double> out = chern_laplacian_apply(grid, inv, v);
      for (std::size_t i = 0; i < npts; ++i) out[i] -= lambda * v[i];
      (void)dead;  // dead rows already use identity blocks (flat form)
      return out;
    };
    auto precond = [&](const std::vector<double>& v) {
      std::vector<complex_t> spectrum;
      ws.forward(std::span<const double>(v), spectrum);
      for (std::size_t i = 0; i < npts; ++i) spectrum[i] /= (flat[i] - lambda);
      std::vector<double> out;
      ws.inverse(spectrum, out);
      return out;
    };
    std::vector<double> rhs(npts);
    for (std::size_t i = 0; i < npts; ++i) rhs[i] = -ev.r[i];
    std::vector<double> delta;
    bicgstab(op, precond, rhs, delta, opts.krylov_rel_tol, opts.krylov_max_iter);

    double alpha = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opts.max_step_halvings; ++h, alpha *= 0.5) {
      std::vector<double> trial(npts);
      for (std::size_t i = 0; i < npts; ++i) trial[i] = phi[i] + alpha * delta[i];
      ScalarField trial_phi(grid, std::move(trial));
      ResidualEval trial_ev = evaluate_residual(omega, trial_phi, f, lambda, 0.0, opts);
      const bool margin_ok = trial_ev.margin > -opts.positivity_floor && trial_ev.sup < kInf;
      const bool decreased = trial_ev.sup < ev.sup ||
                             trial_ev.l2 <= ev.l2 * (1.0 - 1e-4 * alpha) ||
                             trial_ev.sup <= opts.tol;
      if (margin_ok && decreased) {
        phi = std::move(trial_phi);
        ev = std::move(trial_ev);
        accepted = true;
        break;
      }
    }
    if (!accepted)
      fail(ErrorCode::positivity_collapse,
           "no damped Newton step preserves positivity and decreases the residual; "
           "try a continuity path");
    sol.iterations = it + 1;
  }
  if (ev.sup > opts.tol)
    fail(ErrorCode::iteration_limit, "Newton iteration limit reached");

  sol.phi = std::move(phi);
  sol.c = 1.0;
  sol.b = 0.0;
  sol.residual = ev.sup;
  sol.positivity_margin = ev.margin;
  if (opts.collect_diagnostics)
    sol.diagnostics = collect_diagnostics(omega, sol.phi, ev.perturbed);
  return sol;
}

// Bordered damped Newton for lambda = 0 with unknown b = log c. The linear
// system couples (delta phi, delta b) through
//   tr(B H delta) - delta b = -r,   mean(delta phi) = 0,
// and is solved by BiCGStab with the exact flat-metric inverse as the
// preconditioner.
MASolution newton_bordered(const HermitianField& omega, const ScalarField& log_f,
                           const ScalarField& init, double b_init,
                           const SolverOptions& opts) {
  const GridPtr grid = omega.grid_ptr();
  const std::size_t npts = grid->point_count();
  SpectralWorkspace& ws = SpectralWorkspace::local(grid);
  const auto& flat = ws.flat_laplacian_multiplier();

  ScalarField phi = init;
  double b = b_init;
  SolverOptions strict = opts;
  strict.saturation_log = -kInf;
  strict.positivity_floor = 0.0;
  ResidualEval ev = evaluate_residual(omega, phi, log_f, 0.0, b, strict);
  if (!(ev.margin > 0.0) || ev.sup == kInf)
    fail(ErrorCode::positivity, "initial guess is not strictly omega-psh");

  MASolution sol;
  for (int it = 0; it < opts.max_newton; ++it) {
    if (ev.sup <= opts.tol) {
      sol.iterations = it;
      break;
    }
    const std::vector<complex_t> inv = inverse_blocks(ev.perturbed);
    auto op = [&](const std::vector<double>& v) {
      std::vector<double> u(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(npts));
      const double db = v[npts];
      std::vector<double> lap = chern_laplacian_apply(grid, inv, u);
      std::vector<double> out(npts + 1);
      double mean = 0.0;
      for (std::size_t i = 0; i < npts; ++i) {
        out[i] = lap[i] - db;
        mean += u[i];
      }
      out[npts] = mean / static_cast<double>(npts);
      return out;
    };
    auto precond = [&](const std::vector<double>& v) {
      // Exact inverse of the flat bordered system.
      std::vector<double> s(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(npts));
      const double t = v[npts];
      std::vector<complex_t> spectrum;
      ws.forward(std::span<const double>(s), spectrum);
      const double mean_s = spectrum[0].real() / static_cast<double>(npts);
      spectrum[0] = complex_t(t * static_cast<double>(npts), 0.0);
      for (std::size_t i = 1; i < npts; ++i) spectrum[i] /= flat[i];
      std::vector<double> u;
      ws.inverse(spectrum, u);
      std::vector<double> out(npts + 1);
      std::copy(u.begin(), u.end(), out.begin());
      out[npts] = -mean_s;
      return out;
    };
    std::vector<double> rhs(npts + 1, 0.0);
    for (std::size_t i = 0; i < npts; ++i) rhs[i] = -ev.r[i];
    std::vector<double> delta;
    const KrylovResult kr =
        bicgstab(op, precond, rhs, delta, opts.krylov_rel_tol, opts.krylov_max_iter);
    if (!kr.converged && kr.relative_residual > 0.5)
      fail(ErrorCode::singular_matrix, "bordered Newton system is numerically singular");

    double alpha = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opts.max_step_halvings; ++h, alpha *= 0.5) {
      std::vector<double> trial(npts);
      for (std::size_t i = 0; i < npts; ++i) trial[i] = phi[i] + alpha * delta[i];
      const double trial_b = b + alpha * delta[npts];
      ScalarField trial_phi(grid, std::move(trial));
      ResidualEval trial_ev =
          evaluate_residual(omega, trial_phi, log_f, 0.0, trial_b, strict);
      const bool decreased = trial_ev.sup < ev.sup ||
                             trial_ev.l2 <= ev.l2 * (1.0 - 1e-4 * alpha) ||
                             trial_ev.sup <= opts.tol;
      if (trial_ev.margin > 0.0 && trial_ev.sup < kInf && decreased) {
        phi = std::move(trial_phi);
        b = trial_b;
        ev = std::move(trial_ev);
        accepted = true;
        break;
      }
    }
    if (!accepted)
      fail(ErrorCode::positivity_collapse,
           "no damped bordered Newton step preserves positivity and decreases the residual");
    sol.iterations = it + 1;
  }
  if (ev.sup > opts.tol)
    fail(ErrorCode::iteration_limit, "bordered Newton iteration limit reached");

  // Shift to the sup normalization; the log residual is shift-invariant at
  // lambda = 0, so nothing else moves.
  phi = phi + (-phi.max());
  sol.phi = std::move(phi);
  sol.b = b;
  sol.c = std::exp(b);
  sol.residual = ev.sup;
  sol.positivity_margin = ev.margin;
  if (opts.collect_diagnostics)
    sol.diagnostics = collect_diagnostics(omega, sol.phi, ev.perturbed);
  return sol;
}

ScalarField exponent_field(const GridPtr& grid, const MAProblem& problem) {
  if (std::holds_alternative<ScalarField>(problem.density)) {
    const ScalarField& f = std::get<ScalarField>(problem.density);
    require_same_grid(*grid, f.grid(), "newton_solve density");
    return f;
  }
  const ScalarField f = klt_density(grid, std::get<KltDensitySpec>(problem.density));
  std::vector<double> log_f(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(f[i] > 0.0))
      fail(ErrorCode::infeasible, "singular density vanishes at a grid node");
    log_f[i] = std::log(f[i]);
  }
  return ScalarField(grid, std::move(log_f));
}

}  // namespace

MASolution newton_solve(const MAProblem& problem, const ScalarField& init,
                        const SolverOptions& opts_in) {
  if (!(problem.lambda > 0.0))
    fail(ErrorCode::unsupported_spec, "newton_solve requires lambda > 0; use solve_calabi");
  SolverOptions opts = opts_in;
  opts.tol = problem.tol;
  opts.max_newton = problem.max_newton;
  const GridPtr grid = problem.metric.grid_ptr();
  require_same_grid(*grid, init.grid(), "newton_solve init");
  return newton_positive_lambda(problem.metric, exponent_field(grid, problem),
                                problem.lambda, init, opts);
}

MASolution newton_solve(const MAProblem& problem, const SolverOptions& opts) {
  return newton_solve(problem,
                      ScalarField::constant(problem.metric.grid_ptr(), 0.0), opts);
}

PathResult continuity_path(const HermitianField& omega, const ScalarField& f,
                           std::vector<double> t_schedule, const SolverOptions& opts) {
  if (t_schedule.empty() || t_schedule.front() != 0.0 || t_schedule.back() != 1.0)
    fail(ErrorCode::unsupported_spec, "continuity schedule must run from 0 to 1");
  for (std::size_t i = 1; i < t_schedule.size(); ++i)
    if (!(t_schedule[i] > t_schedule[i - 1]))
      fail(ErrorCode::unsupported_spec, "continuity schedule must be strictly increasing");

  const GridPtr grid = omega.grid_ptr();
  PathResult path;
  ScalarField phi = ScalarField::constant(grid, 0.0);

  // t = 0 has the exact solution phi = 0.
  MAProblem p0{omega, 1.0, ScalarField::constant(grid, 0.0), Normalization::none,
               opts.tol, opts.max_newton};
  MASolution start = newton_solve(p0, phi, opts);
  path.schedule.push_back(0.0);
  path.constants_trace.push_back(start.b);
  path.solutions.push_back(std::move(start));

  double t_cur = 0.0;
  std::vector<double> pending(t_schedule.rbegin(), t_schedule.rend() - 1);
  int refinements = 0;
  while (!pending.empty()) {
    const double t_next = pending.back();
    MAProblem pt{omega, 1.0, f * t_next, Normalization::none, opts.tol, opts.max_newton};
    bool ok = true;
    MASolution sol;
    try {
      sol = newton_solve(pt, phi, opts);
    } catch (const Error&) {
      ok = false;
    }
    if (ok) {
      pending.pop_back();
      t_cur = t_next;
      phi = sol.phi;
      path.schedule.push_back(t_next);
      path.constants_trace.push_back(sol.b);
      path.solutions.push_back(std::move(sol));
    } else {
      if (++refinements > 10) {
        path.completed = false;
        path.failure = "continuity step kept failing after 10 bisections";
        return path;
      }
      path.refined = true;
      pending.push_back(0.5 * (t_cur + t_next));
    }
  }
  return path;
}

ScalarField klt_density(GridPtr grid, const KltDensitySpec& spec) {
  if (spec.points.size() != spec.exponents.size())
    fail(ErrorCode::unsupported_spec, "klt spec needs one exponent per point");
  for (double a : spec.exponents)
    if (!(a > -1.0)) fail(ErrorCode::klt_violation, "klt exponents must exceed -1");
  if (spec.mollification < 0.0)
    fail(ErrorCode::unsupported_spec, "mollification must be nonnegative");

  const int dim = grid->real_dim();
  const double pi = std::numbers::pi;
  const double d2 = spec.mollification * spec.mollification;
  std::vector<double> v(grid->point_count(), 1.0);
  for (std::size_t s = 0; s < spec.points.size(); ++s) {
    const auto& p = spec.points[s];
    if (p.size() != static_cast<std::size_t>(dim))
      fail(ErrorCode::unsupported_spec, "klt point has wrong dimension");
    const double a = spec.exponents[s];
    for (std::size_t i = 0; i < v.size(); ++i) {
      // Smooth periodic squared distance: sum_axis (L/pi)^2 sin^2(pi dx / L).
      double q = 0.0;
      for (int ax = 0; ax < dim; ++ax) {
        const double L = grid->period(ax);
        const double t = std::sin(pi * (grid->coordinate(i, ax) - p[static_cast<size_t>(ax)]) / L);
        q += (L / pi) * (L / pi) * t * t;
      }
      v[i] *= std::pow(q + d2, a);
    }
  }
  if (spec.smooth_factor) {
    require_same_grid(*grid, spec.smooth_factor->grid(), "klt smooth factor");
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::exp((*spec.smooth_factor)[i]);
  }
  return ScalarField(std::move(grid), std::move(v));
}

double lp_norm(const ScalarField& f, const HermitianField& omega, double p) {
  require_same_grid(f.grid(), omega.grid(), "lp_norm");
  const int n = omega.grid().n();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    acc += std::pow(std::abs(f[i]), p) * linalg::det(omega.block(i), n);
  return std::pow(acc * omega.grid().cell_volume(), 1.0 / p);
}

MASolution solve_calabi(const HermitianField& omega, const ScalarField& f_density,
                        double p_exponent, const SolverOptions& opts,
                        const std::optional<ScalarField>& init) {
  require_same_grid(omega.grid(), f_density.grid(), "solve_calabi");
  if (!(p_exponent > 1.0))
    fail(ErrorCode::unsupported_spec, "solve_calabi needs an L^p exponent > 1");
  if (f_density.min() < 0.0)
    fail(ErrorCode::infeasible, "density must be nonnegative");
  const double f_mass = integrate(f_density, omega);
  if (!(f_mass > 0.0))
    fail(ErrorCode::infeasible, "density must have positive total mass");
  (void)lp_norm(f_density, omega, p_exponent);  // finite by construction on a grid

  const GridPtr grid = omega.grid_ptr();
  std::vector<double> log_f(f_density.size());
  for (std::size_t i = 0; i < f_density.size(); ++i) {
    if (!(f_density[i] > 0.0))
      fail(ErrorCode::infeasible, "density vanishes at a grid node; move zeros off-lattice");
    log_f[i] = std::log(f_density[i]);
  }
  const ScalarField lf(grid, std::move(log_f));
  const ScalarField start = init ? *init : ScalarField::constant(grid, 0.0);
  const double b0 = std::log(total_volume(omega) / f_mass);

  try {
    return newton_bordered(omega, lf, start, b0, opts);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::singular_matrix && e.code() != ErrorCode::positivity_collapse &&
        e.code() != ErrorCode::iteration_limit)
      throw;
    // Fall back to the small-lambda family and retry from its endpoint.
    const PathResult path = calabi_lambda_path(omega, f_density, {4, 8, 16, 32, 64}, opts);
    const MASolution& last = path.solutions.back();
    return newton_bordered(omega, lf, last.phi, last.b, opts);
  }
}

PathResult calabi_lambda_path(const HermitianField& omega, const ScalarField& f_density,
                              const std::vector<int>& j_schedule,
                              const SolverOptions& opts) {
  require_same_grid(omega.grid(), f_density.grid(), "calabi_lambda_path");
  const GridPtr grid = omega.grid_ptr();
  std::vector<double> log_f(f_density.size());
  for (std::size_t i = 0; i < f_density.size(); ++i) {
    if (!(f_density[i] > 0.0))
      fail(ErrorCode::infeasible, "density vanishes at a grid node");
    log_f[i] = std::log(f_density[i]);
  }
  const ScalarField lf(grid, std::move(log_f));

  PathResult path;
  ScalarField phi = ScalarField::constant(grid, 0.0);
  for (int j : j_schedule) {
    if (j <= 0) fail(ErrorCode::unsupported_spec, "lambda path indices must be positive");
    const double lambda = 1.0 / j;
    MAProblem p{omega, lambda, lf, Normalization::none, opts.tol, opts.max_newton};
    MASolution sol = newton_solve(p, phi, opts);
    phi = sol.phi;
    // b_j = lambda_j * sup(phi_j) estimates log c.
    sol.b = lambda * sol.phi.max();
    sol.c = std::exp(sol.b);
    path.schedule.push_back(lambda);
    path.constants_trace.push_back(sol.b);
    path.solutions.push_back(std::move(sol));
  }
  return path;
}

double richardson_extrapolate(const std::vector<double>& h, const std::vector<double>& v) {
  // Neville tableau: polynomial in h extrapolated to h = 0.
  const std::size_t m = h.size();
  std::vector<double> t = v;
  for (std::size_t level = 1; level < m; ++level)
    for (std::size_t i = m - 1; i >= level; --i) {
      const double num = h[i - level] * t[i] - h[i] * t[i - 1];
      t[i] = num / (h[i - level] - h[i]);
      if (i == level) break;
    }
  return t[m - 1];
}

PathResult solve_degenerate(const HermitianField& theta, const HermitianField& omega,
                            const ScalarField& f_density, std::vector<double> eps_schedule,
                            double p_exponent, const SolverOptions& opts) {
  require_same_grid(theta.grid(), omega.grid(), "solve_degenerate");
  if (min_eigenvalue_field(theta).min() < -1e-10)
    fail(ErrorCode::positivity, "theta must be semipositive");
  if (min_eigenvalue_field(omega).min() <= 0.0)
    fail(ErrorCode::positivity, "omega must be positive");
  if (eps_schedule.empty()) fail(ErrorCode::unsupported_spec, "empty eps schedule");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] > 0.0))
      fail(ErrorCode::unsupported_spec, "eps values must be positive");
    if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1]))
      fail(ErrorCode::unsupported_spec, "eps schedule must decrease");
  }

  PathResult path;
  std::optional<ScalarField> warm;
  std::size_t idx = 0;
  int refinements = 0;
  double eps_prev = eps_schedule.front();
  const ScalarField det_omega = determinant_field(omega);
  while (idx < eps_schedule.size()) {
    const double eps = eps_schedule[idx];
    const HermitianField metric = theta + omega * eps;
    // The equation keeps omega^n as its reference volume; fold the
    // determinant ratio into the density before delegating to the
    // metric-normalized solve.
    const ScalarField det_metric = determinant_field(metric);
    std::vector<double> fv(f_density.size());
    for (std::size_t i = 0; i < fv.size(); ++i)
      fv[i] = f_density[i] * det_omega[i] / det_metric[i];
    bool ok = true;
    MASolution sol;
    try {
      sol = solve_calabi(metric, ScalarField(theta.grid_ptr(), std::move(fv)), p_exponent,
                         opts, warm);
    } catch (const Error&) {
      ok = false;
    }
    if (ok) {
      warm = sol.phi;
      eps_prev = eps;
      path.schedule.push_back(eps);
      path.constants_trace.push_back(sol.c);
      path.solutions.push_back(std::move(sol));
      ++idx;
    } else {
      if (++refinements > 10) {
        path.completed = false;
        path.failure = "degenerate path stalled after 10 eps refinements";
        return path;
      }
      path.refined = true;
      eps_schedule.insert(eps_schedule.begin() + static_cast<std::ptrdiff_t>(idx),
                          std::sqrt(eps_prev * eps));
    }
  }
  return path;
}

PathResult solve_singular(const HermitianField& omega, const KltDensitySpec& spec,
                          std::vector<double> delta_schedule, double p_exponent,
                          const SolverOptions& opts) {
  const GridPtr grid = omega.grid_ptr();
  const int n = grid->n();
  if (!(p_exponent > 1.0))
    fail(ErrorCode::unsupported_spec, "solve_singular needs an L^p exponent > 1");
  for (double a : spec.exponents) {
    if (!(a > -1.0)) fail(ErrorCode::klt_violation, "klt exponents must exceed -1");
    // Integrability of |z|^{2 a p} near a point in C^n requires a p > -n.
    if (a < 0.0 && !(a * p_exponent > -static_cast<double>(n)))
      fail(ErrorCode::klt_violation,
           "density is not L^p for the requested exponent (need p < n/|a|)");
  }
  if (delta_schedule.empty()) fail(ErrorCode::unsupported_spec, "empty delta schedule");

  PathResult path;
  std::optional<ScalarField> warm;
  for (double delta : delta_schedule) {
    KltDensitySpec step = spec;
    step.mollification = delta;
    const ScalarField f = klt_density(grid, step);
    (void)lp_norm(f, omega, p_exponent);
    MASolution sol = solve_calabi(omega, f, p_exponent, opts, warm);
    warm = sol.phi;
    path.schedule.push_back(delta);
    path.constants_trace.push_back(sol.c);
    path.solutions.push_back(std::move(sol));
  }
  return path;
}

std::vector<double> default_t_schedule(int steps) {
  std::vector<double> t;
  for (int i = 0; i <= steps; ++i) t.push_back(static_cast<double>(i) / steps);
  return t;
}

std::vector<int> default_lambda_path_schedule() { return {4, 8, 16, 32}; }

std::vector<double> default_eps_schedule() {
  std::vector<double> eps;
  for (int j = 1; j <= 6; ++j) eps.push_back(std::pow(2.0, -j));
  return eps;
}

std::vector<double> default_delta_schedule(double h) { return {4.0 * h, 2.0 * h, h}; }

}  // namespace cyma
