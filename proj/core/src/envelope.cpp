#include "cyma/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cyma/calculus.hpp"
#include "cyma/errors.hpp"

namespace cyma {

std::vector<double> default_lambda_schedule() {
  std::vector<double> s;
  for (int k = 0; k <= 10; ++k) s.push_back(10.0 * std::pow(2.0, k));
  return s;
}

EnvelopeResult envelope_penalized(const HermitianField& omega, const ScalarField& g,
                                  std::vector<double> lambda_schedule,
                                  const EnvelopeOptions& opts) {
  require_same_grid(omega.grid(), g.grid(), "envelope_penalized");
  if (lambda_schedule.empty() || lambda_schedule.front() < 1.0)
    fail(ErrorCode::unsupported_spec, "lambda schedule must start at lambda >= 1");
  for (std::size_t i = 1; i < lambda_schedule.size(); ++i)
    if (!(lambda_schedule[i] > lambda_schedule[i - 1]))
      fail(ErrorCode::unsupported_spec, "lambda schedule must increase");

  const GridPtr grid = omega.grid_ptr();
  const int n = grid->n();

  // Upper-barrier constant: sup of the log density ratio of omega + ddc g,
  // clipped at zero (the ratio may be negative where g is far from psh).
  const DensityRatio g_ratio = ma_density(omega, g);
  const double max_ratio = g_ratio.values.max();
  const double upper_c = max_ratio > 0.0 ? std::max(0.0, std::log(max_ratio)) : 0.0;

  EnvelopeResult result;
  result.upper_constant = upper_c;
  result.eps_contact = opts.eps_contact > 0.0 ? opts.eps_contact : 1e-3 * g.osc();

  ScalarField phi = ScalarField::constant(grid, 0.0);
  // A zero start is only admissible when omega itself is positive; callers
  // pass positive reference metrics here.
  //
  // Large penalization parameters drive the off-contact density to
  // exp(-lambda * gap), far below arithmetic resolution; the solver runs with
  // a saturated residual and a small positivity slack there, and a tighter
  // Krylov forcing term to keep steps accurate near the thin positive cone.
  SolverOptions inner = opts.solver;
  inner.saturation_log = std::log(1e-12);
  inner.positivity_floor = 1e-10;
  inner.krylov_rel_tol = std::min(inner.krylov_rel_tol, 1e-6);
  inner.krylov_max_iter = std::max(inner.krylov_max_iter, 800);
  for (double lambda : lambda_schedule) {
    EnvelopeStep step;
    step.lambda = lambda;
    MAProblem problem{omega, lambda, g * (-lambda), Normalization::none,
                      inner.tol, inner.max_newton};
    MASolution sol;
    try {
      sol = newton_solve(problem, phi, inner);
    } catch (const Error& e) {
      result.completed = false;
      result.failure = e.what();
      break;
    }
    step.sup_distance_to_previous = (sol.phi - phi).sup_abs();
    step.residual = sol.residual;
    step.newton_iterations = sol.iterations;
    step.max_trace = sol.diagnostics.max_laplacian + n;
    step.orthogonality_defect = orthogonality_defect(omega, sol.phi, g, result.eps_contact);
    phi = sol.phi;
    result.lambda_trace.push_back(step);
    result.iterates.push_back(sol.phi);
  }
  if (result.iterates.empty())
    fail(ErrorCode::iteration_limit, "penalization failed at the first lambda");

  result.P = result.iterates.back();

  // Two-sided certificates against the final iterate.
  const double inf_g = g.min();
  for (std::size_t k = 0; k < result.lambda_trace.size(); ++k) {
    EnvelopeStep& step = result.lambda_trace[k];
    const ScalarField& ph = result.iterates[k];
    const double lam = step.lambda;
    double lower_violation = -std::numeric_limits<double>::infinity();
    double upper_violation = -std::numeric_limits<double>::infinity();
    const double shift = inf_g / lam - n * std::log(lam) / lam;
    const double scale = 1.0 - 1.0 / lam;
    for (std::size_t i = 0; i < ph.size(); ++i) {
      lower_violation = std::max(lower_violation, scale * result.P[i] + shift - ph[i]);
      upper_violation = std::max(upper_violation, ph[i] - result.P[i] - upper_c / lam);
    }
    step.lower_violation = lower_violation;
    step.upper_violation = upper_violation;
  }

  std::vector<double> mask(grid->point_count());
  for (std::size_t i = 0; i < mask.size(); ++i)
    mask[i] = (result.P[i] >= g[i] - result.eps_contact) ? 1.0 : 0.0;
  result.contact_mask = ScalarField(grid, std::move(mask));
  result.orthogonality_defect =
      orthogonality_defect(omega, result.P, g, result.eps_contact);
  return result;
}

double orthogonality_defect(const HermitianField& omega, const ScalarField& P,
                            const ScalarField& g, double eps_contact) {
  require_same_grid(omega.grid(), P.grid(), "orthogonality_defect");
  require_same_grid(omega.grid(), g.grid(), "orthogonality_defect");
  const int n = omega.grid().n();
  const HermitianField perturbed = omega + ddc(P);
  double acc = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (P[i] < g[i] - eps_contact)
      acc += std::max(linalg::det(perturbed.block(i), n), 0.0);
  }
  return acc * omega.grid().cell_volume();
}

namespace {

// Dense 2D helpers for the finite-difference oracle; layout idx = x*res + y.
struct ObstacleGrid {
  int res;
  double h2;  // grid spacing squared
  std::vector<double> g;
  std::vector<double> u;

  int idx(int x, int y) const { return x * res + y; }
  int xm(int x) const { return x == 0 ? res - 1 : x - 1; }
  int xp(int x) const { return x == res - 1 ? 0 : x + 1; }

  double laplacian(int x, int y) const {
    const double c = u[static_cast<size_t>(idx(x, y))];
    const double s = u[static_cast<size_t>(idx(xm(x), y))] +
                     u[static_cast<size_t>(idx(xp(x), y))] +
                     u[static_cast<size_t>(idx(x, xm(y)))] +
                     u[static_cast<size_t>(idx(x, xp(y)))];
    return (s - 4.0 * c) / h2;
  }

  // One red-black projected sweep; returns the max update magnitude.
  double pgs_sweep() {
    double moved = 0.0;
    for (int color = 0; color < 2; ++color) {
      for (int x = 0; x < res; ++x) {
        for (int y = (x + color) % 2; y < res; y += 2) {
          const double nbr = u[static_cast<size_t>(idx(xm(x), y))] +
                             u[static_cast<size_t>(idx(xp(x), y))] +
                             u[static_cast<size_t>(idx(x, xm(y)))] +
                             u[static_cast<size_t>(idx(x, xp(y)))];
          const double target = 0.25 * (nbr + 2.0 * h2);
          const double next = std::min(g[static_cast<size_t>(idx(x, y))], target);
          moved = std::max(moved, std::abs(next - u[static_cast<size_t>(idx(x, y))]));
          u[static_cast<size_t>(idx(x, y))] = next;
        }
      }
    }
    return moved;
  }

  bool complementarity_ok(double contact_tol, double pde_tol) const {
    for (int x = 0; x < res; ++x)
      for (int y = 0; y < res; ++y) {
        const double gap = g[static_cast<size_t>(idx(x, y))] - u[static_cast<size_t>(idx(x, y))];
        const double pde = laplacian(x, y) + 2.0;
        const bool contact = gap <= contact_tol && pde >= -pde_tol;
        const bool interior = std::abs(pde) <= pde_tol;
        if (!contact && !interior) return false;
      }
    return true;
  }

  // Conjugate gradients for -Delta_h u = 2 on the inactive set (active nodes
  // frozen at their current values). Sharpens the interior equation far
  // beyond what plain sweeping reaches in reasonable time.
  void active_set_solve(const std::vector<char>& active, double pde_tol, int max_iter) {
    const std::size_t npts = u.size();
    std::vector<double> r(npts, 0.0), p(npts, 0.0), ap(npts, 0.0);
    auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
      for (int x = 0; x < res; ++x)
        for (int y = 0; y < res; ++y) {
          const std::size_t i = static_cast<size_t>(idx(x, y));
          if (active[i]) {
            out[i] = 0.0;
            continue;
          }
          const double s = v[static_cast<size_t>(idx(xm(x), y))] +
                           v[static_cast<size_t>(idx(xp(x), y))] +
                           v[static_cast<size_t>(idx(x, xm(y)))] +
                           v[static_cast<size_t>(idx(x, xp(y)))];
          out[i] = -(s - 4.0 * v[i]) / h2;
        }
    };
    // Residual of -Delta u = 2 on the inactive set.
    for (int x = 0; x < res; ++x)
      for (int y = 0; y < res; ++y) {
        const std::size_t i = static_cast<size_t>(idx(x, y));
        r[i] = active[i] ? 0.0 : 2.0 + laplacian(x, y);
      }
    p = r;
    double rr = 0.0;
    for (double v : r) rr += v * v;
    std::vector<double> e(npts, 0.0);
    for (int it = 0; it < max_iter && rr > 0.0; ++it) {
      apply(p, ap);
      double pap = 0.0;
      for (std::size_t i = 0; i < npts; ++i) pap += p[i] * ap[i];
      if (!(pap > 0.0)) break;
      const double alpha = rr / pap;
      double rmax = 0.0;
      for (std::size_t i = 0; i < npts; ++i) {
        e[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
        rmax = std::max(rmax, std::abs(r[i]));
      }
      if (rmax <= 0.05 * pde_tol) break;
      double rr_new = 0.0;
      for (double v : r) rr_new += v * v;
      const double beta = rr_new / rr;
      rr = rr_new;
      for (std::size_t i = 0; i < npts; ++i) p[i] = r[i] + beta * p[i];
    }
    for (std::size_t i = 0; i < npts; ++i)
      if (!active[i]) u[i] += e[i];
  }
};

void solve_obstacle_level(ObstacleGrid& og, const ObstacleOptions& opts, long& sweeps_used) {
  const std::size_t npts = og.u.size();
  std::vector<char> active(npts, 0);
  const int policy_rounds = 60;
  for (int round = 0; round < policy_rounds; ++round) {
    // Smoothing phase: localized projected sweeps settle the free boundary.
    const int smooth = round == 0 ? 80 : 12;
    for (int s = 0; s < smooth; ++s) {
      ++sweeps_used;
      if (sweeps_used > opts.max_sweeps)
        fail(ErrorCode::iteration_limit, "projected iteration stalled (sweep budget)");
      og.pgs_sweep();
    }
    if (og.complementarity_ok(opts.contact_tol, opts.pde_tol)) return;

    // Projected sweeps leave exact equality on contact nodes.
    for (std::size_t i = 0; i < npts; ++i)
      active[i] = (og.g[i] - og.u[i] <= opts.contact_tol) ? 1 : 0;
    bool any_active = false;
    for (char a : active) any_active |= a;
    if (any_active) {
      og.active_set_solve(active, opts.pde_tol, 40000);
      // Clip interior overshoots; they become contact candidates next round.
      for (std::size_t i = 0; i < npts; ++i) og.u[i] = std::min(og.u[i], og.g[i]);
    }
    if (og.complementarity_ok(opts.contact_tol, opts.pde_tol)) return;
  }
  fail(ErrorCode::iteration_limit, "projected iteration stalled (policy rounds)");
}

}  // namespace

ScalarField envelope_obstacle_oracle(const HermitianField& omega_flat, const ScalarField& g,
                                     const ObstacleOptions& opts) {
  const GridPtr grid = g.grid_ptr();
  if (grid->n() != 1)
    fail(ErrorCode::unsupported_spec, "the obstacle oracle is defined for n = 1");
  require_same_grid(omega_flat.grid(), *grid, "envelope_obstacle_oracle");
  for (std::size_t i = 0; i < grid->point_count(); ++i)
    if (std::abs(omega_flat.block(i)[0] - complex_t(1.0, 0.0)) > 1e-12)
      fail(ErrorCode::unsupported_spec, "the obstacle oracle needs the flat metric");
  if (std::abs(grid->period(0) - grid->period(1)) > 1e-15)
    fail(ErrorCode::unsupported_spec, "the obstacle oracle needs equal periods");

  const int res = grid->res();
  long sweeps_used = 0;

  // Coarse-to-fine cascade: each level is solved by the same projected
  // scheme, then prolonged bilinearly as the next warm start.
  std::vector<int> levels;
  for (int r = std::min(32, res); r < res; r *= 2) levels.push_back(r);
  levels.push_back(res);

  std::vector<double> u_prev;
  int res_prev = 0;
  for (int r : levels) {
    ObstacleGrid og;
    og.res = r;
    const double h = grid->period(0) / r;
    og.h2 = h * h;
    og.g.resize(static_cast<size_t>(r) * r);
    const int stride = res / r;
    for (int x = 0; x < r; ++x)
      for (int y = 0; y < r; ++y)
        og.g[static_cast<size_t>(og.idx(x, y))] =
            g[static_cast<size_t>(x) * stride * res + static_cast<size_t>(y) * stride];
    if (u_prev.empty()) {
      og.u = og.g;
    } else {
      // Periodic bilinear prolongation from the previous level.
      og.u.resize(og.g.size());
      const int rp = res_prev;
      for (int x = 0; x < r; ++x)
        for (int y = 0; y < r; ++y) {
          const double fx = static_cast<double>(x) * rp / r;
          const double fy = static_cast<double>(y) * rp / r;
          const int x0 = static_cast<int>(fx) % rp, y0 = static_cast<int>(fy) % rp;
          const int x1 = (x0 + 1) % rp, y1 = (y0 + 1) % rp;
          const double ax = fx - std::floor(fx), ay = fy - std::floor(fy);
          const double v =
              (1 - ax) * (1 - ay) * u_prev[static_cast<size_t>(x0) * rp + y0] +
              ax * (1 - ay) * u_prev[static_cast<size_t>(x1) * rp + y0] +
              (1 - ax) * ay * u_prev[static_cast<size_t>(x0) * rp + y1] +
              ax * ay * u_prev[static_cast<size_t>(x1) * rp + y1];
          og.u[static_cast<size_t>(og.idx(x, y))] =
              std::min(v, og.g[static_cast<size_t>(og.idx(x, y))]);
        }
    }
    solve_obstacle_level(og, opts, sweeps_used);
    u_prev = std::move(og.u);
    res_prev = r;
  }
  return ScalarField(grid, std::move(u_prev));
}

}  // namespace cyma
