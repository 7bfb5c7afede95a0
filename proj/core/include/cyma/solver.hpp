#pragma once

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cyma/field.hpp"
#include "cyma/ma.hpp"

namespace cyma {

/// Singular density of log-terminal type: a product of mollified point
/// factors (q(z - p_i) + delta^2)^{a_i} with a_i > -1, q the smooth periodic
/// squared distance sum_axis sin^2(pi t)/pi^2, times exp(smooth_factor).
struct KltDensitySpec {
  /// Singular locations, one per point, in torus coordinates (size 2n each).
  std::vector<std::vector<double>> points;
  /// Exponents a_i, each > -1.
  std::vector<double> exponents;
  std::optional<ScalarField> smooth_factor;
  /// Mollification parameter delta >= 0.
  double mollification = 0.0;
};

/// Evaluates the mollified klt density on the grid.
ScalarField klt_density(GridPtr grid, const KltDensitySpec& spec);

/// Discrete L^p norm (det(omega) quadrature) used for the integrability check.
double lp_norm(const ScalarField& f, const HermitianField& omega, double p);

enum class Normalization { none, sup_zero };

/// One Monge-Ampere equation instance
///   (omega + ddc phi)^n = c e^{lambda phi + f} omega^n.
/// For lambda > 0 the constant is c = 1; for lambda = 0 the pair (phi, c) is
/// solved jointly under sup phi = 0.
struct MAProblem {
  HermitianField metric;
  double lambda = 1.0;
  /// log-density exponent f (smooth case) or a singular spec.
  std::variant<ScalarField, KltDensitySpec> density;
  Normalization normalization = Normalization::none;
  double tol = 1e-9;
  int max_newton = 50;
};

/// Tuning knobs shared by the solve drivers.
struct SolverOptions {
  double tol = 1e-9;
  int max_newton = 50;
  double krylov_rel_tol = 1e-3;  // inexact Newton inner tolerance
  int krylov_max_iter = 400;
  int max_step_halvings = 30;
  bool collect_diagnostics = true;
  /// Residual saturation for exponentially degenerate right-hand sides
  /// (large-lambda penalization): at points where both log(density ratio)
  /// and the exponent lambda phi + f sit below this value, the pointwise
  /// equation compares numbers beneath arithmetic resolution and counts as
  /// satisfied; the positivity corridor is still enforced through
  /// `positivity_floor`. Disabled (-inf) for ordinary solves.
  double saturation_log = -std::numeric_limits<double>::infinity();
  /// Iterates must keep min eig(omega + ddc phi) > -positivity_floor.
  double positivity_floor = 0.0;
};

struct SolutionDiagnostics {
  double osc_phi = 0.0;
  double mass = 0.0;
  double max_laplacian = 0.0;  // sup(tr_omega(omega_tilde) - n)
  double spectral_tail = 0.0;
};

struct MASolution {
  ScalarField phi;
  double c = 1.0;        // multiplicative constant (1 unless lambda = 0)
  double b = 0.0;        // log c
  double residual = 0.0; // sup |log density - lambda phi - f - log c|
  int iterations = 0;
  double positivity_margin = 0.0;
  SolutionDiagnostics diagnostics;
};

struct PathResult {
  std::vector<double> schedule;          // accepted parameter values
  std::vector<MASolution> solutions;     // one per accepted step
  std::vector<double> constants_trace;   // c (or b) per step
  bool refined = false;                  // schedule grew via bisection
  bool completed = true;                 // false when aborted with a partial path
  std::string failure;                   // reason when not completed
};

/// Damped Newton iteration on the log residual for lambda > 0. Every iterate
/// is kept strictly inside the positive cone: the step is halved until the
/// perturbed form stays positive and the residual decreases.
MASolution newton_solve(const MAProblem& problem, const ScalarField& init,
                        const SolverOptions& opts = {});
MASolution newton_solve(const MAProblem& problem, const SolverOptions& opts = {});

/// Homotopy (omega + ddc phi_t)^n = e^{phi_t + t f} omega^n along a monotone
/// t-schedule from 0 to 1, warm-starting every step. Failed steps trigger
/// bisection of the offending interval (up to 10 refinements).
PathResult continuity_path(const HermitianField& omega, const ScalarField& f,
                           std::vector<double> t_schedule,
                           const SolverOptions& opts = {});

/// lambda = 0 problem (omega + ddc phi)^n = c f omega^n with sup phi = 0 and
/// unknown c > 0, solved by a bordered Newton system (mean-zero gauge during
/// the iteration, sup-normalization on output). `init` warm-starts the
/// iteration; it must keep omega + ddc(init) positive.
MASolution solve_calabi(const HermitianField& omega, const ScalarField& f_density,
                        double p_exponent, const SolverOptions& opts = {},
                        const std::optional<ScalarField>& init = std::nullopt);

/// Validation path for the constant of solve_calabi: solves the lambda_j =
/// 1/j family, reports b_j = sup(phi_j)/j per step; the Richardson
/// extrapolation of b_j is an independent route to log c.
PathResult calabi_lambda_path(const HermitianField& omega, const ScalarField& f_density,
                              const std::vector<int>& j_schedule,
                              const SolverOptions& opts = {});
double richardson_extrapolate(const std::vector<double>& h, const std::vector<double>& v);

/// Degenerate-form path: (theta + eps_j omega + ddc u_j)^n = c_j f omega^n
/// with sup u_j = 0, warm-started along the decreasing eps schedule.
PathResult solve_degenerate(const HermitianField& theta, const HermitianField& omega,
                            const ScalarField& f_density, std::vector<double> eps_schedule,
                            double p_exponent = 2.0, const SolverOptions& opts = {});

/// Singular-density path: solve_calabi against the mollified klt density for
/// each delta in the (decreasing) schedule, warm-started.
PathResult solve_singular(const HermitianField& omega, const KltDensitySpec& spec,
                          std::vector<double> delta_schedule, double p_exponent,
                          const SolverOptions& opts = {});

/// Default schedules.
std::vector<double> default_t_schedule(int steps = 8);
std::vector<int> default_lambda_path_schedule();       // j in {4, 8, 16, 32}
std::vector<double> default_eps_schedule();            // 2^-j, j in 1..6
std::vector<double> default_delta_schedule(double h);  // {4h, 2h, h}

}  // namespace cyma
