#pragma once

#include <string>
#include <vector>

#include "cyma/field.hpp"
#include "cyma/solver.hpp"

namespace cyma {

/// Per-lambda record of a penalization run.
struct EnvelopeStep {
  double lambda = 0.0;
  double sup_distance_to_previous = 0.0;
  double lower_violation = 0.0;  // max(barrier_low - phi_lambda), <= tol when the sandwich holds
  double upper_violation = 0.0;  // max(phi_lambda - barrier_up)
  double max_trace = 0.0;        // sup tr_omega(omega + ddc phi_lambda)
  double orthogonality_defect = 0.0;
  double residual = 0.0;
  int newton_iterations = 0;
};

struct EnvelopeResult {
  ScalarField P;  // approximate envelope (final penalized iterate)
  std::vector<EnvelopeStep> lambda_trace;
  ScalarField contact_mask;  // 1 where P >= g - eps_contact, else 0
  double eps_contact = 0.0;
  double orthogonality_defect = 0.0;
  /// Constant of the upper barrier P + C/lambda:
  /// C = max(0, log sup (omega + ddc g)^n / omega^n).
  double upper_constant = 0.0;
  bool completed = true;  // false when Newton failed mid-schedule
  std::string failure;
  /// All penalized iterates, aligned with lambda_trace.
  std::vector<ScalarField> iterates;
};

struct EnvelopeOptions {
  SolverOptions solver;
  /// Contact threshold; <= 0 requests the default 1e-3 * osc(g).
  double eps_contact = -1.0;
};

/// Penalization approximation of the largest omega-psh function below g:
/// solves (omega + ddc phi)^n = e^{lambda (phi - g)} omega^n along the
/// increasing lambda schedule with warm starts, returning the final iterate
/// together with the two-sided barrier certificates
///   (1 - 1/lambda) P + inf(g)/lambda - n log(lambda)/lambda  <=  phi_lambda
///   phi_lambda  <=  P + C/lambda.
EnvelopeResult envelope_penalized(const HermitianField& omega, const ScalarField& g,
                                  std::vector<double> lambda_schedule,
                                  const EnvelopeOptions& opts = {});

/// Default schedule 10 * 2^k, k = 0..10.
std::vector<double> default_lambda_schedule();

struct ObstacleOptions {
  /// Total red-black sweep budget before declaring a stall.
  long max_sweeps = 1000000;
  /// Pointwise tolerance on the interior equation Delta u = -2.
  double pde_tol = 1e-8;
  /// Pointwise tolerance identifying contact u = g.
  double contact_tol = 1e-10;
};

/// Independent finite-difference oracle for the n = 1 flat-metric envelope:
/// the linear complementarity problem u <= g, Delta_h u >= -2,
/// (Delta_h u + 2)(g - u) = 0 with the 5-point Laplacian, solved by
/// red-black projected Gauss-Seidel with an active-set refinement stage.
/// Shares no code with the spectral pipeline.
ScalarField envelope_obstacle_oracle(const HermitianField& omega_flat, const ScalarField& g,
                                     const ObstacleOptions& opts = {});

/// Monge-Ampere mass of P charged to the off-contact region
/// {P < g - eps_contact}, with the density clamped at zero from below.
/// Vanishes (up to tolerance) for a true envelope.
double orthogonality_defect(const HermitianField& omega, const ScalarField& P,
                            const ScalarField& g, double eps_contact);

}  // namespace cyma
