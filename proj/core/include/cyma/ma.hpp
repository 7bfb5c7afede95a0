#pragma once

#include "cyma/field.hpp"

namespace cyma {

/// Pointwise Monge-Ampere density (omega + ddc phi)^n / omega^n together with
/// the positivity margin of the perturbed form.
struct DensityRatio {
  ScalarField values;
  /// min over the grid of the smallest eigenvalue of omega + ddc(phi).
  double positivity_margin = 0.0;
};

/// det(g + H phi)/det(g) per point; negative values are reported, not clamped.
DensityRatio ma_density(const HermitianField& omega, const ScalarField& phi);

/// Same ratio evaluated against a precomputed Hessian (avoids re-deriving phi).
DensityRatio ma_density_from_hessian(const HermitianField& omega,
                                     const HermitianField& hessian);

/// Chern Laplacian of chi with respect to omega + ddc(phi):
/// tr((g + H phi)^{-1} H chi). Linear in chi, annihilates constants; the
/// Frechet derivative of log ma_density at phi. Requires a strictly positive
/// perturbed form (margin > 1e-12).
ScalarField linearized_ma(const HermitianField& omega, const ScalarField& phi,
                          const ScalarField& chi);

/// Total Monge-Ampere mass of (omega + ddc phi)^n in the det-quadrature
/// normalization used by integrate().
double mass(const HermitianField& omega, const ScalarField& phi);

/// Positive conformal factor h with ddc((h omega)^{n-1}) = 0, normalized to
/// mean 1. In n=1 every metric qualifies and h == 1 is returned; in n=2 the
/// factor is found as the kernel of the linear map h -> scalar(ddc(h omega))
/// by a projected conjugate-gradient least-squares solve.
ScalarField gauduchon_factor(const HermitianField& omega);

/// Minimum over the grid of tr_{omega_g}(omega_tilde) - n (omega_tilde^n /
/// omega_g^n)^{1/n}. Nonnegative (up to round-off) for positive pairs by the
/// matrix arithmetic/geometric mean inequality; zero iff conformal.
double mixed_amgm_defect(const HermitianField& omega_tilde, const HermitianField& omega_g);

/// Trace quantities of omega_tilde against omega.
struct TraceDiagnostics {
  ScalarField tr_omega_tilde;  // tr_omega(omega_tilde)
  ScalarField tr_tilde_omega;  // tr_omega_tilde(omega)
  double max_laplacian = 0.0;  // sup(tr_omega(omega_tilde) - n)
};

TraceDiagnostics trace_diagnostics(const HermitianField& omega,
                                   const HermitianField& omega_tilde);

}  // namespace cyma
