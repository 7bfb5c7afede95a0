#pragma once

#include "cyma/field.hpp"

namespace cyma {

/// Complex Hessian form ddc(phi) = 2i d dbar phi, computed spectrally.
/// Entry (j,k) of the coefficient matrix is 2 d^2 phi / dz_j dzbar_k; exact
/// for trigonometric polynomials below the Nyquist frequency.
HermitianField ddc(const ScalarField& phi);

/// Sup-norm of the top-degree scalar of ddc(omega) (n=2; identically zero in
/// n=1, where every (1,1)-form is top degree). Zero iff the discrete form is
/// ddc-closed; for n=2 the companion form ddc(omega^2) is top-degree-exceeding
/// and vanishes identically, so this single scalar decides the condition.
double closedness_defect(const HermitianField& omega);

/// The scalar s with ddc(eta) = s * (positive constant) * dV for n=2 forms:
/// s = d2/dz2 dzbar2 eta_11 + d2/dz1 dzbar1 eta_22 - 2 Re d2/dz2 dzbar1 eta_12.
/// Returns the zero field for n=1.
ScalarField ddc_form_scalar(const HermitianField& eta);

/// Periodic quadrature of s against the volume det(vol): cell_volume * sum
/// s_i det(vol_i). Exact for trigonometric polynomials below Nyquist.
double integrate(const ScalarField& s, const HermitianField& vol);

/// Total volume integrate(1, vol).
double total_volume(const HermitianField& vol);

/// Pointwise smallest eigenvalue of the coefficient matrices.
ScalarField min_eigenvalue_field(const HermitianField& a);

/// Pointwise determinant (real for Hermitian blocks).
ScalarField determinant_field(const HermitianField& a);

/// Fraction of spectral energy carried by modes whose max axis frequency
/// exceeds res/3 (zero mode excluded from the total). Converged solutions
/// are expected to keep this below 1e-6.
double spectral_tail(const ScalarField& phi);

namespace linalg {
/// det of an n x n Hermitian block, n <= 2 (closed form).
double det(std::span<const complex_t> a, int n);
/// trace(inv(a) * b) for Hermitian blocks, n <= 2; throws singular_matrix
/// when det(a) vanishes.
double trace_of_inverse_product(std::span<const complex_t> a,
                                std::span<const complex_t> b, int n);
/// Smallest eigenvalue of a Hermitian block, n <= 2.
double min_eigenvalue(std::span<const complex_t> a, int n);
}  // namespace linalg

}  // namespace cyma
