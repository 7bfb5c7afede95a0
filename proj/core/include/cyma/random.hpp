#pragma once

#include <cstdint>
#include <random>

#include "cyma/field.hpp"

namespace cyma {

/// Deterministic band-limited field generator used by property suites.
class FieldSampler {
 public:
  explicit FieldSampler(std::uint64_t seed) : rng_(seed) {}

  /// Real field built from Fourier modes with |k|_inf <= max_mode (zero mode
  /// excluded), Gaussian amplitudes damped by 1/(1+|k|^2), normalized to
  /// sup-norm `amplitude`.
  ScalarField band_limited(GridPtr grid, int max_mode, double amplitude);

  /// Band-limited field rescaled so that omega + ddc(result) keeps its
  /// smallest eigenvalue above (1 - margin); margin in (0, 1).
  ScalarField admissible_potential(const HermitianField& omega, int max_mode, double margin);

  /// Positive density amplitude + band-limited part (min clamped away from 0).
  ScalarField positive_density(GridPtr grid, int max_mode, double variation);

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace cyma
