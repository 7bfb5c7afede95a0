#include "cyma/random.hpp"

#include <cmath>
#include <numbers>

#include "cyma/calculus.hpp"

namespace cyma {

ScalarField FieldSampler::band_limited(GridPtr grid, int max_mode, double amplitude) {
  const int dim = grid->real_dim();
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  // Draw a modest set of random cosine modes; real by construction.
  struct Mode {
    std::vector<int> k;
    double amp;
    double shift;
  };
  std::vector<Mode> modes;
  std::uniform_int_distribution<int> kdist(-max_mode, max_mode);
  const int count = 4 * dim;
  for (int m = 0; m < count; ++m) {
    Mode mode;
    mode.k.resize(static_cast<size_t>(dim));
    int knorm2 = 0;
    bool zero = true;
    for (int a = 0; a < dim; ++a) {
      mode.k[static_cast<size_t>(a)] = kdist(rng_);
      knorm2 += mode.k[static_cast<size_t>(a)] * mode.k[static_cast<size_t>(a)];
      zero &= mode.k[static_cast<size_t>(a)] == 0;
    }
    if (zero) {
      --m;
      continue;
    }
    mode.amp = gauss(rng_) / (1.0 + knorm2);
    mode.shift = phase(rng_);
    modes.push_back(std::move(mode));
  }

  std::vector<double> v(grid->point_count(), 0.0);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double acc = 0.0;
    for (const Mode& mode : modes) {
      double arg = mode.shift;
      for (int a = 0; a < dim; ++a)
        arg += two_pi * mode.k[static_cast<size_t>(a)] * grid->coordinate(i, a) /
               grid->period(a);
      acc += mode.amp * std::cos(arg);
    }
    v[i] = acc;
  }
  ScalarField field(grid, std::move(v));
  const double sup = field.sup_abs();
  if (sup == 0.0) return field;
  return field * (amplitude / sup);
}

ScalarField FieldSampler::admissible_potential(const HermitianField& omega, int max_mode,
                                               double margin) {
  const ScalarField raw = band_limited(omega.grid_ptr(), max_mode, 1.0);
  const double min_eig_omega = min_eigenvalue_field(omega).min();
  const double min_eig_hess = min_eigenvalue_field(ddc(raw)).min();
  // Scale so the Hessian cannot eat more than `margin` of the metric's
  // positivity.
  const double allowed = margin * min_eig_omega;
  const double scale = min_eig_hess < 0.0 ? allowed / (-min_eig_hess) : 1.0;
  return raw * scale;
}

ScalarField FieldSampler::positive_density(GridPtr grid, int max_mode, double variation) {
  const ScalarField raw = band_limited(std::move(grid), max_mode, variation);
  return raw + 1.0;
}

}  // namespace cyma
