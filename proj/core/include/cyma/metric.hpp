#pragma once

#include <optional>
#include <string>

#include "cyma/field.hpp"

namespace cyma {

/// Reference-metric families on the model tori.
enum class MetricKind {
  flat,                 // identity coefficients, Kaehler
  hermitian_nonkahler,  // n=2 only: dz1^dzbar1 coefficient modulated in x_2
  degenerate,           // n=1 only: semipositive big form with one zero point
};

struct MetricSpec {
  MetricKind kind = MetricKind::flat;
  /// Modulation strength of the non-Kaehler family, 0 <= epsilon < 1.
  double epsilon = 0.0;
  /// Overall scale of the degenerate family (kept at 1 by default so the
  /// form is exactly amplitude * (1 - cos(2 pi x)) with a single zero).
  double amplitude = 1.0;

  static MetricSpec flat_metric() { return {}; }
  static MetricSpec nonkahler(double epsilon) {
    return {MetricKind::hermitian_nonkahler, epsilon, 1.0};
  }
  static MetricSpec degenerate_big(double amplitude = 1.0) {
    return {MetricKind::degenerate, 0.0, amplitude};
  }

  std::string name() const;
};

/// Concrete coefficient field for a metric spec.
///
/// flat                -> identity everywhere (omega = sum_j i dz_j ^ dzbar_j)
/// hermitian_nonkahler -> diag(1 + eps cos(2 pi x_2), 1); positive, not
///                        ddc-closed, so total Monge-Ampere mass may move.
/// degenerate          -> amplitude (1 - cos(2 pi x)) i dz ^ dzbar; semipositive,
///                        vanishing at x = 0, and equal to
///                        amplitude * (omega + ddc chi) with chi = cos(2 pi x)/(2 pi^2).
HermitianField build_metric(GridPtr grid, const MetricSpec& spec);

/// The potential chi realizing the degenerate family above; the witness
/// rho = -amplitude*chi gives theta + ddc(rho) = amplitude * omega > 0.
ScalarField degenerate_potential(GridPtr grid, double amplitude = 1.0);

}  // namespace cyma
