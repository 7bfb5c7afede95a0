#include "cyma/metric.hpp"

#include <cmath>
#include <numbers>

#include "cyma/errors.hpp"

namespace cyma {

std::string MetricSpec::name() const {
  switch (kind) {
    case MetricKind::flat:
      return "flat";
    case MetricKind::hermitian_nonkahler:
      return "hermitian_nonkahler";
    case MetricKind::degenerate:
      return "degenerate";
  }
  return "unknown";
}

HermitianField build_metric(GridPtr grid, const MetricSpec& spec) {
  const int n = grid->n();
  const std::size_t npts = grid->point_count();
  const double two_pi = 2.0 * std::numbers::pi;

  switch (spec.kind) {
    case MetricKind::flat:
      return HermitianField::identity(std::move(grid));

    case MetricKind::hermitian_nonkahler: {
      if (n != 2)
        fail(ErrorCode::unsupported_spec, "the non-Kaehler metric family needs n = 2");
      if (!(spec.epsilon >= 0.0) || spec.epsilon >= 1.0)
        fail(ErrorCode::positivity, "non-Kaehler modulation must satisfy 0 <= epsilon < 1");
      std::vector<complex_t> coeffs(npts * 4, complex_t(0.0, 0.0));
      for (std::size_t i = 0; i < npts; ++i) {
        const double x2 = grid->coordinate(i, 2);  // real part of z_2
        const double a = 1.0 + spec.epsilon * std::cos(two_pi * x2 / grid->period(2));
        coeffs[i * 4 + 0] = complex_t(a, 0.0);
        coeffs[i * 4 + 3] = complex_t(1.0, 0.0);
      }
      return HermitianField(std::move(grid), std::move(coeffs), Positivity::positive);
    }

    case MetricKind::degenerate: {
      if (n != 1)
        fail(ErrorCode::unsupported_spec, "the degenerate metric family needs n = 1");
      if (!(spec.amplitude > 0.0))
        fail(ErrorCode::positivity, "degenerate amplitude must be positive");
      std::vector<complex_t> coeffs(npts);
      for (std::size_t i = 0; i < npts; ++i) {
        const double x = grid->coordinate(i, 0);
        coeffs[i] = complex_t(
            spec.amplitude * (1.0 - std::cos(two_pi * x / grid->period(0))), 0.0);
      }
      return HermitianField(std::move(grid), std::move(coeffs), Positivity::semipositive);
    }
  }
  fail(ErrorCode::unsupported_spec, "unknown metric kind");
}

ScalarField degenerate_potential(GridPtr grid, double amplitude) {
  if (grid->n() != 1)
    fail(ErrorCode::unsupported_spec, "the degenerate metric family needs n = 1");
  const double two_pi = 2.0 * std::numbers::pi;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double L = grid->period(0);
  std::vector<double> v(grid->point_count());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = grid->coordinate(i, 0);
    v[i] = amplitude * L * L * std::cos(two_pi * x / L) / (2.0 * pi2);
  }
  return ScalarField(std::move(grid), std::move(v));
}

}  // namespace cyma
