#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cyma/calculus.hpp"
#include "cyma/errors.hpp"
#include "cyma/ma.hpp"
#include "cyma/metric.hpp"
#include "cyma/random.hpp"

using namespace cyma;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

ScalarField axis_cos(GridPtr grid, int axis, double amp) {
  std::vector<double> v(grid->point_count());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = amp * std::cos(kTwoPi * grid->coordinate(i, axis));
  return ScalarField(std::move(grid), std::move(v));
}

ScalarField axis_sin(GridPtr grid, int axis, double amp) {
  std::vector<double> v(grid->point_count());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = amp * std::sin(kTwoPi * grid->coordinate(i, axis));
  return ScalarField(std::move(grid), std::move(v));
}
}  // namespace

TEST_CASE("ma_density basics") {
  auto g = TorusGrid::make(1, 64);
  const HermitianField omega = HermitianField::identity(g);
  SUBCASE("phi = 0 gives the unit ratio") {
    const DensityRatio r = ma_density(omega, ScalarField::constant(g, 0.0));
    CHECK(r.values.min() == doctest::Approx(1.0));
    CHECK(r.values.max() == doctest::Approx(1.0));
    CHECK(r.positivity_margin == doctest::Approx(1.0));
  }
  SUBCASE("small cosine has the closed-form ratio at x = 0") {
    const DensityRatio r = ma_density(omega, axis_cos(g, 0, 0.01));
    CHECK(r.values[0] == doctest::Approx(1.0 - 0.02 * kPi * kPi).epsilon(1e-10));
  }
  SUBCASE("negative densities are reported, not clamped") {
    const DensityRatio r = ma_density(omega, axis_cos(g, 0, 0.2));
    CHECK(r.values.min() < 0.0);
    CHECK(r.positivity_margin < 0.0);
  }
}

TEST_CASE("linearized_ma") {
  auto g = TorusGrid::make(1, 64);
  const HermitianField omega = HermitianField::identity(g);
  SUBCASE("annihilates constants") {
    const ScalarField out = linearized_ma(omega, ScalarField::constant(g, 0.0),
                                          ScalarField::constant(g, 3.7));
    CHECK(out.sup_abs() < 1e-12);
  }
  SUBCASE("reduces to the ddc coefficient at phi = 0") {
    const ScalarField out =
        linearized_ma(omega, ScalarField::constant(g, 0.0), axis_cos(g, 0, 1.0));
    const ScalarField expected = axis_cos(g, 0, -2.0 * kPi * kPi);
    CHECK((out - expected).sup_abs() < 1e-10);
  }
  SUBCASE("rejects degenerate base points") {
    // 0.2 cos makes omega + ddc(phi) lose positivity.
    CHECK_THROWS_AS(
        (void)linearized_ma(omega, axis_cos(g, 0, 0.2), axis_cos(g, 0, 1.0)), Error);
  }
}

TEST_CASE("Jacobian consistency against central differences") {
  FieldSampler sampler(2024);
  auto check_on = [&](GridPtr g) {
    const HermitianField omega = HermitianField::identity(g);
    for (int t = 0; t < 10; ++t) {
      const ScalarField phi = sampler.admissible_potential(omega, g->res() / 4, 0.5);
      const ScalarField chi = sampler.band_limited(g, g->res() / 4, 1.0);
      const ScalarField lin = linearized_ma(omega, phi, chi);
      const double s = 1e-5;
      const DensityRatio up = ma_density(omega, phi + chi * s);
      const DensityRatio dn = ma_density(omega, phi + chi * (-s));
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < lin.size(); ++i) {
        const double fd = (std::log(up.values[i]) - std::log(dn.values[i])) / (2.0 * s);
        num = std::max(num, std::abs(fd - lin[i]));
        den = std::max(den, std::abs(lin[i]));
      }
      CHECK(num / den < 1e-6);
    }
  };
  check_on(TorusGrid::make(1, 64));
  check_on(TorusGrid::make(2, 16));
}

TEST_CASE("mass") {
  SUBCASE("flat Kaehler mass is invariant (n = 1, res 64)") {
    auto g = TorusGrid::make(1, 64);
    const HermitianField omega = HermitianField::identity(g);
    FieldSampler sampler(31);
    const double base = mass(omega, ScalarField::constant(g, 0.0));
    CHECK(base == doctest::Approx(1.0).epsilon(1e-14));
    for (int t = 0; t < 20; ++t) {
      const ScalarField phi = sampler.admissible_potential(omega, 16, 0.8);
      CHECK(std::abs(mass(omega, phi) - base) < 1e-9);
    }
  }
  SUBCASE("flat Kaehler mass is invariant (n = 2, res 16)") {
    auto g = TorusGrid::make(2, 16);
    const HermitianField omega = HermitianField::identity(g);
    FieldSampler sampler(32);
    const double base = mass(omega, ScalarField::constant(g, 0.0));
    const ScalarField named = axis_sin(g, 0, 0.02);  // 0.02 sin(2 pi x1)
    CHECK(std::abs(mass(omega, named) - base) < 1e-10);
    for (int t = 0; t < 20; ++t) {
      const ScalarField phi = sampler.admissible_potential(omega, 4, 0.8);
      CHECK(std::abs(mass(omega, phi) - base) < 1e-7);
    }
  }
  SUBCASE("non-Kaehler mass moves under the cosine witness") {
    auto g = TorusGrid::make(2, 16);
    const HermitianField omega = build_metric(g, MetricSpec::nonkahler(0.1));
    const double base = mass(omega, ScalarField::constant(g, 0.0));
    // cos(2 pi x2) pairs with the metric modulation; the analytic change is
    // -0.001 pi^2.
    const double moved = mass(omega, axis_cos(g, 2, 0.01));
    CHECK(std::abs(moved - base) > 1e-7);
    CHECK(moved - base == doctest::Approx(-0.001 * kPi * kPi).epsilon(1e-9));
    // The sine mode of the same frequency is phase-orthogonal to the
    // modulation and cannot move the mass.
    const double sine_moved = mass(omega, axis_sin(g, 2, 0.01));
    CHECK(std::abs(sine_moved - base) < 1e-13);
  }
}

TEST_CASE("gauduchon factor") {
  SUBCASE("n = 1 returns the constant 1") {
    auto g = TorusGrid::make(1, 64);
    const ScalarField h = gauduchon_factor(HermitianField::identity(g));
    CHECK((h + (-1.0)).sup_abs() == 0.0);
  }
  SUBCASE("flat n = 2 returns the constant 1") {
    auto g = TorusGrid::make(2, 16);
    const ScalarField h = gauduchon_factor(HermitianField::identity(g));
    CHECK((h + (-1.0)).sup_abs() < 1e-12);
  }
  SUBCASE("closed form for the eps = 0.1 metric") {
    auto g = TorusGrid::make(2, 16);
    const HermitianField omega = build_metric(g, MetricSpec::nonkahler(0.1));
    const ScalarField h = gauduchon_factor(omega);
    CHECK(h.mean() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(h.min() > 0.0);
    const double norm = 1.0 / std::sqrt(1.0 - 0.01);
    CHECK(norm == doctest::Approx(1.0050378).epsilon(1e-7));
    double worst = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const double x2 = g->coordinate(i, 2);
      const double expected = (1.0 / (1.0 + 0.1 * std::cos(kTwoPi * x2))) / norm;
      worst = std::max(worst, std::abs(h[i] - expected));
    }
    CHECK(worst < 1e-6);
    CHECK(h[0] == doctest::Approx(0.904534).epsilon(1e-6));
    // Residual gate from the operation contract.
    CHECK(ddc_form_scalar(omega.scaled_by(h)).sup_abs() < 1e-9);
  }
  SUBCASE("idempotence on the Gauduchon representative") {
    auto g = TorusGrid::make(2, 16);
    const HermitianField omega = build_metric(g, MetricSpec::nonkahler(0.1));
    const HermitianField gaud = omega.scaled_by(gauduchon_factor(omega));
    const ScalarField again = gauduchon_factor(gaud);
    CHECK((again + (-1.0)).sup_abs() < 1e-9);
  }
}

TEST_CASE("mixed AM-GM defect") {
  auto g = TorusGrid::make(2, 16);
  const HermitianField omega = HermitianField::identity(g);
  SUBCASE("equality for identical and conformal pairs") {
    CHECK(std::abs(mixed_amgm_defect(omega, omega)) < 1e-12);
    CHECK(std::abs(mixed_amgm_defect(omega * 2.0, omega)) < 1e-12);
  }
  SUBCASE("diag(4, 1) against flat has slack 1") {
    const complex_t block[4] = {complex_t(4.0, 0.0), complex_t(0.0, 0.0),
                                complex_t(0.0, 0.0), complex_t(1.0, 0.0)};
    const HermitianField a = HermitianField::constant(g, block);
    CHECK(mixed_amgm_defect(a, omega) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("random positive pairs are never negative beyond round-off") {
    FieldSampler sampler(77);
    for (int t = 0; t < 10; ++t) {
      const HermitianField a = omega + ddc(sampler.admissible_potential(omega, 4, 0.7));
      const HermitianField b = omega + ddc(sampler.admissible_potential(omega, 4, 0.7));
      CHECK(mixed_amgm_defect(a, b) >= -1e-9);
    }
  }
}

TEST_CASE("trace diagnostics satisfy the pointwise AM-GM bound") {
  auto g = TorusGrid::make(2, 16);
  const HermitianField omega = HermitianField::identity(g);
  FieldSampler sampler(99);
  const ScalarField phi = sampler.admissible_potential(omega, 4, 0.7);
  const HermitianField tilde = omega + ddc(phi);
  const TraceDiagnostics td = trace_diagnostics(omega, tilde);
  const DensityRatio r = ma_density(omega, phi);
  REQUIRE(r.positivity_margin > 0.0);
  for (std::size_t i = 0; i < td.tr_omega_tilde.size(); ++i) {
    const double geo = 2.0 * std::sqrt(std::max(r.values[i], 0.0));
    CHECK(td.tr_omega_tilde[i] >= geo - 1e-9);
  }
  CHECK(td.max_laplacian == doctest::Approx(td.tr_omega_tilde.max() - 2.0));
}
