#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "cyma/calculus.hpp"
#include "cyma/errors.hpp"
#include "cyma/metric.hpp"
#include "cyma/random.hpp"

using namespace cyma;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

ScalarField cos_x(GridPtr grid, int axis, int k, double amp) {
  std::vector<double> v(grid->point_count());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = amp * std::cos(kTwoPi * k * grid->coordinate(i, axis));
  return ScalarField(std::move(grid), std::move(v));
}
}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS((void)TorusGrid::make(3, 64), Error);
  CHECK_THROWS_AS((void)TorusGrid::make(1, 4), Error);
  CHECK_THROWS_AS((void)TorusGrid::make(1, 48), Error);
  auto g = TorusGrid::make(2, 16);
  CHECK(g->point_count() == 65536);
  CHECK(g->real_dim() == 4);
  CHECK(g->cell_volume() == doctest::Approx(1.0 / 65536.0));
}

TEST_CASE("scalar fields reject non-finite values") {
  auto g = TorusGrid::make(1, 8);
  std::vector<double> v(g->point_count(), 0.0);
  v[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ScalarField(g, std::move(v)), Error);
}

TEST_CASE("ddc of a constant vanishes exactly") {
  auto g = TorusGrid::make(1, 64);
  const HermitianField h = ddc(ScalarField::constant(g, 7.0));
  double sup = 0.0;
  for (const complex_t& c : h.coeffs()) sup = std::max(sup, std::abs(c));
  CHECK(sup == 0.0);  // the spectrum is multiplied by exact zeros
}

TEST_CASE("ddc matches the analytic coefficient for cos(2 pi x)") {
  {
    // Exactness below Nyquist at working resolution.
    auto g = TorusGrid::make(1, 64);
    const HermitianField h = ddc(cos_x(g, 0, 1, 1.0));
    CHECK(std::abs(h.block(0)[0].real() - (-2.0 * kPi * kPi)) < 1e-12);
  }
  auto g = TorusGrid::make(1, 256);
  const ScalarField phi = cos_x(g, 0, 1, 1.0);
  const HermitianField h = ddc(phi);
  CHECK(std::abs(h.block(0)[0].real() - (-2.0 * kPi * kPi)) < 1e-10);

  // Independent oracle: central finite differences at h = 1/256.
  const int r = g->res();
  const double dx = g->spacing(0);
  auto at = [&](int x) { return phi[static_cast<size_t>((x + r) % r) * r]; };
  const double fd = 0.5 * (at(1) + at(-1) - 2.0 * at(0)) / (dx * dx);
  CHECK(h.block(0)[0].real() == doctest::Approx(fd).epsilon(2e-4));
}

TEST_CASE("ddc mixed coefficient for sin(2 pi x1) sin(2 pi x2)") {
  auto g = TorusGrid::make(2, 16);
  std::vector<double> v(g->point_count());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::sin(kTwoPi * g->coordinate(i, 0)) * std::sin(kTwoPi * g->coordinate(i, 2));
  const HermitianField h = ddc(ScalarField(g, std::move(v)));
  CHECK(std::abs(h.block(0)[1] - complex_t(2.0 * kPi * kPi, 0.0)) < 1e-10);
  // Hermitian mirror entry.
  CHECK(std::abs(h.block(0)[2] - complex_t(2.0 * kPi * kPi, 0.0)) < 1e-10);
}

TEST_CASE("ddc is linear") {
  auto g = TorusGrid::make(1, 64);
  FieldSampler sampler(7);
  const ScalarField a = sampler.band_limited(g, 2, 0.1);
  const ScalarField b = sampler.band_limited(g, 2, 0.1);
  const HermitianField lhs = ddc(a * 9.0 + b * (-7.5));
  const HermitianField rhs = ddc(a) * 9.0 + ddc(b) * (-7.5);
  double sup = 0.0;
  for (std::size_t i = 0; i < lhs.coeffs().size(); ++i)
    sup = std::max(sup, std::abs(lhs.coeffs()[i] - rhs.coeffs()[i]));
  CHECK(sup < 1e-12);
}

TEST_CASE("trace of ddc integrates to zero") {
  auto g = TorusGrid::make(2, 16);
  FieldSampler sampler(11);
  const HermitianField h = ddc(sampler.band_limited(g, 4, 2.0));
  std::vector<double> tr(g->point_count());
  for (std::size_t i = 0; i < tr.size(); ++i)
    tr[i] = h.block(i)[0].real() + h.block(i)[3].real();
  CHECK(std::abs(integrate(ScalarField(g, std::move(tr)), HermitianField::identity(g))) <
        1e-12);
}

TEST_CASE("metric constructors") {
  SUBCASE("flat is the identity with a positive tag") {
    auto g = TorusGrid::make(2, 16);
    const HermitianField omega = build_metric(g, MetricSpec::flat_metric());
    CHECK(omega.tag() == Positivity::positive);
    CHECK(omega.block(123)[0] == complex_t(1.0, 0.0));
    CHECK(omega.block(123)[3] == complex_t(1.0, 0.0));
    CHECK(omega.block(123)[1] == complex_t(0.0, 0.0));
  }
  SUBCASE("degenerate touches zero at x = 0 only") {
    auto g = TorusGrid::make(1, 128);
    const ScalarField eig = min_eigenvalue_field(build_metric(g, MetricSpec::degenerate_big()));
    CHECK(std::abs(eig.min()) < 1e-10);
    CHECK(eig[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(eig[g->point_count() / 2] > 0.5);
  }
  SUBCASE("degenerate is omega + ddc(chi) exactly") {
    auto g = TorusGrid::make(1, 128);
    const HermitianField theta = build_metric(g, MetricSpec::degenerate_big());
    const HermitianField recon =
        HermitianField::identity(g) + ddc(degenerate_potential(g));
    double sup = 0.0;
    for (std::size_t i = 0; i < theta.coeffs().size(); ++i)
      sup = std::max(sup, std::abs(theta.coeffs()[i] - recon.coeffs()[i]));
    CHECK(sup < 1e-12);
  }
  SUBCASE("unsupported combinations fail") {
    CHECK_THROWS_AS((void)build_metric(TorusGrid::make(1, 64), MetricSpec::nonkahler(0.1)),
                    Error);
    CHECK_THROWS_AS((void)build_metric(TorusGrid::make(2, 16), MetricSpec::nonkahler(1.0)),
                    Error);
    CHECK_THROWS_AS((void)build_metric(TorusGrid::make(2, 16), MetricSpec::degenerate_big()),
                    Error);
  }
}

TEST_CASE("closedness defect") {
  SUBCASE("flat metric is closed") {
    CHECK(closedness_defect(HermitianField::identity(TorusGrid::make(2, 16))) < 1e-12);
  }
  SUBCASE("non-Kaehler defect equals pi^2 eps") {
    const HermitianField omega =
        build_metric(TorusGrid::make(2, 16), MetricSpec::nonkahler(0.1));
    CHECK(closedness_defect(omega) == doctest::Approx(kPi * kPi * 0.1).epsilon(1e-9));
    CHECK(closedness_defect(omega) > 1e-3);
  }
  SUBCASE("n=1 top-degree forms are closed") {
    const HermitianField theta =
        build_metric(TorusGrid::make(1, 64), MetricSpec::degenerate_big());
    CHECK(closedness_defect(theta) < 1e-12);
  }
}

TEST_CASE("integrate") {
  auto g = TorusGrid::make(1, 64);
  const HermitianField omega = HermitianField::identity(g);
  CHECK(integrate(ScalarField::constant(g, 1.0), omega) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(integrate(cos_x(g, 0, 1, 1.0), omega)) < 1e-14);
  const HermitianField theta = build_metric(g, MetricSpec::degenerate_big());
  CHECK(integrate(ScalarField::constant(g, 1.0), theta) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS((void)integrate(ScalarField::constant(TorusGrid::make(1, 32), 1.0), omega),
                  Error);
}

TEST_CASE("min eigenvalue field") {
  auto g = TorusGrid::make(2, 16);
  SUBCASE("identity") {
    const ScalarField eig = min_eigenvalue_field(HermitianField::identity(g));
    CHECK(eig.min() == doctest::Approx(1.0));
    CHECK(eig.max() == doctest::Approx(1.0));
  }
  SUBCASE("diag(2, 0.5)") {
    const complex_t block[4] = {complex_t(2.0, 0.0), complex_t(0.0, 0.0),
                                complex_t(0.0, 0.0), complex_t(0.5, 0.0)};
    const ScalarField eig = min_eigenvalue_field(HermitianField::constant(g, block));
    CHECK(eig.min() == doctest::Approx(0.5));
    CHECK(eig.max() == doctest::Approx(0.5));
  }
  SUBCASE("positive-tagged metric is strictly positive everywhere") {
    const ScalarField eig =
        min_eigenvalue_field(build_metric(g, MetricSpec::nonkahler(0.3)));
    CHECK(eig.min() > 0.0);
  }
}

TEST_CASE("finite differences converge to ddc at order two") {
  std::vector<double> errs;
  for (int res : {32, 64, 128}) {
    auto g = TorusGrid::make(1, res);
    std::vector<double> v(g->point_count());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double x = g->coordinate(i, 0), y = g->coordinate(i, 1);
      v[i] = std::cos(kTwoPi * 3 * x) * std::cos(kTwoPi * 2 * y) +
             0.5 * std::sin(kTwoPi * 5 * x + 0.7);
    }
    const ScalarField phi(g, v);
    const HermitianField h = ddc(phi);
    const int r = res;
    const double dx = g->spacing(0);
    auto at = [&](int x, int y) {
      return v[static_cast<size_t>((x + r) % r) * r + static_cast<size_t>((y + r) % r)];
    };
    double worst = 0.0;
    for (int x = 0; x < r; ++x)
      for (int y = 0; y < r; ++y) {
        const double lap = (at(x + 1, y) + at(x - 1, y) + at(x, y + 1) + at(x, y - 1) -
                            4.0 * at(x, y)) /
                           (dx * dx);
        worst = std::max(worst, std::abs(0.5 * lap -
                                         h.block(static_cast<size_t>(x) * r + y)[0].real()));
      }
    errs.push_back(worst);
  }
  CHECK(std::log2(errs[0] / errs[1]) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::log2(errs[1] / errs[2]) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("spectral tail flags rough fields") {
  auto g = TorusGrid::make(1, 64);
  CHECK(spectral_tail(cos_x(g, 0, 1, 1.0)) < 1e-12);
  // A field carrying only high modes has all its energy in the tail.
  CHECK(spectral_tail(cos_x(g, 0, 28, 1.0)) == doctest::Approx(1.0));
}
