#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cyma/calculus.hpp"
#include "cyma/envelope.hpp"
#include "cyma/errors.hpp"
#include "cyma/random.hpp"

using namespace cyma;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

ScalarField cos_obstacle(GridPtr grid, double amp) {
  std::vector<double> v(grid->point_count());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = amp * std::cos(kTwoPi * grid->coordinate(i, 0));
  return ScalarField(std::move(grid), std::move(v));
}
}  // namespace

TEST_CASE("obstacle oracle") {
  auto g = TorusGrid::make(1, 64);
  const HermitianField omega = HermitianField::identity(g);
  SUBCASE("psh obstacle is returned unchanged") {
    const ScalarField obstacle = cos_obstacle(g, 0.03);
    const ScalarField u = envelope_obstacle_oracle(omega, obstacle);
    CHECK((u - obstacle).sup_abs() < 1e-12);
  }
  SUBCASE("0.2 cos detaches around x = 0 and touches around x = 1/2") {
    // 0.2 > 1/(2 pi^2) = 0.050660..., so the obstacle is not omega-psh; its
    // non-psh region is the cap near x = 0 where the envelope must detach.
    CHECK(0.2 > 1.0 / (2.0 * kPi * kPi));
    const ScalarField obstacle = cos_obstacle(g, 0.2);
    const ScalarField u = envelope_obstacle_oracle(omega, obstacle);
    const int r = g->res();
    auto gap_at = [&](int x) {
      return obstacle[static_cast<size_t>(x) * r] - u[static_cast<size_t>(x) * r];
    };
    CHECK(gap_at(0) > 1e-3);       // detached at the cap
    CHECK(gap_at(r / 2) < 1e-10);  // contact at the bottom
    CHECK((u - obstacle).max() <= 0.0);
    // Off contact the 5-point Laplacian solves Delta u = -2.
    const double h2 = g->spacing(0) * g->spacing(0);
    auto lap = [&](int x, int y) {
      auto at = [&](int a, int b) {
        return u[static_cast<size_t>((a + r) % r) * r + static_cast<size_t>((b + r) % r)];
      };
      return (at(x + 1, y) + at(x - 1, y) + at(x, y + 1) + at(x, y - 1) - 4.0 * at(x, y)) /
             h2;
    };
    for (int x = 0; x < r; ++x)
      for (int y = 0; y < r; ++y) {
        const double gap =
            obstacle[static_cast<size_t>(x) * r + y] - u[static_cast<size_t>(x) * r + y];
        const double pde = lap(x, y) + 2.0;
        const bool contact = gap <= 1e-10 && pde >= -1e-8;
        const bool interior = std::abs(pde) <= 1e-8;
        CHECK((contact || interior));
      }
  }
  SUBCASE("monotone in the obstacle") {
    FieldSampler sampler(21);
    for (int t = 0; t < 10; ++t) {
      const ScalarField g1f = sampler.band_limited(g, 3, 0.15);
      const ScalarField bump = sampler.band_limited(g, 3, 0.1);
      std::vector<double> v = g1f.copy_values();
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += std::abs(bump[i]);
      const ScalarField g2f(g, std::move(v));
      const ScalarField u1 = envelope_obstacle_oracle(omega, g1f);
      const ScalarField u2 = envelope_obstacle_oracle(omega, g2f);
      CHECK((u1 - u2).max() <= 1e-10);
    }
  }
  SUBCASE("rejects unsupported inputs") {
    CHECK_THROWS_AS((void)envelope_obstacle_oracle(
                        HermitianField::identity(TorusGrid::make(2, 16)),
                        ScalarField::constant(TorusGrid::make(2, 16), 0.0)),
                    Error);
  }
}

TEST_CASE("penalized envelope") {
  auto g = TorusGrid::make(1, 64);
  const HermitianField omega = HermitianField::identity(g);
  SUBCASE("psh obstacle: P equals g") {
    const ScalarField obstacle = ScalarField::constant(g, 0.0);
    const EnvelopeResult env = envelope_penalized(omega, obstacle, {10, 100, 1000});
    CHECK(env.P.sup_abs() < 1e-12);
    for (const EnvelopeStep& s : env.lambda_trace) {
      const double bound = std::log(s.lambda) / s.lambda + env.upper_constant / s.lambda;
      CHECK(env.iterates.empty() == false);
      CHECK(s.upper_violation <= 1e-8);
      CHECK(s.lower_violation <= 1e-8);
      (void)bound;
    }
  }
  SUBCASE("translation equivariance") {
    const ScalarField obstacle = cos_obstacle(g, 0.2);
    const std::vector<double> sched{10, 40, 160, 640};
    const EnvelopeResult a = envelope_penalized(omega, obstacle, sched);
    const EnvelopeResult b = envelope_penalized(omega, obstacle + 5.0, sched);
    CHECK(((a.P + 5.0) - b.P).sup_abs() < 1e-9);
  }
  SUBCASE("benchmark: oracle agreement, sandwich, orthogonality") {
    const ScalarField obstacle = cos_obstacle(g, 0.2);
    const EnvelopeResult env =
        envelope_penalized(omega, obstacle, default_lambda_schedule());
    REQUIRE(env.completed);

    // P <= g and near-psh at the final lambda.
    CHECK((env.P - obstacle).max() <= 1e-9);
    CHECK(min_eigenvalue_field(omega + ddc(env.P)).min() >= -1e-6);

    // Sandwich holds at every scheduled lambda.
    for (const EnvelopeStep& s : env.lambda_trace) {
      CHECK(s.lower_violation <= 1e-8);
      CHECK(s.upper_violation <= 1e-8);
    }

    // Successive sup-distances decay like O(log lambda / lambda).
    for (std::size_t k = 1; k < env.lambda_trace.size(); ++k) {
      const EnvelopeStep& s = env.lambda_trace[k];
      CHECK(s.sup_distance_to_previous <=
            10.0 * std::log(s.lambda) / s.lambda + 1e-8);
    }

    // Agreement with the independent finite-difference oracle.
    const ScalarField oracle = envelope_obstacle_oracle(omega, obstacle);
    const double lam = env.lambda_trace.back().lambda;
    CHECK((env.P - oracle).sup_abs() <= 5.0 * std::log(lam) / lam + 1e-4);

    // Contact set: present at x = 1/2, absent at x = 0.
    const int r = g->res();
    CHECK(env.contact_mask[static_cast<size_t>(r / 2) * r] == 1.0);
    CHECK(env.contact_mask[0] == 0.0);

    // Orthogonality defect is tiny and nonincreasing along the schedule.
    CHECK(env.orthogonality_defect < 1e-4 * mass(omega, env.P));
    for (std::size_t k = 1; k < env.lambda_trace.size(); ++k) {
      const double prev = env.lambda_trace[k - 1].orthogonality_defect;
      const double cur = env.lambda_trace[k].orthogonality_defect;
      if (prev > 0.0) CHECK(cur / prev <= 1.0 + 1e-6);
    }
  }
  SUBCASE("monotone in the obstacle") {
    const ScalarField ga = cos_obstacle(g, 0.2);
    const ScalarField gb = ga + 0.05;
    const std::vector<double> sched{10, 40, 160, 640, 2560, 10240};
    const EnvelopeResult a = envelope_penalized(omega, ga, sched);
    const EnvelopeResult b = envelope_penalized(omega, gb, sched);
    CHECK((a.P - b.P).max() <= 1e-8);
  }
  SUBCASE("n=2 envelopes validate through the sandwich alone") {
    auto g2 = TorusGrid::make(2, 16);
    const HermitianField omega2 = HermitianField::identity(g2);
    std::vector<double> v(g2->point_count());
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = 0.1 * std::cos(kTwoPi * g2->coordinate(i, 0));
    const EnvelopeResult env =
        envelope_penalized(omega2, ScalarField(g2, std::move(v)), {10, 40, 160, 640, 2560});
    REQUIRE(env.completed);
    for (const EnvelopeStep& s : env.lambda_trace) {
      CHECK(s.lower_violation <= 1e-8);
      CHECK(s.upper_violation <= 1e-8);
    }
  }
}

TEST_CASE("orthogonality defect") {
  auto g = TorusGrid::make(1, 64);
  const HermitianField omega = HermitianField::identity(g);
  SUBCASE("psh obstacle: empty off-contact set") {
    const ScalarField obstacle = cos_obstacle(g, 0.03);
    CHECK(orthogonality_defect(omega, obstacle, obstacle, 1e-3) == 0.0);
  }
  SUBCASE("clamps negative densities to zero") {
    const ScalarField p = cos_obstacle(g, 0.2);  // not psh; density negative somewhere
    const ScalarField obstacle = p + 1.0;
    const double defect = orthogonality_defect(omega, p, obstacle, 1e-3);
    CHECK(defect >= 0.0);
  }
}
