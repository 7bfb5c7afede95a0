#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cyma/calculus.hpp"
#include "cyma/errors.hpp"
#include "cyma/metric.hpp"
#include "cyma/random.hpp"
#include "cyma/solver.hpp"

using namespace cyma;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

ScalarField axis_cos(GridPtr grid, int axis, double amp, int k = 1) {
  std::vector<double> v(grid->point_count());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = amp * std::cos(kTwoPi * k * grid->coordinate(i, axis));
  return ScalarField(std::move(grid), std::move(v));
}

// Dense Newton oracle at small resolution: assembles the linearized operator
// column by column and solves by Gaussian elimination. Used to validate the
// matrix-free solver independently of the Krylov path.
ScalarField dense_newton_oracle(const HermitianField& omega, const ScalarField& f,
                                double lambda) {
  const GridPtr grid = omega.grid_ptr();
  const std::size_t n = grid->point_count();
  ScalarField phi = ScalarField::constant(grid, 0.0);
  for (int it = 0; it < 40; ++it) {
    const DensityRatio dr = ma_density(omega, phi);
    REQUIRE(dr.positivity_margin > 0.0);
    std::vector<double> r(n);
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = std::log(dr.values[i]) - lambda * phi[i] - f[i];
      sup = std::max(sup, std::abs(r[i]));
    }
    if (sup < 1e-13) break;
    // Assemble J = linearized - lambda I.
    std::vector<double> J(n * n);
    for (std::size_t col = 0; col < n; ++col) {
      std::vector<double> e(n, 0.0);
      e[col] = 1.0;
      const ScalarField chi(grid, std::move(e));
      const ScalarField Lchi = linearized_ma(omega, phi, chi);
      for (std::size_t row = 0; row < n; ++row)
        J[row * n + col] = Lchi[row] - (row == col ? lambda : 0.0);
    }
    // Solve J d = -r by partial-pivot elimination.
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = -r[i];
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t piv = k;
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::abs(J[i * n + k]) > std::abs(J[piv * n + k])) piv = i;
      if (piv != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(J[k * n + j], J[piv * n + j]);
        std::swap(d[k], d[piv]);
      }
      const double pivot = J[k * n + k];
      REQUIRE(std::abs(pivot) > 1e-14);
      for (std::size_t i = k + 1; i < n; ++i) {
        const double m = J[i * n + k] / pivot;
        if (m == 0.0) continue;
        for (std::size_t j = k; j < n; ++j) J[i * n + j] -= m * J[k * n + j];
        d[i] -= m * d[k];
      }
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = d[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= J[i * n + j] * d[j];
      d[i] = s / J[i * n + i];
    }
    std::vector<double> next = phi.copy_values();
    for (std::size_t i = 0; i < n; ++i) next[i] += d[i];
    phi = ScalarField(grid, std::move(next));
  }
  return phi;
}
}  // namespace

TEST_CASE("newton_solve trivial and constant cases") {
  auto g = TorusGrid::make(1, 64);
  const HermitianField omega = HermitianField::identity(g);
  SUBCASE("f = 0, lambda = 1 fixes zero immediately") {
    MAProblem p{omega, 1.0, ScalarField::constant(g, 0.0), Normalization::none, 1e-12, 50};
    const MASolution sol = newton_solve(p);
    CHECK(sol.phi.sup_abs() < 1e-12);
    CHECK(sol.residual < 1e-12);
    CHECK(sol.iterations <= 2);
  }
  SUBCASE("constant density gives phi = -f/lambda") {
    MAProblem p{omega, 2.0, ScalarField::constant(g, 0.3), Normalization::none, 1e-12, 50};
    const MASolution sol = newton_solve(p);
    CHECK((sol.phi + 0.15).sup_abs() < 1e-11);
    CHECK(sol.c == 1.0);
    CHECK(sol.b == 0.0);
  }
  SUBCASE("lambda = 0 is rejected; that is the calabi entry point") {
    MAProblem p{omega, 0.0, ScalarField::constant(g, 0.0), Normalization::sup_zero, 1e-9, 50};
    CHECK_THROWS_AS((void)newton_solve(p), Error);
  }
}

TEST_CASE("newton_solve matches the dense Newton oracle and perturbation theory") {
  auto g = TorusGrid::make(1, 32);
  const HermitianField omega = HermitianField::identity(g);
  const ScalarField f = axis_cos(g, 0, 1e-3);
  MAProblem p{omega, 1.0, f, Normalization::none, 1e-13, 50};
  const MASolution sol = newton_solve(p);

  const ScalarField oracle = dense_newton_oracle(omega, f, 1.0);
  CHECK((sol.phi - oracle).sup_abs() < 1e-10);

  const double amp = -1e-3 / (2.0 * kPi * kPi + 1.0);
  CHECK(amp == doctest::Approx(-4.8218e-5).epsilon(1e-4));
  CHECK((sol.phi - axis_cos(g, 0, amp)).sup_abs() < 1e-6);
}

TEST_CASE("solutions are genuinely psh and unique") {
  auto g = TorusGrid::make(1, 64);
  const HermitianField omega = HermitianField::identity(g);
  FieldSampler sampler(5);
  const ScalarField f = sampler.band_limited(g, 4, 0.4);
  MAProblem p{omega, 1.0, f, Normalization::none, 1e-11, 50};
  const MASolution a = newton_solve(p);
  CHECK(a.positivity_margin > 0.0);
  const ScalarField init = sampler.admissible_potential(omega, 4, 0.05);
  const MASolution b = newton_solve(p, init);
  CHECK((a.phi - b.phi).sup_abs() < 1e-8);
}

TEST_CASE("comparison monotonicity and shift equivariance") {
  auto g = TorusGrid::make(1, 64);
  const HermitianField omega = HermitianField::identity(g);
  FieldSampler sampler(6);
  SUBCASE("f1 <= f2 implies phi1 >= phi2") {
    for (int t = 0; t < 10; ++t) {
      const ScalarField f1 = sampler.band_limited(g, 4, 0.3);
      const ScalarField bump = sampler.band_limited(g, 4, 0.2);
      std::vector<double> v = f1.copy_values();
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += std::abs(bump[i]);
      const ScalarField f2(g, std::move(v));
      MAProblem p1{omega, 1.0, f1, Normalization::none, 1e-11, 50};
      MAProblem p2{omega, 1.0, f2, Normalization::none, 1e-11, 50};
      const ScalarField diff = newton_solve(p1).phi - newton_solve(p2).phi;
      CHECK(diff.min() >= -1e-8);
    }
  }
  SUBCASE("f + kappa shifts phi by -kappa/lambda") {
    const ScalarField f = sampler.band_limited(g, 4, 0.3);
    MAProblem p1{omega, 2.0, f, Normalization::none, 1e-12, 50};
    MAProblem p2{omega, 2.0, f + 0.7, Normalization::none, 1e-12, 50};
    const ScalarField a = newton_solve(p1).phi;
    const ScalarField b = newton_solve(p2).phi + 0.35;
    CHECK((a - b).sup_abs() < 1e-10);
  }
}

TEST_CASE("continuity path") {
  auto g = TorusGrid::make(1, 64);
  const HermitianField omega = HermitianField::identity(g);
  SUBCASE("f = 0 keeps every step at zero") {
    const PathResult path =
        continuity_path(omega, ScalarField::constant(g, 0.0), {0.0, 0.5, 1.0});
    for (const MASolution& s : path.solutions) CHECK(s.phi.sup_abs() < 1e-12);
    CHECK(!path.refined);
  }
  SUBCASE("moderate density: residuals meet target, osc grows") {
    const ScalarField f = axis_cos(g, 0, 0.5);
    const PathResult path = continuity_path(omega, f, {0.0, 0.5, 1.0});
    REQUIRE(path.completed);
    for (const MASolution& s : path.solutions) CHECK(s.residual <= 1e-9);
    for (std::size_t i = 1; i < path.solutions.size(); ++i)
      CHECK(path.solutions[i].diagnostics.osc_phi >=
            path.solutions[i - 1].diagnostics.osc_phi - 1e-12);
    // Endpoint agrees with the direct solve.
    MAProblem p{omega, 1.0, f, Normalization::none, 1e-9, 50};
    CHECK((path.solutions.back().phi - newton_solve(p).phi).sup_abs() < 1e-8);
  }
  SUBCASE("steep density triggers bisection, result matches fine schedule") {
    const ScalarField f = axis_cos(g, 0, 6.0);
    SolverOptions opts;
    opts.tol = 1e-9;
    opts.max_newton = 14;  // tight cap so the coarse jump genuinely fails
    const PathResult coarse = continuity_path(omega, f, {0.0, 1.0}, opts);
    REQUIRE(coarse.completed);
    CHECK(coarse.refined);
    const PathResult fine = continuity_path(omega, f, default_t_schedule(16), opts);
    REQUIRE(fine.completed);
    CHECK((coarse.solutions.back().phi - fine.solutions.back().phi).sup_abs() < 1e-8);
  }
}

TEST_CASE("solve_calabi") {
  auto g = TorusGrid::make(1, 128);
  const HermitianField omega = HermitianField::identity(g);
  SUBCASE("f = 1 returns the zero solution with c = 1") {
    const MASolution sol = solve_calabi(omega, ScalarField::constant(g, 1.0), 2.0);
    CHECK(sol.phi.sup_abs() < 1e-11);
    CHECK(sol.c == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("Fourier closed form at res 128") {
    const ScalarField f = axis_cos(g, 0, 0.3) + 1.0;
    const MASolution sol = solve_calabi(omega, f, 2.0);
    CHECK(std::abs(sol.c - 1.0) < 1e-8);
    const double amp = -0.3 / (2.0 * kPi * kPi);
    const ScalarField expected = axis_cos(g, 0, amp) + amp;
    CHECK((sol.phi - expected).sup_abs() < 1e-7);
    CHECK(sol.phi.max() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sol.phi[0] == doctest::Approx(2.0 * amp).epsilon(1e-6));
  }
  SUBCASE("Kaehler constant identity on random densities") {
    FieldSampler sampler(8);
    for (int t = 0; t < 10; ++t) {
      const ScalarField f = sampler.positive_density(g, 4, 0.4);
      const MASolution sol = solve_calabi(omega, f, 2.0);
      CHECK(std::abs(sol.c * integrate(f, omega) - total_volume(omega)) < 1e-8);
    }
  }
  SUBCASE("nonpositive data is rejected") {
    CHECK_THROWS_AS((void)solve_calabi(omega, ScalarField::constant(g, 0.0), 2.0), Error);
    CHECK_THROWS_AS((void)solve_calabi(omega, ScalarField::constant(g, -1.0), 2.0), Error);
  }
}

TEST_CASE("richardson extrapolation recovers polynomial limits") {
  // v(h) = 3 - 2h + 5h^2 sampled at h = 1/4, 1/8, 1/16, 1/32.
  std::vector<double> h{0.25, 0.125, 0.0625, 0.03125};
  std::vector<double> v;
  for (double x : h) v.push_back(3.0 - 2.0 * x + 5.0 * x * x);
  CHECK(richardson_extrapolate(h, v) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("solve_degenerate") {
  auto g = TorusGrid::make(1, 64);
  const HermitianField omega = HermitianField::identity(g);
  const HermitianField theta = build_metric(g, MetricSpec::degenerate_big());
  SUBCASE("unit density: c_j = 1 + eps_j exactly and u is the big-form witness") {
    const PathResult path =
        solve_degenerate(theta, omega, ScalarField::constant(g, 1.0), default_eps_schedule());
    REQUIRE(path.completed);
    for (std::size_t i = 0; i < path.schedule.size(); ++i) {
      CHECK(std::abs(path.constants_trace[i] - (1.0 + path.schedule[i])) < 1e-10);
      // The solution is the sup-normalized potential with theta + ddc(u) = omega.
      const ScalarField chi = degenerate_potential(g);
      const ScalarField expected = (chi * -1.0) + (-(chi * -1.0).max());
      CHECK((path.solutions[i].phi - expected).sup_abs() < 1e-9);
    }
  }
  SUBCASE("theta = omega gives u = 0, c = (1 + eps)^n") {
    const PathResult path = solve_degenerate(omega, omega, ScalarField::constant(g, 1.0),
                                             {0.5, 0.25, 0.125});
    for (std::size_t i = 0; i < path.schedule.size(); ++i) {
      CHECK(path.solutions[i].phi.osc() < 1e-10);
      CHECK(std::abs(path.constants_trace[i] - (1.0 + path.schedule[i])) < 1e-10);
    }
  }
  SUBCASE("schedule validation") {
    CHECK_THROWS_AS((void)solve_degenerate(theta, omega, ScalarField::constant(g, 1.0),
                                           {0.25, 0.5}),
                    Error);
  }
}

TEST_CASE("klt densities") {
  auto g = TorusGrid::make(1, 64);
  const double h = g->spacing(0);
  KltDensitySpec spec;
  spec.points = {{0.5 + h / 2.0, 0.5}};
  spec.exponents = {-0.5};
  SUBCASE("finite at all nodes even unmollified (off-lattice point)") {
    const ScalarField f = klt_density(g, spec);
    CHECK(f.min() > 0.0);
    CHECK(std::isfinite(f.max()));
  }
  SUBCASE("integrability gate") {
    const HermitianField omega = HermitianField::identity(g);
    CHECK(lp_norm(klt_density(g, spec), omega, 1.5) < 10.0);
    CHECK_THROWS_AS((void)solve_singular(omega, spec, {h}, 2.5), Error);
    KltDensitySpec bad = spec;
    bad.exponents = {-1.5};
    CHECK_THROWS_AS((void)klt_density(g, bad), Error);
  }
}

TEST_CASE("solve_singular") {
  auto g = TorusGrid::make(1, 64);
  const HermitianField omega = HermitianField::identity(g);
  const double h = g->spacing(0);
  SUBCASE("zero exponents reduce to solve_calabi") {
    FieldSampler sampler(12);
    const ScalarField smooth = sampler.band_limited(g, 3, 0.2);
    KltDensitySpec spec;
    spec.points = {{0.25, 0.25}};
    spec.exponents = {0.0};
    spec.smooth_factor = smooth;
    const PathResult path = solve_singular(omega, spec, {h}, 1.5);
    std::vector<double> v(g->point_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(smooth[i]);
    const MASolution direct = solve_calabi(omega, ScalarField(g, std::move(v)), 1.5);
    CHECK((path.solutions.back().phi - direct.phi).sup_abs() < 1e-9);
    CHECK(path.constants_trace.back() == doctest::Approx(direct.c).epsilon(1e-10));
  }
  SUBCASE("positive exponent: density zero is harmless and phi stays smooth") {
    KltDensitySpec spec;
    spec.points = {{0.5 + h / 2.0, 0.5}};
    spec.exponents = {1.0};
    SolverOptions opts;
    opts.tol = 1e-6;
    const PathResult path = solve_singular(omega, spec, default_delta_schedule(h), 1.5, opts);
    for (const MASolution& s : path.solutions) {
      CHECK(s.residual <= 1e-6);
      CHECK(s.diagnostics.spectral_tail < 1e-6);
    }
  }
  SUBCASE("negative exponent stays bounded along the mollification path") {
    KltDensitySpec spec;
    spec.points = {{0.5 + h / 2.0, 0.5}};
    spec.exponents = {-0.5};
    SolverOptions opts;
    opts.tol = 1e-6;
    const PathResult path = solve_singular(omega, spec, default_delta_schedule(h), 1.5, opts);
    for (const MASolution& s : path.solutions) {
      CHECK(s.positivity_margin > 0.0);
      CHECK(s.diagnostics.osc_phi < 1.0);
    }
  }
}
