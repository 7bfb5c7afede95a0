#include "cyma/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "cyma/calculus.hpp"
#include "cyma/envelope.hpp"
#include "cyma/errors.hpp"
#include "cyma/ma.hpp"
#include "cyma/metric.hpp"
#include "cyma/random.hpp"
#include "cyma/solver.hpp"

namespace cyma {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Oracle-calibrated bounds; frozen from reference runs at the resolutions
// noted next to each value (see tests/acceptance.cpp for the matching gates).
constexpr double kDegenerateOscBound = 0.16;   // res-128 run: max osc(u_j) = 0.1469
constexpr double kSingularOscBound = 0.75;     // res-128 run, a = -0.5, p = 1.5

struct Recorder {
  CheckReport& report;
  bool timings;

  void run(const std::string& id, const std::string& desc, const std::string& provenance,
           const std::string& cmp, double threshold,
           const std::function<double()>& measure) {
    CheckRecord rec;
    rec.id = id;
    rec.description = desc;
    rec.provenance = provenance;
    rec.comparison = cmp;
    rec.threshold = threshold;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      rec.measured = measure();
    } catch (const std::exception&) {
      rec.measured = std::numeric_limits<double>::infinity();
      if (cmp == ">=") rec.measured = -std::numeric_limits<double>::infinity();
    }
    const auto t1 = std::chrono::steady_clock::now();
    rec.wall_time_s = timings ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
    rec.pass = cmp == "<=" ? rec.measured <= rec.threshold : rec.measured >= rec.threshold;
    report.checks.push_back(std::move(rec));
  }
};

ScalarField cosine_field(GridPtr grid, int axis, int k, double amplitude,
                         double phase = 0.0) {
  std::vector<double> v(grid->point_count());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = amplitude *
           std::cos(kTwoPi * k * grid->coordinate(i, axis) / grid->period(axis) + phase);
  return ScalarField(std::move(grid), std::move(v));
}

// All geometry-level checks obtain Hessians through this seam so the
// self-validation mutation (hessian_sign = -1) is observable.
HermitianField suite_hessian(const ScalarField& phi, double sign) {
  HermitianField h = ddc(phi);
  return sign == 1.0 ? h : h * sign;
}

double suite_mass(const HermitianField& omega, const ScalarField& phi, double sign) {
  const HermitianField perturbed = omega + suite_hessian(phi, sign);
  double acc = 0.0;
  for (std::size_t i = 0; i < omega.grid().point_count(); ++i)
    acc += linalg::det(perturbed.block(i), omega.grid().n());
  return acc * omega.grid().cell_volume();
}

void smooth_suite(Recorder& rec, const CheckOptions& opt) {
  const GridPtr g1 = TorusGrid::make(1, 64);
  const GridPtr g2 = TorusGrid::make(2, 16);
  const double sign = opt.hessian_sign;

  rec.run("smooth.010_ddc_constant", "ddc of a constant field vanishes", "exact", "<=",
          1e-15, [&] {
            const ScalarField c7 = ScalarField::constant(g1, 7.0);
            const HermitianField h = suite_hessian(c7, sign);
            double sup = 0.0;
            for (const complex_t& v : h.coeffs()) sup = std::max(sup, std::abs(v));
            return sup;
          });

  rec.run("smooth.011_ddc_cos_coefficient",
          "n=1 coefficient of ddc(cos 2 pi x) at the origin is -2 pi^2", "closed_form",
          "<=", 1e-10, [&] {
            const HermitianField h = suite_hessian(cosine_field(g1, 0, 1, 1.0), sign);
            return std::abs(h.block(0)[0].real() - (-2.0 * kPi * kPi));
          });

  rec.run("smooth.012_ddc_mixed_coefficient",
          "n=2 off-diagonal coefficient of sin(2 pi x1) sin(2 pi x2) at 0 is 2 pi^2",
          "closed_form", "<=", 1e-10, [&] {
            std::vector<double> v(g2->point_count());
            for (std::size_t i = 0; i < v.size(); ++i)
              v[i] = std::sin(kTwoPi * g2->coordinate(i, 0)) *
                     std::sin(kTwoPi * g2->coordinate(i, 2));
            const HermitianField h = suite_hessian(ScalarField(g2, std::move(v)), sign);
            return std::abs(h.block(0)[1] - complex_t(2.0 * kPi * kPi, 0.0));
          });

  rec.run("smooth.013_ddc_linearity", "ddc(a phi + b psi) = a ddc(phi) + b ddc(psi)",
          "exact", "<=", 1e-12, [&] {
            FieldSampler sampler(opt.seed + 13);
            double worst = 0.0;
            for (int trial = 0; trial < 5; ++trial) {
              const ScalarField phi = sampler.band_limited(g1, 2, 0.1);
              const ScalarField psi = sampler.band_limited(g1, 2, 0.1);
              std::uniform_real_distribution<double> coef(-10.0, 10.0);
              const double a = coef(sampler.engine());
              const double b = coef(sampler.engine());
              const HermitianField lhs = suite_hessian(phi * a + psi * b, sign);
              const HermitianField rhs =
                  suite_hessian(phi, sign) * a + suite_hessian(psi, sign) * b;
              for (std::size_t i = 0; i < lhs.coeffs().size(); ++i)
                worst = std::max(worst, std::abs(lhs.coeffs()[i] - rhs.coeffs()[i]));
            }
            return worst;
          });

  rec.run("smooth.014_ddc_mean_zero_trace",
          "trace of ddc(phi) integrates to zero against the flat metric", "exact", "<=",
          1e-12, [&] {
            FieldSampler sampler(opt.seed + 14);
            const ScalarField phi = sampler.band_limited(g1, 8, 1.0);
            const HermitianField h = suite_hessian(phi, sign);
            std::vector<double> tr(g1->point_count());
            for (std::size_t i = 0; i < tr.size(); ++i) tr[i] = h.block(i)[0].real();
            return std::abs(integrate(ScalarField(g1, std::move(tr)),
                                      HermitianField::identity(g1)));
          });

  rec.run("smooth.015_ddc_fd_order",
          "central differences converge to the spectral ddc at order 2", "oracle", "<=",
          0.1, [&] {
            // Fixed band-limited field, evaluated analytically on each grid.
            auto sample_phi = [](const GridPtr& g) {
              std::vector<double> v(g->point_count());
              for (std::size_t i = 0; i < v.size(); ++i) {
                const double x = g->coordinate(i, 0), y = g->coordinate(i, 1);
                v[i] = std::cos(kTwoPi * 3 * x) * std::cos(kTwoPi * 2 * y) +
                       0.5 * std::sin(kTwoPi * 5 * x + 0.7);
              }
              return ScalarField(g, std::move(v));
            };
            std::vector<double> errs;
            for (int res : {32, 64, 128}) {
              const GridPtr g = TorusGrid::make(1, res);
              const ScalarField phi = sample_phi(g);
              const HermitianField h = suite_hessian(phi, sign);
              // 5-point FD Laplacian / 2 approximates the sole coefficient.
              const double hx = g->spacing(0);
              double worst = 0.0;
              const int r = res;
              auto at = [&](int x, int y) {
                return phi[static_cast<size_t>(((x + r) % r)) * r +
                           static_cast<size_t>((y + r) % r)];
              };
              for (int x = 0; x < r; ++x)
                for (int y = 0; y < r; ++y) {
                  const double lap = (at(x + 1, y) + at(x - 1, y) + at(x, y + 1) +
                                      at(x, y - 1) - 4.0 * at(x, y)) /
                                     (hx * hx);
                  const double fd = 0.5 * lap;
                  worst = std::max(
                      worst,
                      std::abs(fd - h.block(static_cast<size_t>(x) * r + y)[0].real()));
                }
              errs.push_back(worst);
            }
            const double order1 = std::log2(errs[0] / errs[1]);
            const double order2 = std::log2(errs[1] / errs[2]);
            return std::max(std::abs(order1 - 2.0), std::abs(order2 - 2.0));
          });

  rec.run("smooth.020_metric_positive", "non-Kaehler metric has positive eigenvalues",
          "exact", ">=", 1e-12, [&] {
            return min_eigenvalue_field(build_metric(g2, MetricSpec::nonkahler(0.1))).min();
          });

  rec.run("smooth.021_metric_degenerate_min",
          "degenerate metric's smallest eigenvalue is 0, attained at x = 0",
          "closed_form", "<=", 1e-10, [&] {
            const ScalarField eig =
                min_eigenvalue_field(build_metric(g1, MetricSpec::degenerate_big()));
            double minv = eig.min();
            // locate the minimizer; it must sit at x = 0
            std::size_t arg = 0;
            for (std::size_t i = 0; i < eig.size(); ++i)
              if (eig[i] < eig[arg]) arg = i;
            const double x = g1->coordinate(arg, 0);
            return std::abs(minv) + (x == 0.0 ? 0.0 : 1.0);
          });

  rec.run("smooth.022_closedness_flat", "flat metric is ddc-closed", "exact", "<=", 1e-12,
          [&] { return closedness_defect(HermitianField::identity(g2)); });

  rec.run("smooth.023_closedness_nonkahler",
          "ddc defect of the eps = 0.1 non-Kaehler metric equals pi^2/10",
          "closed_form", "<=", 1e-6, [&] {
            const double defect = closedness_defect(build_metric(g2, MetricSpec::nonkahler(0.1)));
            return std::abs(defect - kPi * kPi * 0.1);
          });

  rec.run("smooth.024_closedness_degenerate", "n=1 top-degree forms are closed", "exact",
          "<=", 1e-12,
          [&] { return closedness_defect(build_metric(g1, MetricSpec::degenerate_big())); });

  rec.run("smooth.030_integrate_unit", "unit function integrates to 1 against flat omega",
          "exact", "<=", 1e-14, [&] {
            return std::abs(integrate(ScalarField::constant(g1, 1.0),
                                      HermitianField::identity(g1)) -
                            1.0);
          });

  rec.run("smooth.031_integrate_cos", "mean-zero mode integrates to zero", "exact", "<=",
          1e-14, [&] {
            return std::abs(
                integrate(cosine_field(g1, 0, 1, 1.0), HermitianField::identity(g1)));
          });

  rec.run("smooth.032_integrate_degenerate",
          "total degenerate volume integral equals 1", "closed_form", "<=", 1e-12, [&] {
            return std::abs(integrate(ScalarField::constant(g1, 1.0),
                                      build_metric(g1, MetricSpec::degenerate_big())) -
                            1.0);
          });

  rec.run("smooth.040_jacobian_consistency",
          "linearized operator matches central differences of log density", "oracle",
          "<=", 1e-6, [&] {
            FieldSampler sampler(opt.seed + 40);
            double worst = 0.0;
            auto check_pair = [&](const GridPtr& g, const HermitianField& omega) {
              const ScalarField phi = sampler.admissible_potential(omega, g->res() / 4, 0.5);
              const ScalarField chi = sampler.band_limited(g, g->res() / 4, 1.0);
              const ScalarField lin = linearized_ma(omega, phi, chi);
              const double s = 1e-5;
              const DensityRatio up = ma_density(omega, phi + chi * s);
              const DensityRatio dn = ma_density(omega, phi + chi * (-s));
              double num = 0.0, den = 0.0;
              for (std::size_t i = 0; i < lin.size(); ++i) {
                const double fd =
                    (std::log(up.values[i]) - std::log(dn.values[i])) / (2.0 * s);
                num = std::max(num, std::abs(fd - lin[i]));
                den = std::max(den, std::abs(lin[i]));
              }
              worst = std::max(worst, num / std::max(den, 1e-30));
            };
            const HermitianField o1 = HermitianField::identity(g1);
            const HermitianField o2 = HermitianField::identity(g2);
            for (int t = 0; t < 10; ++t) check_pair(g1, o1);
            for (int t = 0; t < 10; ++t) check_pair(g2, o2);
            return worst;
          });

  rec.run("smooth.041_mass_invariance_n1",
          "flat n=1 Monge-Ampere mass is potential-independent", "theory", "<=", 1e-9,
          [&] {
            FieldSampler sampler(opt.seed + 41);
            const HermitianField omega = HermitianField::identity(g1);
            const double base = suite_mass(omega, ScalarField::constant(g1, 0.0), sign);
            double worst = 0.0;
            for (int t = 0; t < 20; ++t) {
              const ScalarField phi = sampler.admissible_potential(omega, 16, 0.8);
              worst = std::max(worst, std::abs(suite_mass(omega, phi, sign) - base));
            }
            return worst;
          });

  rec.run("smooth.042_mass_invariance_n2",
          "flat n=2 Monge-Ampere mass is potential-independent", "theory", "<=", 1e-7,
          [&] {
            FieldSampler sampler(opt.seed + 42);
            const HermitianField omega = HermitianField::identity(g2);
            const double base = suite_mass(omega, ScalarField::constant(g2, 0.0), sign);
            double worst = 0.0;
            for (int t = 0; t < 20; ++t) {
              const ScalarField phi = sampler.admissible_potential(omega, 4, 0.8);
              worst = std::max(worst, std::abs(suite_mass(omega, phi, sign) - base));
            }
            return worst;
          });

  rec.run("smooth.043_mass_dichotomy_witness",
          "non-Kaehler metric moves total mass under a cosine potential", "oracle", ">=",
          1e-7, [&] {
            const HermitianField omega = build_metric(g2, MetricSpec::nonkahler(0.1));
            const ScalarField phi = cosine_field(g2, 2, 1, 0.01);
            const double base = suite_mass(omega, ScalarField::constant(g2, 0.0), sign);
            return std::abs(suite_mass(omega, phi, sign) - base);
          });

  rec.run("smooth.050_amgm_slack",
          "mixed trace dominates n (det ratio)^(1/n) for positive pairs", "theory", ">=",
          -1e-9, [&] {
            FieldSampler sampler(opt.seed + 50);
            const HermitianField omega = HermitianField::identity(g2);
            double worst = std::numeric_limits<double>::infinity();
            for (int t = 0; t < 5; ++t) {
              const ScalarField a = sampler.admissible_potential(omega, 4, 0.7);
              const ScalarField b = sampler.admissible_potential(omega, 4, 0.7);
              const HermitianField wa = omega + ddc(a);
              const HermitianField wb = omega + ddc(b);
              worst = std::min(worst, mixed_amgm_defect(wa, wb));
            }
            return worst;
          });

  rec.run("smooth.051_amgm_conformal_equality",
          "AM-GM slack vanishes for conformal pairs", "exact", "<=", 1e-12, [&] {
            const HermitianField omega = HermitianField::identity(g2);
            return std::abs(mixed_amgm_defect(omega * 2.0, omega));
          });

  rec.run("smooth.060_gauduchon_flat", "flat metric is already Gauduchon", "exact", "<=",
          1e-12, [&] {
            const ScalarField h = gauduchon_factor(HermitianField::identity(g2));
            return (h + (-1.0)).sup_abs();
          });

  rec.run("smooth.061_gauduchon_closed_form",
          "Gauduchon factor of the eps = 0.1 metric matches 1/(1+0.1 cos)", "closed_form",
          "<=", 1e-6, [&] {
            const HermitianField omega = build_metric(g2, MetricSpec::nonkahler(0.1));
            const ScalarField h = gauduchon_factor(omega);
            const double norm = 1.0 / std::sqrt(1.0 - 0.01);
            double worst = 0.0;
            for (std::size_t i = 0; i < h.size(); ++i) {
              const double x2 = g2->coordinate(i, 2);
              const double expected = (1.0 / (1.0 + 0.1 * std::cos(kTwoPi * x2))) / norm;
              worst = std::max(worst, std::abs(h[i] - expected));
            }
            return worst;
          });

  rec.run("smooth.062_gauduchon_idempotent",
          "factor of an already-Gauduchon metric is constant 1", "theory", "<=", 1e-9,
          [&] {
            const HermitianField omega = build_metric(g2, MetricSpec::nonkahler(0.1));
            const HermitianField gaud = omega.scaled_by(gauduchon_factor(omega));
            return (gauduchon_factor(gaud) + (-1.0)).sup_abs();
          });

  rec.run("smooth.070_newton_trivial_phi", "lambda=1, f=0 fixes phi = 0", "exact", "<=",
          1e-12, [&] {
            MAProblem p{HermitianField::identity(g1), 1.0,
                        ScalarField::constant(g1, 0.0), Normalization::none, 1e-9, 50};
            return newton_solve(p).phi.sup_abs();
          });

  rec.run("smooth.071_newton_trivial_iterations", "the trivial solve needs <= 2 steps",
          "exact", "<=", 2.0, [&] {
            MAProblem p{HermitianField::identity(g1), 1.0,
                        ScalarField::constant(g1, 0.0), Normalization::none, 1e-9, 50};
            return static_cast<double>(newton_solve(p).iterations);
          });

  rec.run("smooth.072_newton_constant_solution", "f = 0.3, lambda = 2 gives phi = -0.15",
          "closed_form", "<=", 1e-10, [&] {
            MAProblem p{HermitianField::identity(g1), 2.0,
                        ScalarField::constant(g1, 0.3), Normalization::none, 1e-12, 50};
            return (newton_solve(p).phi + 0.15).sup_abs();
          });

  rec.run("smooth.073_newton_perturbation",
          "small-density solve matches first-order theory", "oracle", "<=", 1e-6, [&] {
            const GridPtr g32 = TorusGrid::make(1, 32);
            MAProblem p{HermitianField::identity(g32), 1.0,
                        cosine_field(g32, 0, 1, 1e-3), Normalization::none, 1e-12, 50};
            const ScalarField phi = newton_solve(p).phi;
            const double amp = -1e-3 / (2.0 * kPi * kPi + 1.0);
            return (phi - cosine_field(g32, 0, 1, amp)).sup_abs();
          });

  rec.run("smooth.080_solver_uniqueness",
          "solves from two initializations coincide", "theory", "<=", 1e-8, [&] {
            FieldSampler sampler(opt.seed + 80);
            const HermitianField omega = HermitianField::identity(g1);
            FieldSampler fs(opt.seed + 81);
            const ScalarField f = fs.band_limited(g1, 4, 0.4);
            MAProblem p{omega, 1.0, f, Normalization::none, 1e-11, 50};
            const MASolution a = newton_solve(p);
            const ScalarField init = sampler.admissible_potential(omega, 4, 0.05) ;
            const MASolution b = newton_solve(p, init);
            return (a.phi - b.phi).sup_abs();
          });

  rec.run("smooth.081_solver_monotonicity",
          "f1 <= f2 implies phi1 >= phi2 (comparison principle)", "theory", ">=", -1e-8,
          [&] {
            FieldSampler sampler(opt.seed + 82);
            const HermitianField omega = HermitianField::identity(g1);
            double worst = std::numeric_limits<double>::infinity();
            for (int t = 0; t < 3; ++t) {
              const ScalarField f1 = sampler.band_limited(g1, 4, 0.3);
              const ScalarField bump = sampler.band_limited(g1, 4, 0.2);
              ScalarField f2 = f1;
              {
                std::vector<double> v = f2.copy_values();
                for (std::size_t i = 0; i < v.size(); ++i) v[i] += std::abs(bump[i]);
                f2 = ScalarField(g1, std::move(v));
              }
              MAProblem p1{omega, 1.0, f1, Normalization::none, 1e-11, 50};
              MAProblem p2{omega, 1.0, f2, Normalization::none, 1e-11, 50};
              const ScalarField diff = newton_solve(p1).phi - newton_solve(p2).phi;
              worst = std::min(worst, diff.min());
            }
            return worst;
          });

  rec.run("smooth.082_solver_shift_equivariance",
          "f + kappa shifts the solution by -kappa/lambda", "closed_form", "<=", 1e-10,
          [&] {
            FieldSampler sampler(opt.seed + 83);
            const HermitianField omega = HermitianField::identity(g1);
            const ScalarField f = sampler.band_limited(g1, 4, 0.3);
            const double kappa = 0.7, lambda = 2.0;
            MAProblem p1{omega, lambda, f, Normalization::none, 1e-12, 50};
            MAProblem p2{omega, lambda, f + kappa, Normalization::none, 1e-12, 50};
            const ScalarField shifted = newton_solve(p2).phi + kappa / lambda;
            return (newton_solve(p1).phi - shifted).sup_abs();
          });

  rec.run("smooth.090_calabi_closed_form_constant",
          "flat Calabi with f = 1 + 0.3 cos has c = 1", "closed_form", "<=", 1e-8, [&] {
            const ScalarField f = cosine_field(g1, 0, 1, 0.3) + 1.0;
            return std::abs(solve_calabi(HermitianField::identity(g1), f, 2.0).c - 1.0);
          });

  rec.run("smooth.091_calabi_closed_form_potential",
          "flat Calabi potential matches its Fourier closed form", "closed_form", "<=",
          1e-7, [&] {
            const ScalarField f = cosine_field(g1, 0, 1, 0.3) + 1.0;
            const MASolution sol = solve_calabi(HermitianField::identity(g1), f, 2.0);
            const double amp = -0.3 / (2.0 * kPi * kPi);
            const ScalarField expected = cosine_field(g1, 0, 1, amp) + amp;
            return (sol.phi - expected).sup_abs();
          });

  rec.run("smooth.092_calabi_kahler_identity",
          "flat metric: c * integral(f) equals total volume", "theory", "<=", 1e-8, [&] {
            FieldSampler sampler(opt.seed + 92);
            const HermitianField omega = HermitianField::identity(g1);
            const double vol = total_volume(omega);
            double worst = 0.0;
            for (int t = 0; t < 5; ++t) {
              const ScalarField f = sampler.positive_density(g1, 4, 0.4);
              const MASolution sol = solve_calabi(omega, f, 2.0);
              worst = std::max(worst, std::abs(sol.c * integrate(f, omega) - vol));
            }
            return worst;
          });

  rec.run("smooth.100_continuity_residuals",
          "continuity path reaches every step's residual target", "oracle", "<=", 1e-9,
          [&] {
            const ScalarField f = cosine_field(g1, 0, 1, 0.5);
            const PathResult path = continuity_path(
                HermitianField::identity(g1), f, {0.0, 0.5, 1.0});
            double worst = 0.0;
            for (const MASolution& s : path.solutions)
              worst = std::max(worst, s.residual);
            return worst;
          });

  rec.run("smooth.101_continuity_osc_monotone",
          "oscillation of phi_t grows along the path for this density", "oracle", ">=",
          -1e-12, [&] {
            const ScalarField f = cosine_field(g1, 0, 1, 0.5);
            const PathResult path = continuity_path(
                HermitianField::identity(g1), f, {0.0, 0.5, 1.0});
            double worst = std::numeric_limits<double>::infinity();
            for (std::size_t i = 1; i < path.solutions.size(); ++i)
              worst = std::min(worst, path.solutions[i].diagnostics.osc_phi -
                                          path.solutions[i - 1].diagnostics.osc_phi);
            return worst;
          });
}

void envelope_suite(Recorder& rec, const CheckOptions& opt) {
  const GridPtr g1 = TorusGrid::make(1, 64);
  const GridPtr g2 = TorusGrid::make(2, 16);
  const HermitianField omega1 = HermitianField::identity(g1);

  rec.run("envelope.010_psh_obstacle_inactive",
          "oracle returns g itself when g is omega-psh", "exact", "<=", 1e-12, [&] {
            const ScalarField g = cosine_field(g1, 0, 1, 0.03);
            return (envelope_obstacle_oracle(omega1, g) - g).sup_abs();
          });

  rec.run("envelope.011_zero_obstacle", "envelope of the zero obstacle is zero", "exact",
          "<=", 1e-12, [&] {
            const EnvelopeResult env = envelope_penalized(
                omega1, ScalarField::constant(g1, 0.0), {10.0, 100.0, 1000.0});
            return env.P.sup_abs();
          });

  rec.run("envelope.012_translation",
          "envelope commutes with constant shifts of the obstacle", "exact", "<=", 1e-9,
          [&] {
            const ScalarField g = cosine_field(g1, 0, 1, 0.2);
            const std::vector<double> sched = {10, 40, 160, 640};
            const EnvelopeResult a = envelope_penalized(omega1, g, sched);
            const EnvelopeResult b = envelope_penalized(omega1, g + 5.0, sched);
            return ((a.P + 5.0) - b.P).sup_abs();
          });

  rec.run("envelope.020_oracle_monotonicity",
          "oracle envelope is monotone in the obstacle", "theory", "<=", 1e-10, [&] {
            FieldSampler sampler(opt.seed + 120);
            double worst = 0.0;
            for (int t = 0; t < 10; ++t) {
              const ScalarField base = sampler.band_limited(g1, 3, 0.15);
              const ScalarField bump = sampler.band_limited(g1, 3, 0.1);
              std::vector<double> v = base.copy_values();
              for (std::size_t i = 0; i < v.size(); ++i) v[i] += std::abs(bump[i]);
              const ScalarField upper(g1, std::move(v));
              const ScalarField ua = envelope_obstacle_oracle(omega1, base);
              const ScalarField ub = envelope_obstacle_oracle(omega1, upper);
              worst = std::max(worst, (ua - ub).max());
            }
            return worst;
          });

  rec.run("envelope.021_penalized_monotonicity",
          "penalized envelope is monotone in the obstacle", "theory", "<=", 1e-8, [&] {
            const ScalarField ga = cosine_field(g1, 0, 1, 0.2);
            const ScalarField gb = ga + 0.05;
            const std::vector<double> sched = {10, 40, 160, 640, 2560, 10240};
            const EnvelopeResult a = envelope_penalized(omega1, ga, sched);
            const EnvelopeResult b = envelope_penalized(omega1, gb, sched);
            return (a.P - b.P).max();
          });

  // The n=1 benchmark: g = 0.2 cos(2 pi x), lambda to 1e4.
  const ScalarField bench_g = cosine_field(g1, 0, 1, 0.2);
  EnvelopeResult bench;
  bool bench_ok = true;
  try {
    bench = envelope_penalized(omega1, bench_g, default_lambda_schedule());
  } catch (const std::exception&) {
    bench_ok = false;
  }

  rec.run("envelope.030_benchmark_oracle_agreement",
          "penalized envelope matches the obstacle oracle", "oracle", "<=", 0.0, [&] {
            if (!bench_ok) return 1.0;
            const ScalarField oracle = envelope_obstacle_oracle(omega1, bench_g);
            const double lam = bench.lambda_trace.back().lambda;
            const double bound = 5.0 * std::log(lam) / lam + 1e-4;
            return (bench.P - oracle).sup_abs() - bound;
          });

  rec.run("envelope.031_sandwich", "barrier certificates hold at every lambda", "theory",
          "<=", 1e-8, [&] {
            if (!bench_ok) return 1.0;
            double worst = 0.0;
            for (const EnvelopeStep& s : bench.lambda_trace)
              worst = std::max({worst, s.lower_violation, s.upper_violation});
            return worst;
          });

  rec.run("envelope.032_contact_set",
          "contact set contains x = 1/2 and misses x = 0", "oracle", "<=", 0.5, [&] {
            if (!bench_ok) return 1.0;
            const std::size_t at_half = (static_cast<std::size_t>(g1->res() / 2)) *
                                        static_cast<std::size_t>(g1->res());
            const bool ok = bench.contact_mask[at_half] == 1.0 &&
                            bench.contact_mask[0] == 0.0;
            return ok ? 0.0 : 1.0;
          });

  rec.run("envelope.033_orthogonality_defect",
          "off-contact Monge-Ampere mass is negligible", "oracle", "<=", 1e-4, [&] {
            if (!bench_ok) return 1.0;
            return bench.orthogonality_defect / mass(omega1, bench.P);
          });

  rec.run("envelope.034_defect_monotone",
          "orthogonality defect shrinks along the schedule", "oracle", "<=", 1e-6, [&] {
            if (!bench_ok) return 1.0;
            double worst = 0.0;
            for (std::size_t i = 1; i < bench.lambda_trace.size(); ++i) {
              const double prev = bench.lambda_trace[i - 1].orthogonality_defect;
              const double cur = bench.lambda_trace[i].orthogonality_defect;
              if (prev > 0.0) worst = std::max(worst, cur / prev - 1.0);
            }
            return worst;
          });

  rec.run("envelope.035_psh_and_below_obstacle",
          "P stays below g and keeps omega + ddc(P) nearly positive", "theory", "<=",
          1e-6, [&] {
            if (!bench_ok) return 1.0;
            const double above = (bench.P - bench_g).max();
            const double margin = min_eigenvalue_field(omega1 + ddc(bench.P)).min();
            return std::max(above, -margin);
          });

  rec.run("envelope.040_n2_sandwich", "n=2 penalized envelope satisfies the sandwich",
          "theory", "<=", 1e-8, [&] {
            const HermitianField omega2 = HermitianField::identity(g2);
            const ScalarField g = cosine_field(g2, 0, 1, 0.1);
            const EnvelopeResult env =
                envelope_penalized(omega2, g, {10, 40, 160, 640, 2560});
            double worst = 0.0;
            for (const EnvelopeStep& s : env.lambda_trace)
              worst = std::max({worst, s.lower_violation, s.upper_violation});
            return worst;
          });
}

void degenerate_suite(Recorder& rec, const CheckOptions&) {
  const GridPtr g1 = TorusGrid::make(1, 64);
  const HermitianField omega = HermitianField::identity(g1);
  const HermitianField theta = build_metric(g1, MetricSpec::degenerate_big());

  rec.run("degenerate.010_constant_density_constants",
          "c_j = 1 + eps_j exactly for the unit density", "closed_form", "<=", 1e-10,
          [&] {
            const PathResult path = solve_degenerate(
                theta, omega, ScalarField::constant(g1, 1.0), default_eps_schedule());
            double worst = 0.0;
            for (std::size_t i = 0; i < path.schedule.size(); ++i)
              worst = std::max(worst,
                               std::abs(path.constants_trace[i] - (1.0 + path.schedule[i])));
            return worst;
          });

  rec.run("degenerate.011_nondegenerate_theta",
          "theta = omega gives u = 0 and c = (1+eps)^n", "closed_form", "<=", 1e-9, [&] {
            const PathResult path = solve_degenerate(
                omega, omega, ScalarField::constant(g1, 1.0), {0.5, 0.25, 0.125});
            double worst = 0.0;
            for (std::size_t i = 0; i < path.schedule.size(); ++i) {
              worst = std::max(worst, path.solutions[i].phi.osc());
              worst = std::max(worst,
                               std::abs(path.constants_trace[i] - (1.0 + path.schedule[i])));
            }
            return worst;
          });

  const ScalarField f_mod = [&] {
    std::vector<double> v(g1->point_count());
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = 1.0 + 0.3 * std::cos(kTwoPi * g1->coordinate(i, 0));
    return ScalarField(g1, std::move(v));
  }();

  rec.run("degenerate.020_modulated_constants_low", "c_j stays above 0.5", "oracle", ">=",
          0.5, [&] {
            const PathResult path =
                solve_degenerate(theta, omega, f_mod, default_eps_schedule());
            double low = std::numeric_limits<double>::infinity();
            for (double c : path.constants_trace) low = std::min(low, c);
            return low;
          });

  rec.run("degenerate.021_modulated_constants_high", "c_j stays below 2.5", "oracle",
          "<=", 2.5, [&] {
            const PathResult path =
                solve_degenerate(theta, omega, f_mod, default_eps_schedule());
            double high = 0.0;
            for (double c : path.constants_trace) high = std::max(high, c);
            return high;
          });

  rec.run("degenerate.022_modulated_osc_bound",
          "sup-normalized potentials stay uniformly bounded", "oracle", "<=",
          kDegenerateOscBound, [&] {
            const PathResult path =
                solve_degenerate(theta, omega, f_mod, default_eps_schedule());
            double worst = 0.0;
            for (const MASolution& s : path.solutions)
              worst = std::max(worst, s.diagnostics.osc_phi);
            return worst;
          });

  rec.run("degenerate.023_l1_cauchy",
          "successive L1 differences decrease over the last three steps", "oracle", "<=",
          1e-12, [&] {
            const PathResult path =
                solve_degenerate(theta, omega, f_mod, default_eps_schedule());
            const std::size_t m = path.solutions.size();
            if (!path.completed || m < 4) return std::numeric_limits<double>::infinity();
            std::vector<double> d;
            for (std::size_t i = m - 3; i < m; ++i) {
              ScalarField diff = path.solutions[i].phi - path.solutions[i - 1].phi;
              std::vector<double> abs_v = diff.copy_values();
              for (double& x : abs_v) x = std::abs(x);
              d.push_back(integrate(ScalarField(g1, std::move(abs_v)), omega));
            }
            return std::max(d[1] - d[0], d[2] - d[1]);
          });
}

void singular_suite(Recorder& rec, const CheckOptions& opt) {
  const GridPtr g1 = TorusGrid::make(1, 64);
  const HermitianField omega = HermitianField::identity(g1);
  const double h = g1->spacing(0);
  const std::vector<double> point{0.5 + h / 2.0, 0.5};

  rec.run("singular.010_smooth_reduction",
          "zero exponents reduce to the smooth constant-unknown solve", "exact", "<=",
          1e-9, [&] {
            FieldSampler sampler(opt.seed + 210);
            const ScalarField smooth = sampler.band_limited(g1, 3, 0.2);
            KltDensitySpec spec;
            spec.points = {point};
            spec.exponents = {0.0};
            spec.smooth_factor = smooth;
            const PathResult path = solve_singular(omega, spec, {h}, 1.5);
            std::vector<double> v(g1->point_count());
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(smooth[i]);
            const MASolution direct = solve_calabi(omega, ScalarField(g1, std::move(v)), 1.5);
            return (path.solutions.back().phi - direct.phi).sup_abs();
          });

  rec.run("singular.011_zero_of_density",
          "positive exponent (density zero) solves to residual target", "oracle", "<=",
          1e-6, [&] {
            KltDensitySpec spec;
            spec.points = {point};
            spec.exponents = {1.0};
            SolverOptions opts;
            opts.tol = 1e-6;
            const PathResult path =
                solve_singular(omega, spec, default_delta_schedule(h), 1.5, opts);
            return path.solutions.back().residual;
          });

  rec.run("singular.012_zero_of_density_smooth",
          "positive-exponent potential is spectrally smooth", "oracle", "<=", 1e-6, [&] {
            KltDensitySpec spec;
            spec.points = {point};
            spec.exponents = {1.0};
            SolverOptions opts;
            opts.tol = 1e-6;
            const PathResult path =
                solve_singular(omega, spec, default_delta_schedule(h), 1.5, opts);
            return path.solutions.back().diagnostics.spectral_tail;
          });

  rec.run("singular.020_negative_exponent_bounded",
          "a = -0.5 potentials stay uniformly bounded along delta", "oracle", "<=",
          kSingularOscBound, [&] {
            KltDensitySpec spec;
            spec.points = {point};
            spec.exponents = {-0.5};
            SolverOptions opts;
            opts.tol = 1e-6;
            const PathResult path =
                solve_singular(omega, spec, default_delta_schedule(h), 1.5, opts);
            double worst = 0.0;
            for (const MASolution& s : path.solutions)
              worst = std::max(worst, s.diagnostics.osc_phi);
            return worst;
          });

  rec.run("singular.021_off_singular_stability",
          "iterates agree away from the singular point", "oracle", "<=", 1e-5, [&] {
            KltDensitySpec spec;
            spec.points = {point};
            spec.exponents = {-0.5};
            SolverOptions opts;
            opts.tol = 1e-6;
            const PathResult path =
                solve_singular(omega, spec, default_delta_schedule(h), 1.5, opts);
            const ScalarField& a = path.solutions[path.solutions.size() - 2].phi;
            const ScalarField& b = path.solutions.back().phi;
            double worst = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
              double d2 = 0.0;
              for (int ax = 0; ax < 2; ++ax) {
                double d = std::abs(g1->coordinate(i, ax) - point[static_cast<size_t>(ax)]);
                d = std::min(d, 1.0 - d);
                d2 += d * d;
              }
              if (std::sqrt(d2) > 0.2) worst = std::max(worst, std::abs(a[i] - b[i]));
            }
            return worst;
          });

  rec.run("singular.030_klt_violation",
          "an exponent outside the L^p range raises the integrability error", "exact",
          "<=", 0.5, [&] {
            KltDensitySpec spec;
            spec.points = {point};
            spec.exponents = {-0.5};
            try {
              (void)solve_singular(omega, spec, {h}, 2.5);
            } catch (const Error& e) {
              return e.code() == ErrorCode::klt_violation ? 0.0 : 1.0;
            }
            return 1.0;
          });
}

}  // namespace

CheckReport run_checks(const std::string& suite, CheckOptions options) {
  CheckReport report;
  report.suite = suite;
  report.seed = options.seed;
  Recorder rec{report, options.record_timings};

  if (suite != "smooth" && suite != "envelope" && suite != "degenerate" &&
      suite != "singular" && suite != "all")
    fail(ErrorCode::config, "unknown suite '" + suite + "'");

  if (suite == "smooth" || suite == "all") smooth_suite(rec, options);
  if (suite == "envelope" || suite == "all") envelope_suite(rec, options);
  if (suite == "degenerate" || suite == "all") degenerate_suite(rec, options);
  if (suite == "singular" || suite == "all") singular_suite(rec, options);

  std::sort(report.checks.begin(), report.checks.end(),
            [](const CheckRecord& a, const CheckRecord& b) { return a.id < b.id; });
  report.overall_pass = !report.checks.empty();
  for (const CheckRecord& c : report.checks) report.overall_pass &= c.pass;
  return report;
}

CheckReport run_checks(const std::string& suite) { return run_checks(suite, CheckOptions{}); }

std::string report_to_json(const CheckReport& report, bool include_timings) {
  nlohmann::json j;
  j["suite"] = report.suite;
  j["seed"] = report.seed;
  j["overall_pass"] = report.overall_pass;
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckRecord& c : report.checks) {
    nlohmann::json e;
    e["id"] = c.id;
    e["description"] = c.description;
    e["provenance"] = c.provenance;
    e["measured"] = c.measured;
    e["threshold"] = c.threshold;
    e["comparison"] = c.comparison;
    e["pass"] = c.pass;
    if (include_timings) e["wall_time_s"] = c.wall_time_s;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  return j.dump(2);
}

}  // namespace cyma
