#include "cyma/ma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cyma/calculus.hpp"
#include "cyma/errors.hpp"
#include "cyma/spectral.hpp"

namespace cyma {

namespace {

HermitianField add_fields(const HermitianField& a, const HermitianField& b) {
  return a + b;
}

}  // namespace

DensityRatio ma_density_from_hessian(const HermitianField& omega,
                                     const HermitianField& hessian) {
  require_same_grid(omega.grid(), hessian.grid(), "ma_density");
  const int n = omega.grid().n();
  const std::size_t npts = omega.grid().point_count();
  const HermitianField perturbed = add_fields(omega, hessian);

  std::vector<double> ratio(npts);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < npts; ++i) {
    const auto gp = perturbed.block(i);
    ratio[i] = linalg::det(gp, n) / linalg::det(omega.block(i), n);
    margin = std::min(margin, linalg::min_eigenvalue(gp, n));
  }
  return {ScalarField(omega.grid_ptr(), std::move(ratio)), margin};
}

DensityRatio ma_density(const HermitianField& omega, const ScalarField& phi) {
  require_same_grid(omega.grid(), phi.grid(), "ma_density");
  return ma_density_from_hessian(omega, ddc(phi));
}

ScalarField linearized_ma(const HermitianField& omega, const ScalarField& phi,
                          const ScalarField& chi) {
  require_same_grid(omega.grid(), phi.grid(), "linearized_ma");
  require_same_grid(omega.grid(), chi.grid(), "linearized_ma");
  const int n = omega.grid().n();
  const std::size_t npts = omega.grid().point_count();

  const HermitianField perturbed = add_fields(omega, ddc(phi));
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < npts; ++i)
    margin = std::min(margin, linalg::min_eigenvalue(perturbed.block(i), n));
  if (margin <= 1e-12)
    fail(ErrorCode::singular_matrix, "linearization requested at a non-positive form");

  const HermitianField h_chi = ddc(chi);
  std::vector<double> out(npts);
  for (std::size_t i = 0; i < npts; ++i)
    out[i] = linalg::trace_of_inverse_product(perturbed.block(i), h_chi.block(i), n);
  return ScalarField(omega.grid_ptr(), std::move(out));
}

double mass(const HermitianField& omega, const ScalarField& phi) {
  require_same_grid(omega.grid(), phi.grid(), "mass");
  const int n = omega.grid().n();
  const HermitianField perturbed = add_fields(omega, ddc(phi));
  double acc = 0.0;
  for (std::size_t i = 0; i < omega.grid().point_count(); ++i)
    acc += linalg::det(perturbed.block(i), n);
  return acc * omega.grid().cell_volume();
}

namespace {

// Projection onto mean-zero.
void project_mean_zero(std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  for (double& x : v) x -= m;
}

// L(h) = scalar(ddc(h * omega)) as raw vectors, n = 2 only.
std::vector<double> apply_gauduchon_op(const HermitianField& omega,
                                       const std::vector<double>& h) {
  ScalarField hf(omega.grid_ptr(), h);
  return ddc_form_scalar(omega.scaled_by(hf)).copy_values();
}

// Adjoint of L in the plain L^2 pairing: L*(s) = sum_jk conj(pattern) --
// realized by the same derivative pattern with swapped derivative axes
// applied to s, contracted against the metric coefficients.
std::vector<double> apply_gauduchon_adjoint(const HermitianField& omega,
                                            const std::vector<double>& s) {
  const GridPtr grid = omega.grid_ptr();
  SpectralWorkspace& ws = SpectralWorkspace::local(grid);
  const std::size_t npts = grid->point_count();
  std::vector<complex_t> spectrum;
  ws.forward(std::span<const double>(s), spectrum);

  // (d_{zj} d_{zbar k})^* = d_{zk} d_{zbar j}; contract with conj(entry).
  struct Term {
    int ej, ek;
    int dj, dk;
    double sign;
  };
  const Term terms[] = {
      {0, 0, 1, 1, +1.0}, {1, 1, 0, 0, +1.0}, {0, 1, 1, 0, -1.0}, {1, 0, 0, 1, -1.0}};
  std::vector<complex_t> mode(npts), out(npts);
  std::vector<complex_t> acc(npts, complex_t(0.0, 0.0));
  for (const Term& t : terms) {
    const auto& mult = ws.hessian_multiplier(t.dk, t.dj);  // swapped axes
    for (std::size_t i = 0; i < npts; ++i) mode[i] = spectrum[i] * mult[i];
    ws.inverse(mode, out);
    for (std::size_t i = 0; i < npts; ++i) {
      const complex_t entry = omega.block(i)[static_cast<std::size_t>(t.ej) * 2 + t.ek];
      acc[i] += t.sign * 0.5 * std::conj(entry) * out[i];
    }
  }
  std::vector<double> result(npts);
  for (std::size_t i = 0; i < npts; ++i) result[i] = acc[i].real();
  return result;
}

}  // namespace

ScalarField gauduchon_factor(const HermitianField& omega) {
  const GridPtr grid = omega.grid_ptr();
  if (grid->n() == 1) return ScalarField::constant(grid, 1.0);

  const std::size_t npts = grid->point_count();
  SpectralWorkspace& ws = SpectralWorkspace::local(grid);
  const auto& flat = ws.flat_laplacian_multiplier();

  // Least-squares kernel problem: minimize ||L(1 + w)||^2 over mean-zero w,
  // i.e. CG on P L*L P w = -P L*L 1 with P the mean-zero projector,
  // preconditioned by the squared flat Laplacian (the symbol of L*L when
  // omega is flat).
  auto normal_op = [&](const std::vector<double>& w) {
    std::vector<double> r = apply_gauduchon_adjoint(omega, apply_gauduchon_op(omega, w));
    project_mean_zero(r);
    return r;
  };
  auto precondition = [&](const std::vector<double>& r) {
    std::vector<complex_t> spectrum;
    ws.forward(std::span<const double>(r), spectrum);
    for (std::size_t i = 0; i < npts; ++i) {
      const double sym = flat[i] * flat[i];
      spectrum[i] = (sym > 0.0) ? spectrum[i] / sym : complex_t(0.0, 0.0);
    }
    std::vector<double> out;
    ws.inverse(spectrum, out);
    project_mean_zero(out);
    return out;
  };

  std::vector<double> ones(npts, 1.0);
  std::vector<double> b = apply_gauduchon_adjoint(omega, apply_gauduchon_op(omega, ones));
  project_mean_zero(b);
  for (double& x : b) x = -x;

  std::vector<double> w(npts, 0.0), r = b, z = precondition(r), p = z;
  double rz = 0.0;
  for (std::size_t i = 0; i < npts; ++i) rz += r[i] * z[i];
  const double b_norm = std::sqrt([&] {
    double s = 0.0;
    for (double x : b) s += x * x;
    return s;
  }());
  const double target = std::max(1e-30, 1e-14 * b_norm);
  const int max_iter = 2000;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    double r_norm = 0.0;
    for (double x : r) r_norm += x * x;
    if (std::sqrt(r_norm) <= target) break;
    std::vector<double> ap = normal_op(p);
    double pap = 0.0;
    for (std::size_t i = 0; i < npts; ++i) pap += p[i] * ap[i];
    if (!(pap > 0.0)) break;
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < npts; ++i) {
      w[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    z = precondition(r);
    double rz_new = 0.0;
    for (std::size_t i = 0; i < npts; ++i) rz_new += r[i] * z[i];
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < npts; ++i) p[i] = z[i] + beta * p[i];
  }

  std::vector<double> h(npts);
  for (std::size_t i = 0; i < npts; ++i) h[i] = 1.0 + w[i];
  double mean = 0.0;
  for (double x : h) mean += x;
  mean /= static_cast<double>(npts);
  for (double& x : h) x /= mean;

  ScalarField factor(grid, std::move(h));
  const double residual = ddc_form_scalar(omega.scaled_by(factor)).sup_abs();
  if (residual >= 1e-9 || iter >= max_iter)
    fail(ErrorCode::iteration_limit, "Gauduchon kernel solve did not converge");
  if (factor.min() <= 0.0)
    fail(ErrorCode::positivity, "Gauduchon factor lost positivity");
  return factor;
}

double mixed_amgm_defect(const HermitianField& omega_tilde, const HermitianField& omega_g) {
  require_same_grid(omega_tilde.grid(), omega_g.grid(), "mixed_amgm_defect");
  const int n = omega_tilde.grid().n();
  double slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < omega_tilde.grid().point_count(); ++i) {
    const double tr = linalg::trace_of_inverse_product(omega_g.block(i),
                                                       omega_tilde.block(i), n);
    const double ratio =
        linalg::det(omega_tilde.block(i), n) / linalg::det(omega_g.block(i), n);
    const double geo = n * std::pow(std::max(ratio, 0.0), 1.0 / n);
    slack = std::min(slack, tr - geo);
  }
  return slack;
}

TraceDiagnostics trace_diagnostics(const HermitianField& omega,
                                   const HermitianField& omega_tilde) {
  require_same_grid(omega.grid(), omega_tilde.grid(), "trace_diagnostics");
  const int n = omega.grid().n();
  const std::size_t npts = omega.grid().point_count();
  std::vector<double> fwd(npts), bwd(npts);
  double max_lap = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < npts; ++i) {
    fwd[i] = linalg::trace_of_inverse_product(omega.block(i), omega_tilde.block(i), n);
    bwd[i] = linalg::trace_of_inverse_product(omega_tilde.block(i), omega.block(i), n);
    max_lap = std::max(max_lap, fwd[i] - n);
  }
  return {ScalarField(omega.grid_ptr(), std::move(fwd)),
          ScalarField(omega.grid_ptr(), std::move(bwd)), max_lap};
}

}  // namespace cyma
