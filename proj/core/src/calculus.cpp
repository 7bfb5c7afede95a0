#include "cyma/calculus.hpp"

#include <cmath>

#include "cyma/errors.hpp"
#include "cyma/spectral.hpp"

namespace cyma {

namespace linalg {

double det(std::span<const complex_t> a, int n) {
  if (n == 1) return a[0].real();
  // Hermitian 2x2: real diagonal, conjugate off-diagonal.
  return a[0].real() * a[3].real() - std::norm(a[1]);
}

double trace_of_inverse_product(std::span<const complex_t> a,
                                std::span<const complex_t> b, int n) {
  const double da = det(a, n);
  if (std::abs(da) < 1e-300) fail(ErrorCode::singular_matrix, "singular coefficient matrix");
  if (n == 1) return b[0].real() / da;
  // tr(inv(A) B) = tr(adj(A) B)/det(A) with adj([[a,b],[c,d]]) = [[d,-b],[-c,a]].
  const complex_t t = a[3] * b[0] - a[1] * b[2] - a[2] * b[1] + a[0] * b[3];
  return t.real() / da;
}

double min_eigenvalue(std::span<const complex_t> a, int n) {
  if (n == 1) return a[0].real();
  const double p = a[0].real();
  const double q = a[3].real();
  const double mid = 0.5 * (p + q);
  const double rad = std::hypot(0.5 * (p - q), std::abs(a[1]));
  return mid - rad;
}

}  // namespace linalg

HermitianField ddc(const ScalarField& phi) {
  const GridPtr grid = phi.grid_ptr();
  const int n = grid->n();
  const std::size_t npts = grid->point_count();
  const std::size_t nn = static_cast<std::size_t>(n) * n;

  SpectralWorkspace& ws = SpectralWorkspace::local(grid);
  std::vector<complex_t> spectrum;
  ws.forward(phi.values(), spectrum);

  std::vector<complex_t> coeffs(npts * nn);
  std::vector<complex_t> mode(npts);
  std::vector<double> real_out;
  std::vector<complex_t> cplx_out;
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      const auto& mult = ws.hessian_multiplier(j, k);
      for (std::size_t i = 0; i < npts; ++i) mode[i] = spectrum[i] * mult[i];
      if (j == k) {
        // Diagonal entries of the complex Hessian of a real field are real.
        ws.inverse(mode, real_out);
        for (std::size_t i = 0; i < npts; ++i)
          coeffs[i * nn + static_cast<std::size_t>(j) * n + j] = complex_t(real_out[i], 0.0);
      } else {
        ws.inverse(mode, cplx_out);
        for (std::size_t i = 0; i < npts; ++i) {
          coeffs[i * nn + static_cast<std::size_t>(j) * n + k] = cplx_out[i];
          coeffs[i * nn + static_cast<std::size_t>(k) * n + j] = std::conj(cplx_out[i]);
        }
      }
    }
  }
  return HermitianField(grid, std::move(coeffs));
}

ScalarField ddc_form_scalar(const HermitianField& eta) {
  const GridPtr grid = eta.grid_ptr();
  const std::size_t npts = grid->point_count();
  if (grid->n() == 1) return ScalarField::constant(grid, 0.0);

  SpectralWorkspace& ws = SpectralWorkspace::local(grid);
  std::vector<complex_t> entry(npts), spectrum(npts), mode(npts), out(npts);
  std::vector<double> scalar(npts, 0.0);

  // Pattern (entry jk, derivative pair lm) entering the top-degree scalar:
  // +d_{z2 zbar2} eta_11, +d_{z1 zbar1} eta_22, -d_{z2 zbar1} eta_12,
  // -d_{z1 zbar2} eta_21. Derivative multipliers carry a factor 2 (they are
  // Hessian-normalized), so halve at the end.
  struct Term {
    int ej, ek;  // matrix entry
    int dj, dk;  // z / zbar derivative axes
    double sign;
  };
  const Term terms[] = {
      {0, 0, 1, 1, +1.0}, {1, 1, 0, 0, +1.0}, {0, 1, 1, 0, -1.0}, {1, 0, 0, 1, -1.0}};
  for (const Term& t : terms) {
    for (std::size_t i = 0; i < npts; ++i)
      entry[i] = eta.block(i)[static_cast<std::size_t>(t.ej) * 2 + t.ek];
    ws.forward(entry, spectrum);
    const auto& mult = ws.hessian_multiplier(t.dj, t.dk);
    for (std::size_t i = 0; i < npts; ++i) mode[i] = spectrum[i] * mult[i];
    ws.inverse(mode, out);
    for (std::size_t i = 0; i < npts; ++i) scalar[i] += t.sign * 0.5 * out[i].real();
  }
  return ScalarField(grid, std::move(scalar));
}

double closedness_defect(const HermitianField& omega) {
  if (omega.grid().n() == 1) return 0.0;
  return ddc_form_scalar(omega).sup_abs();
}

double integrate(const ScalarField& s, const HermitianField& vol) {
  require_same_grid(s.grid(), vol.grid(), "integrate");
  const int n = vol.grid().n();
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) acc += s[i] * linalg::det(vol.block(i), n);
  return acc * vol.grid().cell_volume();
}

double total_volume(const HermitianField& vol) {
  const int n = vol.grid().n();
  double acc = 0.0;
  for (std::size_t i = 0; i < vol.grid().point_count(); ++i)
    acc += linalg::det(vol.block(i), n);
  return acc * vol.grid().cell_volume();
}

ScalarField min_eigenvalue_field(const HermitianField& a) {
  const int n = a.grid().n();
  std::vector<double> v(a.grid().point_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = linalg::min_eigenvalue(a.block(i), n);
  return ScalarField(a.grid_ptr(), std::move(v));
}

ScalarField determinant_field(const HermitianField& a) {
  const int n = a.grid().n();
  std::vector<double> v(a.grid().point_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = linalg::det(a.block(i), n);
  return ScalarField(a.grid_ptr(), std::move(v));
}

double spectral_tail(const ScalarField& phi) {
  const GridPtr grid = phi.grid_ptr();
  SpectralWorkspace& ws = SpectralWorkspace::local(grid);
  std::vector<complex_t> spectrum;
  ws.forward(phi.values(), spectrum);
  const int res = grid->res();
  const int cutoff = res / 3;
  double total = 0.0, tail = 0.0;
  for (std::size_t i = 1; i < spectrum.size(); ++i) {
    // True frequency magnitude per axis (Nyquist reported as res/2, not 0).
    int fmax = 0;
    std::size_t rest = i;
    for (int a = grid->real_dim() - 1; a >= 0; --a) {
      int k = static_cast<int>(rest % static_cast<std::size_t>(res));
      rest /= static_cast<std::size_t>(res);
      if (k > res / 2) k -= res;
      fmax = std::max(fmax, std::abs(k));
    }
    const double e = std::norm(spectrum[i]);
    total += e;
    if (fmax > cutoff) tail += e;
  }
  (void)ws;
  if (total <= 0.0) return 0.0;
  return tail / total;
}

}  // namespace cyma
