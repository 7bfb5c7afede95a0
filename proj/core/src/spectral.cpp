#include "cyma/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "cyma/errors.hpp"

namespace cyma {

namespace {
// The FFTW planner mutates global state; serialize plan creation/destruction.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct SpectralWorkspace::Impl {
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  std::vector<complex_t> in;
  std::vector<complex_t> out;
  // Cached per-mode Hessian multipliers, keyed by j*n+k.
  std::map<int, std::vector<complex_t>> hessian;
  std::vector<double> flat_lap;
};

SpectralWorkspace::SpectralWorkspace(GridPtr grid)
    : grid_(std::move(grid)), impl_(std::make_unique<Impl>()) {
  const std::size_t npts = grid_->point_count();
  impl_->in.resize(npts);
  impl_->out.resize(npts);
  const int rank = grid_->real_dim();
  std::vector<int> dims(static_cast<size_t>(rank), grid_->res());
  std::lock_guard<std::mutex> lock(planner_mutex());
  impl_->fwd = fftw_plan_dft(rank, dims.data(),
                             reinterpret_cast<fftw_complex*>(impl_->in.data()),
                             reinterpret_cast<fftw_complex*>(impl_->out.data()),
                             FFTW_FORWARD, FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft(rank, dims.data(),
                             reinterpret_cast<fftw_complex*>(impl_->in.data()),
                             reinterpret_cast<fftw_complex*>(impl_->out.data()),
                             FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!impl_->fwd || !impl_->inv) fail(ErrorCode::io_failure, "FFT plan creation failed");
}

SpectralWorkspace::~SpectralWorkspace() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (impl_->fwd) fftw_destroy_plan(impl_->fwd);
  if (impl_->inv) fftw_destroy_plan(impl_->inv);
}

void SpectralWorkspace::forward(std::span<const double> values,
                                std::vector<complex_t>& spectrum) {
  const std::size_t npts = grid_->point_count();
  for (std::size_t i = 0; i < npts; ++i) impl_->in[i] = complex_t(values[i], 0.0);
  spectrum.resize(npts);
  fftw_execute_dft(impl_->fwd, reinterpret_cast<fftw_complex*>(impl_->in.data()),
                   reinterpret_cast<fftw_complex*>(spectrum.data()));
}

void SpectralWorkspace::forward(std::span<const complex_t> values,
                                std::vector<complex_t>& spectrum) {
  const std::size_t npts = grid_->point_count();
  std::copy(values.begin(), values.end(), impl_->in.begin());
  spectrum.resize(npts);
  fftw_execute_dft(impl_->fwd, reinterpret_cast<fftw_complex*>(impl_->in.data()),
                   reinterpret_cast<fftw_complex*>(spectrum.data()));
}

void SpectralWorkspace::inverse(std::span<const complex_t> spectrum,
                                std::vector<double>& values) {
  const std::size_t npts = grid_->point_count();
  std::copy(spectrum.begin(), spectrum.end(), impl_->in.begin());
  fftw_execute_dft(impl_->inv, reinterpret_cast<fftw_complex*>(impl_->in.data()),
                   reinterpret_cast<fftw_complex*>(impl_->out.data()));
  values.resize(npts);
  const double scale = 1.0 / static_cast<double>(npts);
  for (std::size_t i = 0; i < npts; ++i) values[i] = impl_->out[i].real() * scale;
}

void SpectralWorkspace::inverse(std::span<const complex_t> spectrum,
                                std::vector<complex_t>& values) {
  const std::size_t npts = grid_->point_count();
  std::copy(spectrum.begin(), spectrum.end(), impl_->in.begin());
  fftw_execute_dft(impl_->inv, reinterpret_cast<fftw_complex*>(impl_->in.data()),
                   reinterpret_cast<fftw_complex*>(impl_->out.data()));
  values.resize(npts);
  const double scale = 1.0 / static_cast<double>(npts);
  for (std::size_t i = 0; i < npts; ++i) values[i] = impl_->out[i] * scale;
}

int SpectralWorkspace::frequency(std::size_t flat_index, int axis) const {
  const int res = grid_->res();
  std::size_t stride = 1;
  for (int a = grid_->real_dim() - 1; a > axis; --a) stride *= static_cast<std::size_t>(res);
  int k = static_cast<int>((flat_index / stride) % static_cast<std::size_t>(res));
  if (k > res / 2) k -= res;
  if (k == res / 2) k = 0;  // drop the unpaired Nyquist line
  return k;
}

int SpectralWorkspace::true_frequency(std::size_t flat_index, int axis) const {
  const int res = grid_->res();
  std::size_t stride = 1;
  for (int a = grid_->real_dim() - 1; a > axis; --a) stride *= static_cast<std::size_t>(res);
  int k = static_cast<int>((flat_index / stride) % static_cast<std::size_t>(res));
  if (k > res / 2) k -= res;
  return k;  // Nyquist reported as +res/2
}

const std::vector<complex_t>& SpectralWorkspace::hessian_multiplier(int j, int k) {
  const int n = grid_->n();
  const int key = j * n + k;
  auto it = impl_->hessian.find(key);
  if (it != impl_->hessian.end()) return it->second;

  // d/dz_j   = (d/dx_j - i d/dy_j)/2  -> (i kx_j + ky_j)/2 per plane wave,
  // d/dzbar_k = (d/dx_k + i d/dy_k)/2 -> (i kx_k - ky_k)/2,
  // and the Hessian entry carries the normalization factor 2.
  //
  // Diagonal entries are pure second derivatives; their symbol is kept at the
  // Nyquist line (the sampled Nyquist cosine has a representable second
  // derivative), which keeps the Chern Laplacian negative definite on every
  // nonconstant mode. Mixed entries have no consistent Nyquist extension and
  // drop that line.
  const std::size_t npts = grid_->point_count();
  std::vector<complex_t> mult(npts);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t idx = 0; idx < npts; ++idx) {
    if (j == k) {
      const double kx = two_pi * true_frequency(idx, 2 * j) / grid_->period(2 * j);
      const double ky = two_pi * true_frequency(idx, 2 * j + 1) / grid_->period(2 * j + 1);
      mult[idx] = complex_t(-0.5 * (kx * kx + ky * ky), 0.0);
    } else {
      const double kxj = two_pi * frequency(idx, 2 * j) / grid_->period(2 * j);
      const double kyj = two_pi * frequency(idx, 2 * j + 1) / grid_->period(2 * j + 1);
      const double kxk = two_pi * frequency(idx, 2 * k) / grid_->period(2 * k);
      const double kyk = two_pi * frequency(idx, 2 * k + 1) / grid_->period(2 * k + 1);
      const complex_t dz(kyj * 0.5, kxj * 0.5);
      const complex_t dzbar(-kyk * 0.5, kxk * 0.5);
      mult[idx] = 2.0 * dz * dzbar;
    }
  }
  return impl_->hessian.emplace(key, std::move(mult)).first->second;
}

const std::vector<double>& SpectralWorkspace::flat_laplacian_multiplier() {
  if (!impl_->flat_lap.empty()) return impl_->flat_lap;
  const std::size_t npts = grid_->point_count();
  std::vector<double> mult(npts);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t idx = 0; idx < npts; ++idx) {
    double s = 0.0;
    for (int a = 0; a < grid_->real_dim(); ++a) {
      const double ka = two_pi * true_frequency(idx, a) / grid_->period(a);
      s += ka * ka;
    }
    mult[idx] = -0.5 * s;
  }
  impl_->flat_lap = std::move(mult);
  return impl_->flat_lap;
}

SpectralWorkspace& SpectralWorkspace::local(const GridPtr& grid) {
  struct Key {
    int n;
    int res;
    std::vector<double> periods;
    bool operator<(const Key& o) const {
      if (n != o.n) return n < o.n;
      if (res != o.res) return res < o.res;
      return periods < o.periods;
    }
  };
  thread_local std::map<Key, std::unique_ptr<SpectralWorkspace>> cache;
  Key key{grid->n(), grid->res(), grid->periods()};
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(std::move(key), std::make_unique<SpectralWorkspace>(grid)).first;
  return *it->second;
}

}  // namespace cyma
