#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "cyma/grid.hpp"

namespace cyma {

using complex_t = std::complex<double>;

/// FFT workspace bound to one grid layout. Forward/inverse transforms share
/// internal buffers, so a workspace must not be used from two threads at
/// once; `SpectralWorkspace::local(grid)` hands out one instance per thread.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(GridPtr grid);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  const TorusGrid& grid() const { return *grid_; }

  /// Unnormalized forward DFT of a real field.
  void forward(std::span<const double> values, std::vector<complex_t>& spectrum);
  /// Unnormalized forward DFT of a complex field.
  void forward(std::span<const complex_t> values, std::vector<complex_t>& spectrum);
  /// Inverse DFT including the 1/N normalization; writes the real part.
  void inverse(std::span<const complex_t> spectrum, std::vector<double>& values);
  void inverse(std::span<const complex_t> spectrum, std::vector<complex_t>& values);

  /// Signed integer frequency of `index` on `axis` (FFTW ordering); the
  /// Nyquist line is reported as 0 so odd-order derivative factors vanish there.
  int frequency(std::size_t flat_index, int axis) const;
  /// Same, but the Nyquist line keeps its value res/2 (for even symbols).
  int true_frequency(std::size_t flat_index, int axis) const;

  /// Multiplier of 2 d/dz_j d/dzbar_k at each mode: the (j,k) entry of the
  /// complex Hessian of a plane wave. j, k index complex axes (0-based).
  const std::vector<complex_t>& hessian_multiplier(int j, int k);

  /// Multiplier of the flat Chern Laplacian sum_j 2 d/dz_j d/dzbar_j
  /// (equals half the full real Laplacian symbol, always <= 0).
  const std::vector<double>& flat_laplacian_multiplier();

  /// Workspace for the calling thread (creates/caches one per grid layout).
  static SpectralWorkspace& local(const GridPtr& grid);

 private:
  struct Impl;
  GridPtr grid_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cyma
