#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "cyma/grid.hpp"

namespace cyma {

using complex_t = std::complex<double>;

/// Real grid function (a potential phi, a density f, an obstacle g, ...).
/// Fields are immutable after construction and safe to share across threads.
class ScalarField {
 public:
  ScalarField() = default;
  /// Takes ownership of `values` (row-major, one entry per grid point).
  ScalarField(GridPtr grid, std::vector<double> values);
  /// Constant field.
  static ScalarField constant(GridPtr grid, double value);
  /// Samples `fn(point coordinates)` at every node.
  static ScalarField sample(GridPtr grid,
                            const std::function<double(std::span<const double>)>& fn);

  const TorusGrid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double min() const;
  double max() const;
  double mean() const;
  /// max - min over the grid.
  double osc() const;
  double sup_abs() const;

  ScalarField operator+(const ScalarField& other) const;
  ScalarField operator-(const ScalarField& other) const;
  ScalarField operator*(double s) const;
  /// Pointwise shift by a constant.
  ScalarField operator+(double s) const;

  /// Copy of the raw values for callers that need to edit and rebuild.
  std::vector<double> copy_values() const { return values_; }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Tags describing which positivity class a coefficient field belongs to.
enum class Positivity { none, semipositive, positive };

/// Grid of n x n Hermitian matrices A, representing the real (1,1)-form
/// sum_{j,k} i A_{jk} dz_j ^ dzbar_k. Storage is point-major, each point
/// holding n^2 complex entries row-major in (j,k).
class HermitianField {
 public:
  HermitianField() = default;
  /// Takes ownership of `coeffs` (point-major n^2 blocks); verifies finiteness
  /// and Hermitian symmetry to 1e-12, then symmetrizes exactly.
  HermitianField(GridPtr grid, std::vector<complex_t> coeffs,
                 Positivity tag = Positivity::none);

  /// Constant coefficient matrix (row-major n x n block).
  static HermitianField constant(GridPtr grid, std::span<const complex_t> block,
                                 Positivity tag = Positivity::none);
  static HermitianField identity(GridPtr grid);

  const TorusGrid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  std::span<const complex_t> coeffs() const { return coeffs_; }
  /// Matrix block of point `i`.
  std::span<const complex_t> block(std::size_t i) const {
    const std::size_t nn = static_cast<std::size_t>(grid_->n()) * grid_->n();
    return {coeffs_.data() + i * nn, nn};
  }
  std::size_t block_size() const {
    return static_cast<std::size_t>(grid_->n()) * grid_->n();
  }
  Positivity tag() const { return tag_; }
  HermitianField with_tag(Positivity tag) const;

  HermitianField operator+(const HermitianField& other) const;
  HermitianField operator*(double s) const;
  /// Pointwise product h(x) * A(x) with a real scalar field.
  HermitianField scaled_by(const ScalarField& h) const;

 private:
  GridPtr grid_;
  std::vector<complex_t> coeffs_;
  Positivity tag_ = Positivity::none;
};

/// Throws invalid_field when operands live on different grids.
void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* what);

}  // namespace cyma
