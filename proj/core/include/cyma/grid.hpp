#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace cyma {

/// Uniform periodic grid on the torus C^n / (Z^n + iZ^n), n = 1 or 2.
///
/// Real coordinates are ordered (x_1, y_1, ..., x_n, y_n) with z_j = x_j + i y_j;
/// point storage is row-major over that order with the last axis fastest.
class TorusGrid {
 public:
  /// Validates and builds a grid. `res` is the point count per real axis
  /// (a power of two, >= 8); every axis gets the same `period`.
  static std::shared_ptr<const TorusGrid> make(int n, int res, double period = 1.0);
  static std::shared_ptr<const TorusGrid> make(int n, int res,
                                               std::vector<double> periods);

  int n() const noexcept { return n_; }
  int res() const noexcept { return res_; }
  int real_dim() const noexcept { return 2 * n_; }
  const std::vector<double>& periods() const noexcept { return periods_; }
  double period(int axis) const { return periods_[static_cast<size_t>(axis)]; }
  double spacing(int axis) const { return periods_[static_cast<size_t>(axis)] / res_; }
  /// Volume of one grid cell, Prod_axis (period/res).
  double cell_volume() const noexcept { return cell_volume_; }
  std::size_t point_count() const noexcept { return points_; }

  /// Coordinate of grid node `index` along `axis` (index decoded row-major).
  double coordinate(std::size_t index, int axis) const;

  bool same_layout(const TorusGrid& other) const noexcept;

 private:
  TorusGrid(int n, int res, std::vector<double> periods);

  int n_;
  int res_;
  std::vector<double> periods_;
  std::size_t points_;
  double cell_volume_;
};

using GridPtr = std::shared_ptr<const TorusGrid>;

}  // namespace cyma
