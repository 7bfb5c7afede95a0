#include "cyma/grid.hpp"

#include <cmath>
#include <string>

#include "cyma/errors.hpp"

namespace cyma {

namespace {

bool power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

TorusGrid::TorusGrid(int n, int res, std::vector<double> periods)
    : n_(n), res_(res), periods_(std::move(periods)) {
  points_ = 1;
  cell_volume_ = 1.0;
  for (int axis = 0; axis < real_dim(); ++axis) {
    points_ *= static_cast<std::size_t>(res_);
    cell_volume_ *= spacing(axis);
  }
}

std::shared_ptr<const TorusGrid> TorusGrid::make(int n, int res, double period) {
  return make(n, res, std::vector<double>(static_cast<size_t>(2 * n), period));
}

std::shared_ptr<const TorusGrid> TorusGrid::make(int n, int res,
                                                 std::vector<double> periods) {
  if (n != 1 && n != 2) fail(ErrorCode::unsupported_spec, "complex dimension must be 1 or 2");
  if (res < 8) fail(ErrorCode::unsupported_spec, "grid resolution must be at least 8");
  if (!power_of_two(res)) fail(ErrorCode::unsupported_spec, "grid resolution must be a power of two");
  if (periods.size() != static_cast<size_t>(2 * n))
    fail(ErrorCode::unsupported_spec, "expected one period per real axis");
  for (double p : periods)
    if (!(p > 0.0) || !std::isfinite(p))
      fail(ErrorCode::unsupported_spec, "periods must be positive finite reals");
  return std::shared_ptr<const TorusGrid>(new TorusGrid(n, res, std::move(periods)));
}

double TorusGrid::coordinate(std::size_t index, int axis) const {
  // Row-major with last axis fastest: axis a has stride res^(real_dim-1-a).
  std::size_t stride = 1;
  for (int a = real_dim() - 1; a > axis; --a) stride *= static_cast<std::size_t>(res_);
  std::size_t k = (index / stride) % static_cast<std::size_t>(res_);
  return static_cast<double>(k) * spacing(axis);
}

bool TorusGrid::same_layout(const TorusGrid& other) const noexcept {
  return n_ == other.n_ && res_ == other.res_ && periods_ == other.periods_;
}

}  // namespace cyma
