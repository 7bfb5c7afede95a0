#include "cyma/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cyma/errors.hpp"

namespace cyma {

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* what) {
  if (!a.same_layout(b)) fail(ErrorCode::grid_mismatch, std::string("grid mismatch in ") + what);
}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) fail(ErrorCode::invalid_field, "scalar field without a grid");
  if (values_.size() != grid_->point_count())
    fail(ErrorCode::invalid_field, "scalar field length does not match the grid");
  for (double v : values_)
    if (!std::isfinite(v)) fail(ErrorCode::invalid_field, "scalar field holds non-finite values");
}

ScalarField ScalarField::constant(GridPtr grid, double value) {
  std::vector<double> v(grid->point_count(), value);
  return ScalarField(std::move(grid), std::move(v));
}

ScalarField ScalarField::sample(
    GridPtr grid, const std::function<double(std::span<const double>)>& fn) {
  const int dim = grid->real_dim();
  std::vector<double> coords(static_cast<size_t>(dim));
  std::vector<double> v(grid->point_count());
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (int a = 0; a < dim; ++a) coords[static_cast<size_t>(a)] = grid->coordinate(i, a);
    v[i] = fn(coords);
  }
  return ScalarField(std::move(grid), std::move(v));
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}
double ScalarField::osc() const { return max() - min(); }
double ScalarField::sup_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

ScalarField ScalarField::operator+(const ScalarField& other) const {
  require_same_grid(*grid_, other.grid(), "scalar sum");
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] + other.values_[i];
  return ScalarField(grid_, std::move(v));
}

ScalarField ScalarField::operator-(const ScalarField& other) const {
  require_same_grid(*grid_, other.grid(), "scalar difference");
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] - other.values_[i];
  return ScalarField(grid_, std::move(v));
}

ScalarField ScalarField::operator*(double s) const {
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] * s;
  return ScalarField(grid_, std::move(v));
}

ScalarField ScalarField::operator+(double s) const {
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] + s;
  return ScalarField(grid_, std::move(v));
}

namespace {
constexpr double kHermitianTol = 1e-12;
}

HermitianField::HermitianField(GridPtr grid, std::vector<complex_t> coeffs, Positivity tag)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)), tag_(tag) {
  if (!grid_) fail(ErrorCode::invalid_field, "hermitian field without a grid");
  const int n = grid_->n();
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  if (coeffs_.size() != grid_->point_count() * nn)
    fail(ErrorCode::invalid_field, "hermitian field length does not match the grid");
  for (const complex_t& c : coeffs_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      fail(ErrorCode::invalid_field, "hermitian field holds non-finite values");
  // Verify A = A^* to tolerance, then symmetrize so downstream algebra sees
  // exactly Hermitian blocks.
  for (std::size_t p = 0; p < grid_->point_count(); ++p) {
    complex_t* a = coeffs_.data() + p * nn;
    for (int j = 0; j < n; ++j) {
      complex_t& d = a[static_cast<size_t>(j) * n + j];
      if (std::abs(d.imag()) > kHermitianTol)
        fail(ErrorCode::invalid_field, "hermitian field has a non-real diagonal entry");
      d = complex_t(d.real(), 0.0);
      for (int k = j + 1; k < n; ++k) {
        complex_t& u = a[static_cast<size_t>(j) * n + k];
        complex_t& l = a[static_cast<size_t>(k) * n + j];
        if (std::abs(u - std::conj(l)) > kHermitianTol)
          fail(ErrorCode::invalid_field, "hermitian field is not conjugate-symmetric");
        const complex_t avg = 0.5 * (u + std::conj(l));
        u = avg;
        l = std::conj(avg);
      }
    }
  }
}

HermitianField HermitianField::constant(GridPtr grid, std::span<const complex_t> block,
                                        Positivity tag) {
  const std::size_t nn = static_cast<std::size_t>(grid->n()) * grid->n();
  if (block.size() != nn) fail(ErrorCode::invalid_field, "constant block has wrong size");
  std::vector<complex_t> c(grid->point_count() * nn);
  for (std::size_t p = 0; p < grid->point_count(); ++p)
    std::copy(block.begin(), block.end(), c.begin() + static_cast<std::ptrdiff_t>(p * nn));
  return HermitianField(std::move(grid), std::move(c), tag);
}

HermitianField HermitianField::identity(GridPtr grid) {
  const int n = grid->n();
  std::vector<complex_t> block(static_cast<size_t>(n) * n, complex_t(0.0, 0.0));
  for (int j = 0; j < n; ++j) block[static_cast<size_t>(j) * n + j] = complex_t(1.0, 0.0);
  return constant(std::move(grid), block, Positivity::positive);
}

HermitianField HermitianField::with_tag(Positivity tag) const {
  HermitianField out = *this;
  out.tag_ = tag;
  return out;
}

HermitianField HermitianField::operator+(const HermitianField& other) const {
  require_same_grid(*grid_, other.grid(), "hermitian sum");
  std::vector<complex_t> c(coeffs_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = coeffs_[i] + other.coeffs_[i];
  return HermitianField(grid_, std::move(c));
}

HermitianField HermitianField::operator*(double s) const {
  std::vector<complex_t> c(coeffs_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = coeffs_[i] * s;
  return HermitianField(grid_, std::move(c), tag_);
}

HermitianField HermitianField::scaled_by(const ScalarField& h) const {
  require_same_grid(*grid_, h.grid(), "conformal scaling");
  const std::size_t nn = block_size();
  std::vector<complex_t> c(coeffs_.size());
  for (std::size_t p = 0; p < grid_->point_count(); ++p)
    for (std::size_t e = 0; e < nn; ++e) c[p * nn + e] = coeffs_[p * nn + e] * h[p];
  return HermitianField(grid_, std::move(c));
}

}  // namespace cyma
