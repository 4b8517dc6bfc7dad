#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace funcest {

/// Step function on the uniform partition of [0,1] into N cells. Cell k is
/// [k/N, (k+1)/N); the point 1 belongs to the last cell. Integrals of
/// products of step functions on a shared grid are exact finite sums.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(std::vector<double> values);

  static GridFunction constant(std::size_t cells, double value);

  std::size_t cells() const { return values_.size(); }
  double cell_width() const { return 1.0 / static_cast<double>(values_.size()); }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }
  std::span<const double> values() const { return values_; }

  std::size_t cell_of(double x) const;
  double operator()(double x) const { return values_[cell_of(x)]; }

  /// Same function on a grid with factor-times more cells.
  GridFunction refined(std::size_t factor) const;

  double min() const;
  double max() const;

 private:
  std::vector<double> values_;
};

/// Exact integral over [0,1].
double integral(const GridFunction& f);
/// Exact integral of f*g; grids must match.
double integral_product(const GridFunction& f, const GridFunction& g);
/// Exact squared L2 distance; grids must match.
double l2sq_distance(const GridFunction& f, const GridFunction& g);

/// Refines both functions to a common grid (least common multiple).
void align_grids(GridFunction& f, GridFunction& g);

}  // namespace funcest
