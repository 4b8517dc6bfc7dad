#include "funcest/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "funcest/numeric.hpp"

namespace funcest {

GridFunction::GridFunction(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("GridFunction: at least one cell required");
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("GridFunction: non-finite cell value");
  }
}

GridFunction GridFunction::constant(std::size_t cells, double value) {
  return GridFunction(std::vector<double>(cells, value));
}

std::size_t GridFunction::cell_of(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("GridFunction: point outside [0,1]");
  const auto k = static_cast<std::size_t>(x * static_cast<double>(values_.size()));
  return std::min(k, values_.size() - 1);
}

GridFunction GridFunction::refined(std::size_t factor) const {
  if (factor == 0) throw std::invalid_argument("GridFunction::refined: factor must be positive");
  std::vector<double> out;
  out.reserve(values_.size() * factor);
  for (double v : values_) out.insert(out.end(), factor, v);
  return GridFunction(std::move(out));
}

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }

double integral(const GridFunction& f) { return compensated_sum(f.values()) * f.cell_width(); }

double integral_product(const GridFunction& f, const GridFunction& g) {
  if (f.cells() != g.cells()) throw std::invalid_argument("integral_product: grid mismatch");
  return dot(f.values(), g.values()) * f.cell_width();
}

double l2sq_distance(const GridFunction& f, const GridFunction& g) {
  if (f.cells() != g.cells()) throw std::invalid_argument("l2sq_distance: grid mismatch");
  return squared_distance(f.values(), g.values()) * f.cell_width();
}

void align_grids(GridFunction& f, GridFunction& g) {
  const std::size_t common = std::lcm(f.cells(), g.cells());
  if (f.cells() != common) f = f.refined(common / f.cells());
  if (g.cells() != common) g = g.refined(common / g.cells());
}

}  // namespace funcest
