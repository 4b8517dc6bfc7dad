#include "funcest/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "funcest/numeric.hpp"
#include "funcest/rng.hpp"

namespace funcest {

PiecewiseDensity::PiecewiseDensity(GridFunction heights, double sup_bound)
    : heights_(std::move(heights)), sup_bound_(sup_bound) {
  if (!(sup_bound_ > 0.0)) throw std::invalid_argument("PiecewiseDensity: sup bound must be positive");
  for (double v : heights_.values()) {
    if (v < 0.0) throw std::invalid_argument("PiecewiseDensity: negative height");
    if (v > sup_bound_) {
      throw std::invalid_argument("PiecewiseDensity: height " + std::to_string(v) +
                                  " exceeds sup bound " + std::to_string(sup_bound_));
    }
  }
  if (std::abs(integral(heights_) - 1.0) > kMassTolerance) {
    throw std::invalid_argument("PiecewiseDensity: heights do not integrate to one");
  }
}

PiecewiseDensity PiecewiseDensity::uniform(std::size_t cells, double sup_bound) {
  return PiecewiseDensity(GridFunction::constant(cells, 1.0), sup_bound);
}

double t_quadratic(const PiecewiseDensity& f) { return integral_product(f.heights(), f.heights()); }

double moment3(const PiecewiseDensity& f) {
  CompensatedSum s;
  for (double v : f.heights().values()) s.add(v * v * v);
  return s.value() * f.heights().cell_width();
}

double l2sq_distance(const PiecewiseDensity& f, const PiecewiseDensity& g) {
  if (f.cells() != g.cells()) throw std::invalid_argument("l2sq_distance: densities on different grids");
  return l2sq_distance(f.heights(), g.heights());
}

DensitySampler::DensitySampler(const PiecewiseDensity& f) : cumulative_(f.cells()) {
  CompensatedSum s;
  for (std::size_t k = 0; k < f.cells(); ++k) {
    s.add(f.cell_mass(k));
    cumulative_[k] = s.value();
    if (f[k] > 0.0) last_positive_ = k;
  }
}

double DensitySampler::draw(double u_cell, double u_within) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u_cell);
  std::size_t k = static_cast<std::size_t>(it - cumulative_.begin());
  // Rounding in the last partial sum can leave u_cell just above the total.
  k = std::min(k, last_positive_);
  const auto cells = static_cast<double>(cumulative_.size());
  double x = std::min((static_cast<double>(k) + u_within) / cells, 1.0);
  // Keep the point inside cell k when k + u rounds up to the next boundary.
  while (static_cast<std::size_t>(x * cells) > k) x = std::nextafter(x, 0.0);
  return x;
}

DensitySample sample_density(const PiecewiseDensity& f, std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_density: n must be at least 1");
  const DensitySampler sampler(f);
  CounterRng rng(seed);
  DensitySample out{std::vector<double>(static_cast<std::size_t>(n)), seed};
  for (double& x : out.points) x = sampler(rng);
  return out;
}

double plugin_t(const PiecewiseDensity& f_hat) { return t_quadratic(f_hat); }

double first_order_t(const DensitySample& sample, const PiecewiseDensity& f_hat) {
  if (sample.points.empty()) throw std::invalid_argument("first_order_t: empty sample");
  CompensatedSum s;
  for (double x : sample.points) s.add(f_hat(x));
  return 2.0 * s.value() / static_cast<double>(sample.points.size()) - t_quadratic(f_hat);
}

double expectation_under(const PiecewiseDensity& f, const GridFunction& g) {
  GridFunction fh = f.heights();
  GridFunction gg = g;
  align_grids(fh, gg);
  return integral_product(fh, gg);
}

double variance_under(const PiecewiseDensity& f, const GridFunction& g) {
  GridFunction fh = f.heights();
  GridFunction gg = g;
  align_grids(fh, gg);
  const double mean = integral_product(fh, gg);
  CompensatedSum s;
  for (std::size_t k = 0; k < gg.cells(); ++k) {
    const double d = gg[k] - mean;
    s.add(fh[k] * d * d);
  }
  return s.value() * gg.cell_width();
}

}  // namespace funcest
