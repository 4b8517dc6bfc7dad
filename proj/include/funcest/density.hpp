#pragma once

#include <cstdint>
#include <vector>

#include "funcest/grid.hpp"

namespace funcest {

/// Nonnegative step density on [0,1], bounded above by sup_bound and
/// integrating to one (within 1e-12).
class PiecewiseDensity {
 public:
  static constexpr double kDefaultSupBound = 10.0;
  static constexpr double kMassTolerance = 1e-12;

  explicit PiecewiseDensity(GridFunction heights, double sup_bound = kDefaultSupBound);
  PiecewiseDensity(std::vector<double> heights, double sup_bound = kDefaultSupBound)
      : PiecewiseDensity(GridFunction(std::move(heights)), sup_bound) {}

  static PiecewiseDensity uniform(std::size_t cells, double sup_bound = kDefaultSupBound);

  const GridFunction& heights() const { return heights_; }
  std::size_t cells() const { return heights_.cells(); }
  double sup_bound() const { return sup_bound_; }
  double operator[](std::size_t k) const { return heights_[k]; }
  double operator()(double x) const { return heights_(x); }
  double cell_mass(std::size_t k) const { return heights_[k] * heights_.cell_width(); }

  PiecewiseDensity refined(std::size_t factor) const {
    return PiecewiseDensity(heights_.refined(factor), sup_bound_);
  }

 private:
  GridFunction heights_;
  double sup_bound_;
};

struct DensitySample {
  std::vector<double> points;
  std::uint64_t seed = 0;
};

/// Integral of f^2.
double t_quadratic(const PiecewiseDensity& f);
/// Integral of f^3.
double moment3(const PiecewiseDensity& f);
double l2sq_distance(const PiecewiseDensity& f, const PiecewiseDensity& g);

/// Draws cell k with probability equal to its mass, then a uniform point in
/// the cell.
class DensitySampler {
 public:
  explicit DensitySampler(const PiecewiseDensity& f);
  template <class Rng>
  double operator()(Rng& rng) const {
    return draw(rng.uniform(), rng.uniform());
  }
  double draw(double u_cell, double u_within) const;

 private:
  std::vector<double> cumulative_;
  std::size_t last_positive_ = 0;
};

DensitySample sample_density(const PiecewiseDensity& f, std::int64_t n, std::uint64_t seed);

double plugin_t(const PiecewiseDensity& f_hat);
/// (2/n) sum f_hat(X_i) - integral f_hat^2.
double first_order_t(const DensitySample& sample, const PiecewiseDensity& f_hat);

/// E g(X) and var g(X) for X ~ f, exact on a common grid.
double expectation_under(const PiecewiseDensity& f, const GridFunction& g);
double variance_under(const PiecewiseDensity& f, const GridFunction& g);

}  // namespace funcest
