#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "funcest/density.hpp"
#include "funcest/grid.hpp"
#include "funcest/quadrature.hpp"
#include "funcest/rng.hpp"
#include "mc_stats.hpp"

using namespace funcest;

namespace {

// Midpoint Riemann sum at high resolution; exact for step functions whose
// breakpoints fall on the fine grid.
double riemann(const std::function<double(double)>& f, std::size_t cells = 360360 * 2) {
  double s = 0.0;
  for (std::size_t i = 0; i < cells; ++i) s += f((i + 0.5) / cells);
  return s / cells;
}

PiecewiseDensity random_density(CounterRng& rng, std::size_t cells) {
  std::vector<double> h(cells);
  double total = 0.0;
  for (auto& x : h) total += (x = 0.2 + rng.uniform());
  for (auto& x : h) x *= cells / total;
  return PiecewiseDensity(h);
}

}  // namespace

TEST(Grid, CellLookupAndRefinement) {
  const GridFunction g({1.0, 2.0, 3.0});
  EXPECT_EQ(g.cell_of(0.0), 0u);
  EXPECT_EQ(g.cell_of(1.0 / 3.0), 1u);
  EXPECT_EQ(g.cell_of(1.0), 2u);
  const auto r = g.refined(2);
  EXPECT_EQ(r.cells(), 6u);
  EXPECT_EQ(r[3], 2.0);
  EXPECT_NEAR(integral(g), 2.0, 1e-15);
}

TEST(Grid, AlignToLcm) {
  GridFunction f({1.0, 3.0}), g({0.0, 1.0, 2.0});
  align_grids(f, g);
  EXPECT_EQ(f.cells(), 6u);
  EXPECT_EQ(g.cells(), 6u);
  EXPECT_NEAR(integral_product(f, g), riemann([](double x) { return (x < 0.5 ? 1.0 : 3.0) * std::floor(3 * x); }),
              1e-12);
}

TEST(Density, ValidationRejectsBadHeights) {
  EXPECT_THROW(PiecewiseDensity({0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(PiecewiseDensity({-1.0, 3.0}), std::invalid_argument);
  EXPECT_THROW(PiecewiseDensity({0.0, 0.0, 0.0, 4.0}, 3.0), std::invalid_argument);
  EXPECT_NO_THROW(PiecewiseDensity({2.0, 0.0}));
}

TEST(Density, FunctionalsOnSmallGrids) {
  const auto u = PiecewiseDensity::uniform(3);
  EXPECT_NEAR(t_quadratic(u), 1.0, 1e-15);
  EXPECT_NEAR(t_quadratic(PiecewiseDensity({2.0, 0.0})), 2.0, 1e-15);
  EXPECT_NEAR(t_quadratic(PiecewiseDensity({0.5, 1.5})), 1.25, 1e-15);
  EXPECT_NEAR(moment3(u), 1.0, 1e-15);
  EXPECT_NEAR(moment3(PiecewiseDensity({2.0, 0.0})), 4.0, 1e-15);
  EXPECT_NEAR(moment3(PiecewiseDensity({2.0, 1.0, 0.5, 0.5})), 2.3125, 1e-15);
  const auto u2 = PiecewiseDensity::uniform(2);
  EXPECT_EQ(l2sq_distance(u2, u2), 0.0);
  EXPECT_NEAR(l2sq_distance(u2, PiecewiseDensity({2.0, 0.0})), 1.0, 1e-15);
  EXPECT_NEAR(l2sq_distance(u2, PiecewiseDensity({0.5, 1.5})), 0.25, 1e-15);
  EXPECT_NEAR(plugin_t(PiecewiseDensity({2.0, 0.0})), 2.0, 1e-15);
}

TEST(Density, FunctionalsAgreeWithRiemannOracle) {
  CounterRng rng(2);
  for (int k = 0; k < 10; ++k) {
    const auto f = random_density(rng, 3 + k);
    const auto g = random_density(rng, 3 + k).refined(1);
    EXPECT_NEAR(t_quadratic(f), riemann([&](double x) { return f(x) * f(x); }), 1e-9);
    EXPECT_NEAR(moment3(f), riemann([&](double x) { return f(x) * f(x) * f(x); }), 1e-9);
    EXPECT_NEAR(l2sq_distance(f, g), riemann([&](double x) { return (f(x) - g(x)) * (f(x) - g(x)); }), 1e-9);
  }
}

TEST(Density, SamplerSkipsEmptyCellsAndMatchesMasses) {
  const PiecewiseDensity f({0.0, 2.0, 1.0, 1.0});
  const auto s = sample_density(f, 100000, 6);
  std::vector<int> counts(4);
  for (double x : s.points) {
    ASSERT_GE(x, 0.0);
    ASSERT_LE(x, 1.0);
    ++counts[f.heights().cell_of(x)];
  }
  EXPECT_EQ(counts[0], 0);
  EXPECT_NEAR(counts[1] / 1e5, 0.5, 0.01);
  EXPECT_NEAR(counts[2] / 1e5, 0.25, 0.01);
}

TEST(Density, FirstOrderConstantPilotHasNoVariance) {
  const auto u = PiecewiseDensity::uniform(5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_NEAR(first_order_t(sample_density(PiecewiseDensity({0.5, 1.5}), 50, seed), u), 1.0, 1e-14);
  }
}

TEST(Density, FirstOrderBiasIdentity) {
  const auto star = PiecewiseDensity::uniform(2);
  const PiecewiseDensity hat({0.5, 1.5});
  const std::int64_t n = 20;
  const auto st = mc_run(200000, [&](std::size_t i) {
    return first_order_t(sample_density(star, n, derive_seed(3, {i})), hat);
  });
  EXPECT_LE(std::abs(st.mean - 0.75), 4.0 * st.se);
  // Exact single-draw variance of 2 f_hat(X).
  EXPECT_NEAR(st.var, 4.0 * variance_under(star, hat.heights()) / n, 0.05 * 4.0 * 0.25 / n);
}

TEST(Density, ExpectationAndVarianceUnder) {
  const PiecewiseDensity f({0.5, 1.5});
  const GridFunction g({2.0, 4.0, 6.0, 8.0});
  EXPECT_NEAR(expectation_under(f, g), 0.25 * 0.5 * (2 + 4) + 0.25 * 1.5 * (6 + 8), 1e-14);
  const double m2 = 0.25 * 0.5 * (4 + 16) + 0.25 * 1.5 * (36 + 64);
  EXPECT_NEAR(variance_under(f, g), m2 - std::pow(expectation_under(f, g), 2), 1e-13);
}
