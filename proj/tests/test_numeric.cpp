#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "funcest/numeric.hpp"
#include "funcest/quadrature.hpp"

using namespace funcest;

namespace {

// Standard normal CDF by quadrature of the density, independent of erfc.
double cdf_by_quadrature(double z) {
  const double half = integrate([](double x) { return normal_pdf(x); }, 0.0, std::abs(z)).value;
  return z >= 0.0 ? 0.5 + half : 0.5 - half;
}

double bisect_quantile(double u) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf_by_quadrature(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(CompensatedSum, RecoversCancelledTerms) {
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  EXPECT_EQ(s.value(), 1.0);
}

TEST(CompensatedSum, ManySmallTerms) {
  std::vector<double> xs(1000000, 0.1);
  EXPECT_NEAR(compensated_sum(xs), 100000.0, 1e-9);
}

TEST(InverseNormalCdf, Median) { EXPECT_EQ(inverse_normal_cdf(0.5), 0.0); }

TEST(InverseNormalCdf, QuadratureBisectionOracle) {
  EXPECT_NEAR(inverse_normal_cdf(0.975), bisect_quantile(0.975), 1e-9);
  EXPECT_NEAR(inverse_normal_cdf(0.975), 1.959964, 1e-6);
  EXPECT_NEAR(inverse_normal_cdf(0.841344746), 1.0, 1e-6);
  EXPECT_NEAR(inverse_normal_cdf(0.841344746), bisect_quantile(0.841344746), 1e-9);
}

TEST(InverseNormalCdf, AgreesWithBoostQuantileAcrossRange) {
  const boost::math::normal_distribution<double> nd;
  for (double lu = -10.0; lu <= -0.31; lu += 0.05) {
    const double u = std::pow(10.0, lu);
    EXPECT_NEAR(inverse_normal_cdf(u), boost::math::quantile(nd, u), 1e-9) << u;
    EXPECT_NEAR(inverse_normal_cdf(1.0 - u), boost::math::quantile(nd, 1.0 - u), 1e-9) << u;
  }
}

TEST(InverseNormalCdf, CdfResidual) {
  for (double u : {1e-10, 1e-6, 0.01, 0.2, 0.5, 0.7, 0.99, 1.0 - 1e-6}) {
    const double z = inverse_normal_cdf(u);
    EXPECT_LE(std::abs(normal_cdf(z) - u), 1e-12) << u;
  }
}

TEST(InverseNormalCdf, RejectsOutsideOpenInterval) {
  EXPECT_THROW(inverse_normal_cdf(0.0), std::domain_error);
  EXPECT_THROW(inverse_normal_cdf(1.0), std::domain_error);
  EXPECT_THROW(inverse_normal_cdf(-0.5), std::domain_error);
}

TEST(LogCosh, MatchesDirectAndLargeArguments) {
  for (double x : {0.0, 1e-8, 0.3, 1.0, 5.0, -7.0}) EXPECT_NEAR(log_cosh(x), std::log(std::cosh(x)), 1e-14);
  EXPECT_NEAR(log_cosh(1000.0), 1000.0 - std::log(2.0), 1e-9);
}

TEST(CoshPowMinusOne, TinyArgumentsKeepRelativePrecision) {
  const double x = 1e-6;
  // cosh(x)^d - 1 ~ d x^2 / 2.
  EXPECT_NEAR(cosh_pow_minus_one(x, 3.0) / (1.5 * x * x), 1.0, 1e-9);
  EXPECT_NEAR(cosh_pow_minus_one(1.0, 2.0), std::cosh(1.0) * std::cosh(1.0) - 1.0, 1e-14);
}

TEST(Quadrature, GaussianMass) {
  EXPECT_NEAR(integrate([](double x) { return normal_pdf(x); }, -kInfinity, kInfinity).value, 1.0, 1e-13);
}
