#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace funcest {

/// Neumaier-compensated running sum. Every inner product and norm in the
/// library goes through this accumulator so that J ~ 1e6 coordinate sums stay
/// exact to a few ulps.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs);
double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Standard normal density and distribution function.
double normal_pdf(double z);
double normal_cdf(double z);

/// Quantile of the standard normal distribution (Wichura's AS 241 rational
/// approximations, refined by one Halley step). Throws std::domain_error for
/// u outside the open unit interval.
double inverse_normal_cdf(double u);

/// log(cosh(x)) without overflow for large |x|.
double log_cosh(double x);

/// cosh(x)^d - 1, accurate when the result is tiny.
double cosh_pow_minus_one(double x, double d);

/// Positive part.
inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace funcest
