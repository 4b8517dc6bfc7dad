#include "funcest/gsm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "funcest/numeric.hpp"
#include "funcest/rng.hpp"

namespace funcest {

namespace {

void require_same_len(const SeqVector& a, const SeqVector& b, const char* what) {
  if (a.ambient_len() != b.ambient_len()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

void require_positive_n(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("noise scale n must be at least 1");
}

}  // namespace

SeqVector::SeqVector(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw std::invalid_argument("SeqVector: non-finite coefficient");
  }
}

SeqVector SeqVector::zeros(std::size_t len) { return SeqVector(std::vector<double>(len, 0.0)); }

SeqVector SeqVector::axis(std::size_t len, std::size_t index, double scale) {
  if (index >= len) throw std::invalid_argument("SeqVector::axis: index out of range");
  std::vector<double> c(len, 0.0);
  c[index] = scale;
  return SeqVector(std::move(c));
}

double SeqVector::norm() const { return std::sqrt(squared_norm(coeffs_)); }

SeqVector SeqVector::padded(std::size_t len) const {
  if (len < coeffs_.size()) throw std::invalid_argument("SeqVector::padded: cannot shrink");
  std::vector<double> c = coeffs_;
  c.resize(len, 0.0);
  return SeqVector(std::move(c));
}

SeqVector operator+(const SeqVector& a, const SeqVector& b) {
  require_same_len(a, b, "SeqVector +");
  std::vector<double> c(a.coeffs_.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = a.coeffs_[j] + b.coeffs_[j];
  return SeqVector(std::move(c));
}

SeqVector operator-(const SeqVector& a, const SeqVector& b) {
  require_same_len(a, b, "SeqVector -");
  std::vector<double> c(a.coeffs_.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = a.coeffs_[j] - b.coeffs_[j];
  return SeqVector(std::move(c));
}

SeqVector operator*(double s, const SeqVector& a) {
  std::vector<double> c(a.coeffs_.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = s * a.coeffs_[j];
  return SeqVector(std::move(c));
}

double quadratic_functional(const SeqVector& theta) { return squared_norm(theta.coeffs()); }

GsmSample sample_gsm(const SeqVector& theta_star, std::int64_t n, std::uint64_t seed,
                     NoiseMode mode) {
  require_positive_n(n);
  if (mode == NoiseMode::noiseless) return {theta_star, n, seed};
  CounterRng rng(seed);
  const double sd = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> y(theta_star.ambient_len());
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = theta_star[j] + sd * rng.normal();
  return {SeqVector(std::move(y)), n, seed};
}

SplitSample split_sample(const GsmSample& sample, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> u(sample.y.ambient_len());
  for (double& v : u) v = rng.uniform();
  return split_sample_with_uniforms(sample, u);
}

SplitSample split_sample_with_uniforms(const GsmSample& sample, std::span<const double> u) {
  require_positive_n(sample.n);
  const std::size_t len = sample.y.ambient_len();
  if (u.size() != len) throw std::invalid_argument("split_sample: one uniform per coordinate");
  const double sd = 1.0 / std::sqrt(static_cast<double>(sample.n));
  std::vector<double> y1(len), y2(len);
  for (std::size_t j = 0; j < len; ++j) {
    const double shift = inverse_normal_cdf(u[j]) * sd;
    y1[j] = sample.y[j] + shift;
    y2[j] = sample.y[j] - shift;
  }
  return {SeqVector(std::move(y1)), SeqVector(std::move(y2)), sample.n};
}

SplitSample split_from_pair(const GsmSample& first, const GsmSample& second) {
  require_same_len(first.y, second.y, "split_from_pair");
  if (first.n != second.n) throw std::invalid_argument("split_from_pair: noise scales differ");
  return {first.y, second.y, first.n};
}

double plugin_q(const SeqVector& theta_hat) { return squared_norm(theta_hat.coeffs()); }

double first_order_q(const GsmSample& sample, const SeqVector& theta_hat) {
  require_same_len(sample.y, theta_hat, "first_order_q");
  CompensatedSum s;
  for (std::size_t j = 0; j < theta_hat.ambient_len(); ++j) {
    s.add(2.0 * sample.y[j] * theta_hat[j]);
    s.add(-theta_hat[j] * theta_hat[j]);
  }
  return s.value();
}

double higher_order_q(const SplitSample& split, const SeqVector& theta_hat, std::size_t truncation,
                      HigherOrderTail tail) {
  require_same_len(split.y1, split.y2, "higher_order_q");
  require_same_len(split.y1, theta_hat, "higher_order_q");
  const std::size_t len = theta_hat.ambient_len();
  const std::size_t head = truncation < len ? truncation : len;
  const double pilot_weight = tail == HigherOrderTail::literal ? 2.0 : 1.0;
  CompensatedSum s;
  for (std::size_t j = 0; j < head; ++j) s.add(split.y1[j] * split.y2[j]);
  for (std::size_t j = head; j < len; ++j) {
    s.add((split.y1[j] + split.y2[j]) * theta_hat[j]);
    s.add(-pilot_weight * theta_hat[j] * theta_hat[j]);
  }
  return s.value();
}

double adaptive_threshold(const SeqVector& theta_hat, std::int64_t n, double delta) {
  require_positive_n(n);
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("adaptive_q: delta must lie in (0,1)");
  return 4.0 * theta_hat.norm() * std::sqrt(4.0 * std::log(2.0 / delta) / static_cast<double>(n));
}

AdaptiveEstimate adaptive_q_detail(const GsmSample& sample, const SeqVector& theta_hat,
                                   double delta) {
  const double threshold = adaptive_threshold(theta_hat, sample.n, delta);
  const double pi = plugin_q(theta_hat);
  const double fo = first_order_q(sample, theta_hat);
  if (std::abs(pi - fo) <= threshold) return {pi, true};
  return {fo, false};
}

double adaptive_q(const GsmSample& sample, const SeqVector& theta_hat, double delta) {
  return adaptive_q_detail(sample, theta_hat, delta).value;
}

}  // namespace funcest
