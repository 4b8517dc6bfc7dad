#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace funcest {

/// Coefficient vector of the sequence model. Coordinates beyond
/// ambient_len() are exactly zero, so norms and the quadratic functional are
/// finite sums.
class SeqVector {
 public:
  SeqVector() = default;
  explicit SeqVector(std::vector<double> coeffs);

  static SeqVector zeros(std::size_t len);
  /// scale * e_index in dimension len.
  static SeqVector axis(std::size_t len, std::size_t index, double scale = 1.0);

  std::size_t ambient_len() const { return coeffs_.size(); }
  double operator[](std::size_t j) const { return coeffs_[j]; }
  std::span<const double> coeffs() const { return coeffs_; }

  /// Euclidean norm.
  double norm() const;
  /// Copy extended with zero coordinates up to len (len >= ambient_len()).
  SeqVector padded(std::size_t len) const;

  friend SeqVector operator+(const SeqVector& a, const SeqVector& b);
  friend SeqVector operator-(const SeqVector& a, const SeqVector& b);
  friend SeqVector operator*(double s, const SeqVector& a);
  friend bool operator==(const SeqVector&, const SeqVector&) = default;

 private:
  std::vector<double> coeffs_;
};

/// One draw y = theta* + noise, noise ~ N(0, I/n).
struct GsmSample {
  SeqVector y;
  std::int64_t n = 1;
  std::uint64_t seed = 0;
};

/// Two independent copies (y1, y2) derived from one observation.
struct SplitSample {
  SeqVector y1;
  SeqVector y2;
  std::int64_t n = 1;
};

enum class NoiseMode {
  gaussian,
  noiseless,  // diagnostic: y = theta* exactly
};

/// Tail term of the truncated-series estimator. bias_consistent uses
/// (y1+y2)*th - th^2 per coordinate; literal uses 2[(y1+y2)*th/2 - th^2].
enum class HigherOrderTail { bias_consistent, literal };

double quadratic_functional(const SeqVector& theta);

GsmSample sample_gsm(const SeqVector& theta_star, std::int64_t n, std::uint64_t seed,
                     NoiseMode mode = NoiseMode::gaussian);

/// Sample-splitting by independent Gaussian inflation:
/// y1 = y + z/sqrt(n), y2 = y - z/sqrt(n), z = Phi^{-1}(U).
SplitSample split_sample(const GsmSample& sample, std::uint64_t seed);
/// Same device with caller-supplied uniforms (one per coordinate).
SplitSample split_sample_with_uniforms(const GsmSample& sample, std::span<const double> u);
/// Diagnostic: use two genuinely independent observations as (y1, y2).
SplitSample split_from_pair(const GsmSample& first, const GsmSample& second);

double plugin_q(const SeqVector& theta_hat);
double first_order_q(const GsmSample& sample, const SeqVector& theta_hat);
double higher_order_q(const SplitSample& split, const SeqVector& theta_hat, std::size_t truncation,
                      HigherOrderTail tail = HigherOrderTail::bias_consistent);

/// Selection threshold 4 ||th|| sqrt(4 log(2/delta) / n).
double adaptive_threshold(const SeqVector& theta_hat, std::int64_t n, double delta);

struct AdaptiveEstimate {
  double value = 0.0;
  bool chose_plugin = true;
};

/// Lepski-style choice between plugin and first-order; equality with the
/// threshold keeps the plugin.
AdaptiveEstimate adaptive_q_detail(const GsmSample& sample, const SeqVector& theta_hat,
                                   double delta);
double adaptive_q(const GsmSample& sample, const SeqVector& theta_hat, double delta);

}  // namespace funcest
