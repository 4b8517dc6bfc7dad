#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "funcest/gsm.hpp"

namespace funcest {

/// chi^2(N(theta, I/n) || N(theta_tilde, I/n)) = exp(n |theta - theta_tilde|^2) - 1.
/// Throws std::overflow_error when the exponent exceeds kMaxChi2Exponent.
inline constexpr double kMaxChi2Exponent = 700.0;
double chi2_gaussians(const SeqVector& theta, const SeqVector& theta_tilde, std::int64_t n);

struct SignMixtureChi2 {
  double exact = 0.0;      // cosh(n eps^2)^d - 1
  double bound = 0.0;      // exp(d n^2 eps^4) - 1
  bool bound_applies = false;  // eps <= 1/n
};
/// chi^2 between N(0, I/n) and the uniform mixture of N(s*eps, I/n) over
/// s in {-1,+1}^d.
SignMixtureChi2 chi2_point_vs_signmixture(std::int64_t d, double eps, std::int64_t n);

/// Finitely supported distribution over integer outcome ids.
class DiscreteDist {
 public:
  static constexpr double kMassTolerance = 1e-12;

  DiscreteDist() = default;
  /// Atoms may come in any order; ids must be distinct.
  explicit DiscreteDist(std::vector<std::pair<std::uint64_t, double>> atoms);
  /// Atoms with ids 0..p.size()-1.
  static DiscreteDist from_probabilities(std::span<const double> p);

  std::span<const std::pair<std::uint64_t, double>> atoms() const { return atoms_; }
  double probability(std::uint64_t id) const;

 private:
  std::vector<std::pair<std::uint64_t, double>> atoms_;  // sorted by id
};

/// Squared Hellinger distance sum (sqrt p - sqrt q)^2, in [0, 2].
double hellinger_discrete(const DiscreteDist& p, const DiscreteDist& q);
/// Same on two probability vectors indexed by a shared outcome space.
double hellinger_vectors(std::span<const double> p, std::span<const double> q);

struct HellingerProduct {
  double bound = 0.0;  // n * h2
  double exact = 0.0;  // 2 - 2 (1 - h2/2)^n
};
HellingerProduct hellinger_product_bound(double h2_single, std::int64_t n);

/// [alpha^2 + 2 alpha |theta| - beta exp(n alpha^2 / 2)]_+^2.
double cri_bound(const SeqVector& theta, double alpha, double beta, std::int64_t n);

/// E over independent signs sigma_j of (1 + sum_j sigma_j c_j)^n, minus one.
/// Exact even-moment recursion, O(len(c) * n^2); every term is nonnegative so
/// tiny results keep full relative precision.
double expected_signed_power_minus_one(std::span<const double> c, std::int64_t n);
inline double expected_signed_power(std::span<const double> c, std::int64_t n) {
  return 1.0 + expected_signed_power_minus_one(c, n);
}

struct SignedChi2 {
  double value = 0.0;
  bool is_bound = false;  // prod_j cosh(n c_j) - 1 was used instead of the exact sum
};
/// chi^2 of a sign mixture whose single-observation likelihood ratios satisfy
/// E[L_lambda L_nu] = 1 + sum_j lambda_j nu_j c_j. Falls back to the upper
/// bound prod cosh(n c_j) - 1 when len(c) * n^2 exceeds max_work.
SignedChi2 sign_mixture_chi2(std::span<const double> c, std::int64_t n, double max_work = 3e8);

// Quadrature oracles for the one-dimensional closed forms.
double chi2_gaussians_quadrature_1d(double delta, std::int64_t n);
double chi2_signmixture_quadrature_1d(double eps, std::int64_t n);

}  // namespace funcest
