#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "funcest/grid.hpp"

namespace funcest {

/// Binary (X, A, Y) model with X ~ Unif[0,1], parametrized by the outcome
/// regression mu, the propensity pi and the effect contrast
/// eta = E[Y|X,A=1] - E[Y|X,A=0], all step functions on one grid.
class CausalModel {
 public:
  static constexpr double kDefaultMargin = 0.1;
  static constexpr double kProbabilityTolerance = 1e-12;

  /// Grids are refined to a common resolution. Throws if mu or pi leave
  /// [0,1] or any conditional outcome probability leaves [0,1].
  CausalModel(GridFunction mu, GridFunction pi, GridFunction eta,
              double margin = kDefaultMargin);

  const GridFunction& mu() const { return mu_; }
  const GridFunction& pi() const { return pi_; }
  const GridFunction& eta() const { return eta_; }
  double margin() const { return margin_; }
  std::size_t cells() const { return mu_.cells(); }

  /// P(Y=1 | X in cell k, A=a).
  double outcome_probability(std::size_t k, int a) const;
  /// P(A=a, Y=y | X in cell k).
  double joint_probability(std::size_t k, int a, int y) const;

  /// Cell probabilities of the sufficient statistic (cell, A, Y), laid out as
  /// index 4k + 2a + y.
  std::vector<double> outcome_table() const;

 private:
  GridFunction mu_;
  GridFunction pi_;
  GridFunction eta_;
  double margin_;
};

struct Observation {
  double x = 0.0;
  int a = 0;
  int y = 0;
};

struct CausalSample {
  std::vector<Observation> obs;
  std::uint64_t seed = 0;
};

/// Pilot estimates of (pi, mu), bounded in [margin, 1 - margin].
class NuisancePilots {
 public:
  NuisancePilots(GridFunction pi_hat, GridFunction mu_hat,
                 double margin = CausalModel::kDefaultMargin);

  const GridFunction& pi_hat() const { return pi_hat_; }
  const GridFunction& mu_hat() const { return mu_hat_; }
  double margin() const { return margin_; }
  std::size_t cells() const { return pi_hat_.cells(); }

 private:
  GridFunction pi_hat_;
  GridFunction mu_hat_;
  double margin_;
};

/// E[cov(A, Y | X)] = integral of pi (1 - pi) eta.
double psi_cov(const CausalModel& model);
/// Joint density p(x, a, y) with respect to Lebesgue x counting measure.
double likelihood(const CausalModel& model, double x, int a, int y);

CausalSample sample_causal(const CausalModel& model, std::int64_t n, std::uint64_t seed);

double plugin_psi(std::span<const Observation> obs, const NuisancePilots& pilots);
double first_order_psi(std::span<const Observation> obs, const NuisancePilots& pilots);
inline double plugin_psi(const CausalSample& s, const NuisancePilots& p) { return plugin_psi(s.obs, p); }
inline double first_order_psi(const CausalSample& s, const NuisancePilots& p) {
  return first_order_psi(s.obs, p);
}

/// Unvalidated pilot functions returned by a fitting callback.
struct PilotFit {
  GridFunction pi_hat;
  GridFunction mu_hat;
};
using PilotFitter = std::function<PilotFit(std::span<const Observation>)>;

/// Randomly halves the sample, fits pilots on each half, evaluates the
/// first-order estimator on the other half and averages the two.
double cross_fit_psi(const CausalSample& sample, const PilotFitter& fit, std::uint64_t seed,
                     double margin = CausalModel::kDefaultMargin);

/// Reference fitter: per-cell means of A and Y, clipped to the margin; empty
/// cells fall back to 1/2.
PilotFitter histogram_fitter(std::size_t cells, double margin = CausalModel::kDefaultMargin);

/// integral (pi* - pi_hat)(mu* - mu_hat); grids must match.
double conditional_bias(const NuisancePilots& pilots, const CausalModel& truth);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};
/// Exact mean and variance of (A - pi_hat(X))(Y - mu_hat(X)) under truth.
Moments first_order_summand_moments(const NuisancePilots& pilots, const CausalModel& truth);
/// Exact mean and variance of AY - pi_hat(X) mu_hat(X) under truth.
Moments plugin_summand_moments(const NuisancePilots& pilots, const CausalModel& truth);

}  // namespace funcest
