#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "funcest/causal.hpp"
#include "funcest/density.hpp"
#include "funcest/gsm.hpp"

namespace funcest {

inline constexpr double kDefaultAlpha = 0.2;
/// Explicit constant used wherever a bound only holds up to constants.
inline constexpr double kHiddenConstant = 100.0;

/// Finite mixture of N(center, I/n).
class GaussianMixture {
 public:
  GaussianMixture(std::vector<SeqVector> centers, std::vector<double> weights, std::int64_t n);
  static GaussianMixture point(SeqVector center, std::int64_t n);

  const std::vector<SeqVector>& centers() const { return centers_; }
  const std::vector<double>& weights() const { return weights_; }
  std::int64_t n() const { return n_; }

 private:
  std::vector<SeqVector> centers_;
  std::vector<double> weights_;
  std::int64_t n_;
};

/// Uniform mixture of N(center + eps * sum_{j in indices} s_j e_j, I/n) over
/// all sign vectors s. Kept implicit; materialize() expands it.
struct SignMixture {
  static constexpr std::size_t kMaxMaterialized = 20;

  SeqVector center;
  std::vector<std::size_t> indices;
  double eps = 0.0;
  std::int64_t n = 1;

  std::size_t dimension() const { return indices.size(); }
  SeqVector component(std::uint64_t signs) const;  // bit j set means +eps on indices[j]
  GaussianMixture materialize() const;
};

struct DensityMixture {
  std::vector<PiecewiseDensity> components;
  std::vector<double> weights;
  std::size_t implicit_log2_size = 0;  // nonzero when components were not materialized
};

struct CausalMixture {
  std::vector<CausalModel> components;
  std::vector<double> weights;
  std::size_t implicit_log2_size = 0;
};

using LBDistribution = std::variant<GaussianMixture, SignMixture, DensityMixture, CausalMixture>;

enum class DivergenceKind { chi2, hellinger };
const char* to_string(DivergenceKind kind);

/// One machine check: value <= limit (or >= for separation checks).
struct AuditCheck {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
};

/// A two-hypothesis lower-bound instance with its audit trail.
struct LBInstance {
  std::string construction;
  std::vector<std::pair<std::string, double>> params;
  std::optional<LBDistribution> null_dist;
  std::optional<LBDistribution> alt_dist;
  double separation = 0.0;          // smallest functional gap over the alternative support
  double claimed_separation = 0.0;  // declared 2s
  DivergenceKind divergence_kind = DivergenceKind::chi2;
  double divergence = 0.0;          // n-sample divergence compared with the budget
  double budget = kDefaultAlpha;
  std::vector<double> claimed_radius;
  std::vector<double> realized_radius;  // largest distance over null and alternative support
  std::vector<std::string> flags;
  std::vector<AuditCheck> checks;

  bool passed() const;
  double param(const std::string& name) const;
};

/// Relative slack allowed for floating-point rounding in audit comparisons.
inline constexpr double kAuditRoundoff = 1e-12;

// ---- Gaussian sequence model ----

/// chi^2 of a Gaussian mixture against N(null_center, I/n), by the exact
/// double sum over component pairs.
double chi2_mixture_vs_point(const GaussianMixture& mixture, const SeqVector& null_center);

/// Scaled-down pilot: alternative (1 - nu) theta_hat, nu^2 = alpha / (2 n |theta_hat|^2).
/// Requires r >= 1/n and r^2 <= kHiddenConstant |theta_hat|^2 / n.
LBInstance gsm_lb1(const SeqVector& theta_hat, double r, std::int64_t n, double alpha = kDefaultAlpha);

/// Stretched pilot: alternative theta_hat + sqrt(r) theta_hat / |theta_hat|.
/// Requires r <= 1/n and 2 n r <= alpha.
LBInstance gsm_lb2(const SeqVector& theta_hat, double r, std::int64_t n, double alpha = kDefaultAlpha);

struct Lb3Options {
  std::optional<double> eps_override;
  bool pad_with_zeros = true;  // extend theta_hat when too few small coordinates exist
  std::size_t max_dimension = std::size_t{1} << 24;
};
/// eps = sqrt(alpha) min{1/(n r), 1/n}.
double lb3_printed_eps(double r, std::int64_t n, double alpha);
/// Sign-cube mixture on d = floor(r / eps^2) coordinates with |theta_hat_j| <= eps/4.
LBInstance gsm_lb3(const SeqVector& theta_hat, double r, std::int64_t n, double alpha = kDefaultAlpha,
                   const Lb3Options& options = {});

// ---- Density model ----

/// p2 = p1 (1 + eps p1 - eps int p1^2). Throws if p2 leaves [0, M].
PiecewiseDensity twopoint_alternative(const PiecewiseDensity& p1, double eps);
/// gamma = int p1^3 - (int p1^2)^2.
double twopoint_gamma(const PiecewiseDensity& p1);
/// eps with eps^2 gamma = alpha min{1/n, r}, reduced so that int (p1-p2)^2 <= r
/// and p2 stays a valid density.
double twopoint_eps(const PiecewiseDensity& f_hat, double r, std::int64_t n, double alpha = kDefaultAlpha);
LBInstance density_twopoint(const PiecewiseDensity& f_hat, double eps, std::int64_t n, double r,
                            double alpha = kDefaultAlpha);

/// Cells [first, last) of the density's own grid.
struct BumpRegion {
  std::size_t first = 0;
  std::size_t last = 0;  // 0 means "all cells"
};

/// p0 + (h / sqrt(vol A)) sum_j lambda_j (1_{A_j} - 1_{B_j}) where the region
/// is cut into 2m equal intervals A_1, B_1, ..., A_m, B_m. The result lives on
/// the grid refined by 2m.
PiecewiseDensity density_bump(const PiecewiseDensity& p0, std::size_t m, double h,
                              std::span<const int> lambda, BumpRegion region = {});

struct BumpChi2 {
  double exact = 0.0;            // E[W_n^2] - 1
  double printed_bound = 0.0;    // exp(m n^2 h^4 / inf^2) - 1
  double corrected_bound = 0.0;  // exp(4 m n^2 h^4 / inf^2) - 1
  double inf_p0 = 0.0;
  bool conditions_hold = false;  // h~ <= inf p0 and n h~^2 a_j <= 1 for all j
  bool exact_is_bound = false;   // exact replaced by prod cosh - 1 (too large to expand)
  std::vector<double> a;         // a_j = int_{A_j u B_j} 1/p0
};
BumpChi2 density_bump_chi2(const PiecewiseDensity& p0, std::size_t m, double h, std::int64_t n,
                           BumpRegion region = {});

/// Full bump construction around the mixed density (1-eps) f_hat + eps U_S,
/// with S the longest run of cells where f_hat <= eps/4.
LBInstance density_bump_instance(const PiecewiseDensity& f_hat, double r, std::int64_t n,
                                 double alpha = kDefaultAlpha);

// ---- Causal model ----

/// Quadruples (mu_hat, pi_hat, 0) and (mu_hat, pi_hat, zeta). Requires zeta <= eps/2.
LBInstance causal_case1(const NuisancePilots& pilots, double zeta, std::int64_t n,
                        double alpha = kDefaultAlpha);
/// Largest zeta <= eps/2 with n H^2 <= alpha.
double case1_zeta(const NuisancePilots& pilots, std::int64_t n, double alpha = kDefaultAlpha);

/// The family of bumped models around the null (mu_hat, pi_hat, 0). Bumps
/// B_1..B_{2m} are intervals of length 1/(4m) starting at (b-1)/(2m); pair j
/// perturbs with sign -1 on B_{2j-1} and +1 on B_{2j}.
class CausalCase2Family {
 public:
  CausalCase2Family(const NuisancePilots& pilots, std::size_t m, double h1, double h2);

  std::size_t m() const { return m_; }
  double h1() const { return h1_; }
  double h2() const { return h2_; }
  std::size_t cells() const { return pi_hat_.cells(); }
  double bump_volume() const { return 1.0 / (4.0 * static_cast<double>(m_)); }

  const CausalModel& null_model() const { return null_; }
  /// Model for sign vector lambda (bit j set means lambda_j = +1). Throws if
  /// any perturbed nuisance leaves [eps/2, 1 - eps/2] or the likelihood is invalid.
  CausalModel model(std::uint64_t lambda) const;
  /// Outcome table of model(lambda) on (cell, a, y), index 4k + 2a + y.
  std::vector<double> outcome_table(std::uint64_t lambda) const;
  /// Per-cell bump index in [0, 2m) or -1 outside the bumps.
  int bump_of(std::size_t cell) const { return bump_[cell]; }
  /// Signed perturbations of pi and mu on a cell for lambda_j = +1.
  double pi_step(std::size_t cell) const;
  double mu_step(std::size_t cell) const;

  /// int (pi_lambda - pi_hat)^2 and int (mu_lambda - mu_hat)^2 (lambda-free).
  double pi_distance() const;
  double mu_distance() const;
  /// min over lambda of int pi_lambda mu_lambda - int pi_hat mu_hat.
  double separation() const;
  /// Largest |E_lambda q_lambda - p| over outcomes, by enumeration of 2^m signs.
  double mixture_mean_error() const;
  /// chi^2(E_lambda q_lambda^n || p^n), exact.
  double chi2(std::int64_t n) const;
  /// H^2(p^n, E_lambda q_lambda^n) by enumeration of all n-tuples of outcomes.
  double hellinger_exhaustive(std::int64_t n) const;
  /// Atoms of the merged single-observation outcome space (bump cells x {0,1}^2 plus one).
  std::size_t merged_atoms() const;

 private:
  CausalModel model_from_signs(const std::vector<int>& signs) const;
  std::vector<double> table_from_signs(const std::vector<int>& signs) const;
  std::vector<double> null_table() const;

  GridFunction pi_hat_;
  GridFunction mu_hat_;
  double margin_;
  std::size_t m_;
  double h1_, h2_;
  std::vector<int> bump_;
  CausalModel null_;
};

struct Case2Plan {
  double h1 = 0.0;
  double h2 = 0.0;
  // Factors applied to the nominal sqrt(vol) min{sqrt(r), eps/2} choices.
  double shrink1 = 1.0;
  double shrink2 = 1.0;
};
/// Nominal h1 = sqrt(vol) min{sqrt(r), eps/2}, h2 = sqrt(vol) min{sqrt(s), eps/2},
/// reduced until the propensity error is <= r, the outcome error <= s and all
/// bumped models are valid.
Case2Plan plan_causal_case2(const NuisancePilots& pilots, std::size_t m, double r, double s);

/// Builds the family for given (m, h1, h2) and audits it against radii (r, s).
LBInstance causal_case2(const NuisancePilots& pilots, std::size_t m, double h1, double h2, double r,
                        double s, std::int64_t n, double alpha = kDefaultAlpha);
/// Chooses h1, h2 by plan_causal_case2 and the smallest power-of-two m for
/// which the divergence fits the budget (m <= max_m).
LBInstance causal_case2_instance(const NuisancePilots& pilots, double r, double s, std::int64_t n,
                                 double alpha = kDefaultAlpha, std::size_t max_m = std::size_t{1} << 16);

}  // namespace funcest
