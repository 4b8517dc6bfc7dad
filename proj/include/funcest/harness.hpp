#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "funcest/causal.hpp"
#include "funcest/density.hpp"
#include "funcest/gsm.hpp"
#include "funcest/lower_bounds.hpp"

namespace funcest {

/// Raised for malformed or inconsistent experiment configurations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelKind { gsm, density, causal };
enum class PilotMode { fixed_axis, random_direction, spread };

const char* to_string(ModelKind m);
const char* to_string(PilotMode m);
ModelKind parse_model(const std::string& s);
PilotMode parse_pilot_mode(const std::string& s);

/// r_n = c * n^(-gamma).
struct RadiusSchedule {
  double c = 0.0;
  double gamma = 0.0;
  double at(std::int64_t n) const;
};

struct PilotSpec {
  double r = 0.0;  // squared error of theta_hat / f_hat / pi_hat
  double s = 0.0;  // squared error of mu_hat (causal only)
  PilotMode mode = PilotMode::fixed_axis;
  std::size_t k = 1;     // coordinates or cells used by spread mode
  std::size_t axis = 0;  // first coordinate or cell of the perturbation
};

/// theta* + sqrt(r) u with |u| = 1. Pads theta* when the direction needs more
/// coordinates.
SeqVector make_pilot(const SeqVector& truth, const PilotSpec& spec, std::uint64_t seed);
/// f* + sqrt(r) g with int g = 0 and int g^2 = 1 on the truth's grid. Tries -g
/// when g breaks [0, M]; throws std::domain_error when neither sign fits.
PiecewiseDensity make_pilot(const PiecewiseDensity& truth, const PilotSpec& spec, std::uint64_t seed);
/// pi_hat = pi* + sqrt(r) g, mu_hat = mu* + sqrt(s) g with int g^2 = 1; fixed
/// axis is the constant shift. Throws std::domain_error outside the margin.
NuisancePilots make_pilot(const CausalModel& truth, const PilotSpec& spec, std::uint64_t seed);

using Truth = std::variant<SeqVector, PiecewiseDensity, CausalModel>;

struct ExperimentConfig {
  ModelKind model = ModelKind::gsm;
  std::vector<std::string> estimators;
  std::vector<std::int64_t> n_grid;
  RadiusSchedule radius;
  RadiusSchedule s_radius;
  std::int64_t replications = 1000;
  std::uint64_t seed = 0;
  std::string output;
  std::size_t workers = 1;
  std::optional<Truth> truth;
  PilotMode pilot_mode = PilotMode::fixed_axis;
  std::size_t pilot_k = 1;
  std::size_t pilot_axis = 0;
  std::optional<std::size_t> truncation;  // higher_order; default: full length
  HigherOrderTail tail = HigherOrderTail::bias_consistent;
  double delta = 0.1;                     // adaptive
  std::size_t fitter_cells = 4;           // cross_fit
  double margin = CausalModel::kDefaultMargin;

  /// Throws ConfigError.
  void validate() const;
};

/// Estimator names accepted per model.
std::vector<std::string> estimators_for(ModelKind model);

struct RiskRow {
  std::string model;
  std::string estimator;
  std::int64_t n = 0;
  double r = 0.0;
  double s = 0.0;
  double mse = 0.0;
  double mse_se = 0.0;
  double bias = 0.0;
  double bias_se = 0.0;
  double var = 0.0;
  std::int64_t reps = 0;
  std::uint64_t seed = 0;
};

struct RiskReport {
  std::vector<RiskRow> rows;
};

/// Error summary of R replicate errors (est - truth), aggregated in index order.
struct ErrorStats {
  double mse = 0.0;
  double mse_se = 0.0;
  double bias = 0.0;
  double bias_se = 0.0;
  double var = 0.0;  // R - 1 denominator
};
ErrorStats summarize_errors(const std::vector<double>& errors);

/// Runs fn(i) for i in [0, count) on `workers` threads with static chunks.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

RiskReport mc_risk(const ExperimentConfig& config);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
/// OLS of log mse on log n. Requires >= 3 points with positive coordinates.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

struct CriReport {
  std::string estimator;
  double alpha = 0.0;
  std::int64_t n = 0;
  double beta_hat = 0.0;   // sqrt of measured risk at D1
  double beta_se = 0.0;
  double risk_d2 = 0.0;
  double risk_d2_se = 0.0;
  double bound = 0.0;      // cri_bound at beta_hat + 3 SE
  double slack = 0.0;      // risk_d2 + 3 SE - bound
  bool pass = false;
};
/// Measures the risk of a gsm estimator with pilot theta at D1 = N(theta, I/n)
/// and at D2 = N((1 + alpha/|theta|) theta, I/n).
CriReport cri_check(const std::string& estimator, const SeqVector& theta, double alpha, std::int64_t n,
                    std::int64_t reps, std::uint64_t seed, double delta = 0.1, std::size_t workers = 1);

enum class Direction { parallel, orthogonal };
const char* to_string(Direction d);

struct AdaptiveRow {
  std::int64_t n = 0;
  double r = 0.0;
  double delta = 0.0;
  Direction direction = Direction::parallel;
  double mse_ad = 0.0, se_ad = 0.0;
  double mse_pi = 0.0, se_pi = 0.0;
  double mse_fo = 0.0, se_fo = 0.0;
  double plugin_share = 0.0;  // fraction of replicates where the plugin was chosen
  double envelope = 0.0;
};
/// f_delta(r) = r^2 + min{r |th|^2 + delta |th|^2 / n, log(1/delta) |th|^2 / n}.
double adaptive_envelope(double r, double delta, double norm2, std::int64_t n);
/// Common random numbers across the three estimators. Truth is
/// theta_hat + sqrt(r) u, with u along theta_hat or orthogonal to it.
std::vector<AdaptiveRow> adaptive_risk_profile(const SeqVector& theta_hat, double delta,
                                               const std::vector<std::int64_t>& n_grid,
                                               const std::vector<RadiusSchedule>& radii,
                                               const std::vector<Direction>& directions, std::int64_t reps,
                                               std::uint64_t seed, std::size_t workers = 1);

struct DivergenceRow {
  std::string kind;  // "gaussian" or "sign_mixture"
  std::int64_t n = 0;
  double param = 0.0;  // delta or eps
  double closed = 0.0;
  double oracle = 0.0;
  double rel_err = 0.0;
  bool bound_dominates = true;  // cosh form <= exp bound (sign mixture with n eps^2 <= 1)
};
/// Closed forms against 1-D quadrature on a fixed 50-point grid.
std::vector<DivergenceRow> divergence_table();

/// Constructions accepted by lb_default_grid.
std::vector<std::string> lb_constructions();
/// The fixed 10-point audit grid of one construction.
std::vector<LBInstance> lb_default_grid(const std::string& construction);

}  // namespace funcest
