#include "funcest/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "funcest/divergence.hpp"
#include "funcest/numeric.hpp"
#include "funcest/rng.hpp"

namespace funcest {

const char* to_string(ModelKind m) {
  switch (m) {
    case ModelKind::gsm: return "gsm";
    case ModelKind::density: return "density";
    case ModelKind::causal: return "causal";
  }
  return "?";
}

const char* to_string(PilotMode m) {
  switch (m) {
    case PilotMode::fixed_axis: return "fixed-axis";
    case PilotMode::random_direction: return "random-direction";
    case PilotMode::spread: return "spread";
  }
  return "?";
}

const char* to_string(Direction d) { return d == Direction::parallel ? "parallel" : "orthogonal"; }

ModelKind parse_model(const std::string& s) {
  if (s == "gsm") return ModelKind::gsm;
  if (s == "density") return ModelKind::density;
  if (s == "causal") return ModelKind::causal;
  throw ConfigError("unknown model '" + s + "'");
}

PilotMode parse_pilot_mode(const std::string& s) {
  if (s == "fixed-axis") return PilotMode::fixed_axis;
  if (s == "random-direction") return PilotMode::random_direction;
  if (s == "spread") return PilotMode::spread;
  throw ConfigError("unknown pilot mode '" + s + "'");
}

double RadiusSchedule::at(std::int64_t n) const { return c * std::pow(static_cast<double>(n), -gamma); }

// ---- pilots ----

namespace {

void require_radius(double r, const char* what) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument(std::string(what) + ": radius must be >= 0");
}

// Unnormalized direction on `len` slots following the pilot mode.
std::vector<double> raw_direction(std::size_t len, const PilotSpec& spec, std::uint64_t seed) {
  std::vector<double> v(len, 0.0);
  switch (spec.mode) {
    case PilotMode::fixed_axis:
      v.at(spec.axis) = 1.0;
      break;
    case PilotMode::random_direction: {
      CounterRng rng(seed);
      for (double& x : v) x = rng.normal();
      break;
    }
    case PilotMode::spread:
      if (spec.k == 0) throw std::invalid_argument("make_pilot: spread mode needs k >= 1");
      for (std::size_t j = 0; j < spec.k; ++j) v.at(spec.axis + j) = 1.0;
      break;
  }
  return v;
}

}  // namespace

SeqVector make_pilot(const SeqVector& truth, const PilotSpec& spec, std::uint64_t seed) {
  require_radius(spec.r, "make_pilot");
  if (spec.r == 0.0) return truth;
  std::size_t len = truth.ambient_len();
  if (spec.mode == PilotMode::fixed_axis) len = std::max(len, spec.axis + 1);
  if (spec.mode == PilotMode::spread) len = std::max(len, spec.axis + spec.k);
  if (len == 0) len = 1;
  std::vector<double> u = raw_direction(len, spec, seed);
  const double norm = std::sqrt(squared_norm(u));
  if (!(norm > 0.0)) throw std::domain_error("make_pilot: degenerate direction");
  const double scale = std::sqrt(spec.r) / norm;
  const SeqVector base = truth.padded(len);
  std::vector<double> out(base.coeffs().begin(), base.coeffs().end());
  for (std::size_t j = 0; j < len; ++j) out[j] += scale * u[j];
  return SeqVector(std::move(out));
}

PiecewiseDensity make_pilot(const PiecewiseDensity& truth, const PilotSpec& spec, std::uint64_t seed) {
  require_radius(spec.r, "make_pilot");
  if (spec.r == 0.0) return truth;
  const std::size_t cells = truth.cells();
  if (cells < 2) throw std::domain_error("make_pilot: a one-cell density has no mean-zero direction");
  std::vector<double> g = raw_direction(cells, spec, seed);
  const double mean = compensated_sum(g) / static_cast<double>(cells);
  for (double& x : g) x -= mean;
  const double l2 = std::sqrt(squared_norm(g) / static_cast<double>(cells));
  if (!(l2 > 0.0)) throw std::domain_error("make_pilot: degenerate density direction");
  const double t = std::sqrt(spec.r) / l2;
  for (double sign : {1.0, -1.0}) {
    std::vector<double> h(cells);
    bool ok = true;
    for (std::size_t k = 0; k < cells; ++k) {
      h[k] = truth[k] + sign * t * g[k];
      ok = ok && h[k] >= 0.0 && h[k] <= truth.sup_bound();
    }
    if (ok) return PiecewiseDensity(GridFunction(std::move(h)), truth.sup_bound());
  }
  throw std::domain_error("make_pilot: radius not reachable inside [0, M] for this direction");
}

NuisancePilots make_pilot(const CausalModel& truth, const PilotSpec& spec, std::uint64_t seed) {
  require_radius(spec.r, "make_pilot");
  require_radius(spec.s, "make_pilot");
  const std::size_t cells = truth.cells();
  std::vector<double> g = spec.mode == PilotMode::fixed_axis ? std::vector<double>(cells, 1.0)
                                                             : raw_direction(cells, spec, seed);
  const double l2 = std::sqrt(squared_norm(g) / static_cast<double>(cells));
  if (!(l2 > 0.0)) throw std::domain_error("make_pilot: degenerate direction");
  for (double& x : g) x /= l2;
  const double lo = truth.margin();
  const double hi = 1.0 - truth.margin();
  for (double sign : {1.0, -1.0}) {
    std::vector<double> pi(cells), mu(cells);
    bool ok = true;
    for (std::size_t k = 0; k < cells; ++k) {
      pi[k] = truth.pi()[k] + sign * std::sqrt(spec.r) * g[k];
      mu[k] = truth.mu()[k] + sign * std::sqrt(spec.s) * g[k];
      ok = ok && pi[k] >= lo && pi[k] <= hi && mu[k] >= lo && mu[k] <= hi;
    }
    if (ok) return NuisancePilots(GridFunction(std::move(pi)), GridFunction(std::move(mu)), truth.margin());
  }
  throw std::domain_error("make_pilot: pilot would leave [margin, 1 - margin]");
}

// ---- configuration ----

std::vector<std::string> estimators_for(ModelKind model) {
  switch (model) {
    case ModelKind::gsm: return {"plugin", "first_order", "higher_order", "adaptive"};
    case ModelKind::density: return {"plugin", "first_order"};
    case ModelKind::causal: return {"plugin", "first_order", "cross_fit"};
  }
  return {};
}

void ExperimentConfig::validate() const {
  if (estimators.empty()) throw ConfigError("estimators must not be empty");
  const auto allowed = estimators_for(model);
  for (const auto& e : estimators) {
    if (std::find(allowed.begin(), allowed.end(), e) == allowed.end()) {
      throw ConfigError("estimator '" + e + "' is not available for model " + to_string(model));
    }
  }
  if (n_grid.empty()) throw ConfigError("n_grid must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw ConfigError("n_grid entries must be positive");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw ConfigError("n_grid must be strictly increasing");
  }
  for (const RadiusSchedule* rs : {&radius, &s_radius}) {
    if (!(rs->c >= 0.0) || !std::isfinite(rs->c)) throw ConfigError("radius coefficient must be >= 0");
    if (!(rs->gamma >= 0.0 && rs->gamma <= 2.0)) throw ConfigError("radius exponent must lie in [0, 2]");
  }
  if (replications < 100) throw ConfigError("replications must be at least 100");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (!truth) throw ConfigError("truth is required");
  const bool match = (model == ModelKind::gsm && std::holds_alternative<SeqVector>(*truth)) ||
                     (model == ModelKind::density && std::holds_alternative<PiecewiseDensity>(*truth)) ||
                     (model == ModelKind::causal && std::holds_alternative<CausalModel>(*truth));
  if (!match) throw ConfigError("truth does not match the model");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (fitter_cells < 1) throw ConfigError("fitter_cells must be positive");
}

// ---- Monte Carlo ----

ErrorStats summarize_errors(const std::vector<double>& errors) {
  const std::size_t count = errors.size();
  if (count < 2) throw std::invalid_argument("summarize_errors: need at least two replicates");
  const double rd = static_cast<double>(count);
  CompensatedSum s1, s2;
  for (double e : errors) {
    s1.add(e);
    s2.add(e * e);
  }
  ErrorStats out;
  out.bias = s1.value() / rd;
  out.mse = s2.value() / rd;
  CompensatedSum dev_e, dev_sq;
  for (double e : errors) {
    dev_e.add((e - out.bias) * (e - out.bias));
    dev_sq.add((e * e - out.mse) * (e * e - out.mse));
  }
  out.var = dev_e.value() / (rd - 1.0);
  out.bias_se = std::sqrt(out.var / rd);
  out.mse_se = std::sqrt(dev_sq.value() / (rd - 1.0) / rd);
  return out;
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t end = std::min(count, (w + 1) * chunk);
        for (std::size_t i = w * chunk; i < end; ++i) fn(i);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

namespace {

using ReplicateFn = std::function<double(std::uint64_t seed)>;

ReplicateFn gsm_estimator(const ExperimentConfig& cfg, const std::string& est, const SeqVector& truth,
                          const SeqVector& pilot, std::int64_t n) {
  if (est == "plugin") return [q = plugin_q(pilot)](std::uint64_t) { return q; };
  if (est == "first_order") {
    return [&, n](std::uint64_t seed) { return first_order_q(sample_gsm(truth, n, seed), pilot); };
  }
  if (est == "higher_order") {
    const std::size_t t = cfg.truncation.value_or(pilot.ambient_len());
    return [&, n, t](std::uint64_t seed) {
      const GsmSample sample = sample_gsm(truth, n, seed);
      return higher_order_q(split_sample(sample, derive_seed(seed, {"split"})), pilot, t, cfg.tail);
    };
  }
  if (est == "adaptive") {
    return [&, n](std::uint64_t seed) { return adaptive_q(sample_gsm(truth, n, seed), pilot, cfg.delta); };
  }
  throw ConfigError("unknown gsm estimator " + est);
}

ReplicateFn density_estimator(const std::string& est, const PiecewiseDensity& truth, const PiecewiseDensity& pilot,
                              std::int64_t n) {
  if (est == "plugin") return [q = plugin_t(pilot)](std::uint64_t) { return q; };
  if (est == "first_order") {
    return [&, n](std::uint64_t seed) { return first_order_t(sample_density(truth, n, seed), pilot); };
  }
  throw ConfigError("unknown density estimator " + est);
}

ReplicateFn causal_estimator(const ExperimentConfig& cfg, const std::string& est, const CausalModel& truth,
                             const NuisancePilots& pilot, std::int64_t n) {
  if (est == "plugin") {
    return [&, n](std::uint64_t seed) { return plugin_psi(sample_causal(truth, n, seed), pilot); };
  }
  if (est == "first_order") {
    return [&, n](std::uint64_t seed) { return first_order_psi(sample_causal(truth, n, seed), pilot); };
  }
  if (est == "cross_fit") {
    return [&, n, fit = histogram_fitter(cfg.fitter_cells, cfg.margin)](std::uint64_t seed) {
      return cross_fit_psi(sample_causal(truth, n, seed), fit, derive_seed(seed, {"crossfit"}), cfg.margin);
    };
  }
  throw ConfigError("unknown causal estimator " + est);
}

}  // namespace

RiskReport mc_risk(const ExperimentConfig& cfg) {
  cfg.validate();
  RiskReport report;
  const std::string model = to_string(cfg.model);
  const auto reps = static_cast<std::size_t>(cfg.replications);
  for (std::int64_t n : cfg.n_grid) {
    PilotSpec spec;
    spec.r = cfg.radius.at(n);
    spec.s = cfg.model == ModelKind::causal ? cfg.s_radius.at(n) : 0.0;
    spec.mode = cfg.pilot_mode;
    spec.k = cfg.pilot_k;
    spec.axis = cfg.pilot_axis;
    const std::uint64_t pilot_seed = derive_seed(cfg.seed, {"pilot", model, n});

    // Pilot and truth live for the whole n-slice; estimators capture them by reference.
    SeqVector gsm_truth, gsm_pilot;
    std::optional<PiecewiseDensity> dens_pilot;
    std::optional<NuisancePilots> causal_pilot;
    double target = 0.0;
    switch (cfg.model) {
      case ModelKind::gsm: {
        gsm_pilot = make_pilot(std::get<SeqVector>(*cfg.truth), spec, pilot_seed);
        gsm_truth = std::get<SeqVector>(*cfg.truth).padded(gsm_pilot.ambient_len());
        target = quadratic_functional(gsm_truth);
        break;
      }
      case ModelKind::density:
        dens_pilot = make_pilot(std::get<PiecewiseDensity>(*cfg.truth), spec, pilot_seed);
        target = t_quadratic(std::get<PiecewiseDensity>(*cfg.truth));
        break;
      case ModelKind::causal:
        causal_pilot = make_pilot(std::get<CausalModel>(*cfg.truth), spec, pilot_seed);
        target = psi_cov(std::get<CausalModel>(*cfg.truth));
        break;
    }

    for (const auto& est : cfg.estimators) {
      ReplicateFn fn;
      switch (cfg.model) {
        case ModelKind::gsm: fn = gsm_estimator(cfg, est, gsm_truth, gsm_pilot, n); break;
        case ModelKind::density:
          fn = density_estimator(est, std::get<PiecewiseDensity>(*cfg.truth), *dens_pilot, n);
          break;
        case ModelKind::causal:
          fn = causal_estimator(cfg, est, std::get<CausalModel>(*cfg.truth), *causal_pilot, n);
          break;
      }
      std::vector<double> errors(reps);
      parallel_for(reps, cfg.workers, [&](std::size_t i) {
        errors[i] = fn(derive_seed(cfg.seed, {model, est, n, i})) - target;
      });
      const ErrorStats st = summarize_errors(errors);
      report.rows.push_back({model, est, n, spec.r, spec.s, st.mse, st.mse_se, st.bias, st.bias_se, st.var,
                             cfg.replications, cfg.seed});
    }
  }
  return report;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("fit_rate: need at least three points");
  std::vector<double> x, y;
  for (const auto& [n, mse] : points) {
    if (!(n > 0.0) || !(mse > 0.0)) throw std::invalid_argument("fit_rate: values must be positive");
    x.push_back(std::log(n));
    y.push_back(std::log(mse));
  }
  const double k = static_cast<double>(x.size());
  const double mx = compensated_sum(x) / k;
  const double my = compensated_sum(y) / k;
  CompensatedSum sxx, sxy, syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx.add((x[i] - mx) * (x[i] - mx));
    sxy.add((x[i] - mx) * (y[i] - my));
    syy.add((y[i] - my) * (y[i] - my));
  }
  if (!(sxx.value() > 0.0)) throw std::invalid_argument("fit_rate: n values must not all coincide");
  RateFit fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy.value() > 0.0 ? sxy.value() * sxy.value() / (sxx.value() * syy.value()) : 1.0;
  return fit;
}

// ---- CRI ----

namespace {

double gsm_estimate(const std::string& est, const GsmSample& sample, const SeqVector& pilot, double delta) {
  if (est == "plugin") return plugin_q(pilot);
  if (est == "first_order") return first_order_q(sample, pilot);
  if (est == "adaptive") return adaptive_q(sample, pilot, delta);
  throw std::invalid_argument("cri_check: estimator must be plugin, first_order or adaptive");
}

}  // namespace

CriReport cri_check(const std::string& estimator, const SeqVector& theta, double alpha, std::int64_t n,
                    std::int64_t reps, std::uint64_t seed, double delta, std::size_t workers) {
  const double norm = theta.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("cri_check: theta must be nonzero");
  if (alpha < 0.0) throw std::invalid_argument("cri_check: alpha must be nonnegative");
  if (reps < 2) throw std::invalid_argument("cri_check: need at least two replicates");
  const SeqVector theta2 = (1.0 + alpha / norm) * theta;
  const double q1 = quadratic_functional(theta);
  const double q2 = quadratic_functional(theta2);
  const auto count = static_cast<std::size_t>(reps);

  auto measure = [&](const SeqVector& truth, double target, const char* tag) {
    std::vector<double> errors(count);
    parallel_for(count, workers, [&](std::size_t i) {
      const GsmSample s = sample_gsm(truth, n, derive_seed(seed, {"cri", estimator, tag, n, i}));
      errors[i] = gsm_estimate(estimator, s, theta, delta) - target;
    });
    return summarize_errors(errors);
  };
  const ErrorStats d1 = measure(theta, q1, "d1");
  const ErrorStats d2 = measure(theta2, q2, "d2");

  CriReport out;
  out.estimator = estimator;
  out.alpha = alpha;
  out.n = n;
  out.beta_hat = std::sqrt(d1.mse);
  out.beta_se = out.beta_hat > 0.0 ? d1.mse_se / (2.0 * out.beta_hat) : 0.0;
  out.risk_d2 = d2.mse;
  out.risk_d2_se = d2.mse_se;
  out.bound = cri_bound(theta, alpha, out.beta_hat + 3.0 * out.beta_se, n);
  out.slack = out.risk_d2 + 3.0 * out.risk_d2_se - out.bound;
  // The deterministic plugin meets the bound with equality.
  out.pass = out.risk_d2 + 3.0 * out.risk_d2_se >= out.bound * (1.0 - 1e-12);
  return out;
}

// ---- adaptive profile ----

double adaptive_envelope(double r, double delta, double norm2, std::int64_t n) {
  const double nd = static_cast<double>(n);
  return r * r + std::min(r * norm2 + delta * norm2 / nd, std::log(1.0 / delta) * norm2 / nd);
}

std::vector<AdaptiveRow> adaptive_risk_profile(const SeqVector& theta_hat, double delta,
                                               const std::vector<std::int64_t>& n_grid,
                                               const std::vector<RadiusSchedule>& radii,
                                               const std::vector<Direction>& directions, std::int64_t reps,
                                               std::uint64_t seed, std::size_t workers) {
  const double norm = theta_hat.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("adaptive_risk_profile: pilot must be nonzero");
  if (reps < 2) throw std::invalid_argument("adaptive_risk_profile: need at least two replicates");
  const std::size_t len = theta_hat.ambient_len() + 1;
  const SeqVector pilot = theta_hat.padded(len);
  const SeqVector along = (1.0 / norm) * pilot;
  const SeqVector across = SeqVector::axis(len, len - 1);
  const double norm2 = norm * norm;
  const auto count = static_cast<std::size_t>(reps);

  std::vector<AdaptiveRow> rows;
  for (std::int64_t n : n_grid) {
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
      const double r = radii[ri].at(n);
      for (Direction dir : directions) {
        const SeqVector truth = pilot + std::sqrt(r) * (dir == Direction::parallel ? along : across);
        const double target = quadratic_functional(truth);
        std::vector<double> e_ad(count), e_pi(count), e_fo(count), picked(count);
        parallel_for(count, workers, [&](std::size_t i) {
          const GsmSample s = sample_gsm(truth, n, derive_seed(seed, {"adaptive", n, ri, to_string(dir), i}));
          const AdaptiveEstimate ad = adaptive_q_detail(s, pilot, delta);
          e_ad[i] = ad.value - target;
          e_pi[i] = plugin_q(pilot) - target;
          e_fo[i] = first_order_q(s, pilot) - target;
          picked[i] = ad.chose_plugin ? 1.0 : 0.0;
        });
        const ErrorStats a = summarize_errors(e_ad);
        const ErrorStats p = summarize_errors(e_pi);
        const ErrorStats f = summarize_errors(e_fo);
        AdaptiveRow row;
        row.n = n;
        row.r = r;
        row.delta = delta;
        row.direction = dir;
        row.mse_ad = a.mse;
        row.se_ad = a.mse_se;
        row.mse_pi = p.mse;
        row.se_pi = p.mse_se;
        row.mse_fo = f.mse;
        row.se_fo = f.mse_se;
        row.plugin_share = compensated_sum(picked) / static_cast<double>(count);
        row.envelope = adaptive_envelope(r, delta, norm2, n);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

// ---- divergence table ----

std::vector<DivergenceRow> divergence_table() {
  std::vector<DivergenceRow> rows;
  const std::int64_t ns[] = {1, 10, 100, 1000, 10000};
  const double scaled[] = {0.01, 0.1, 0.5, 1.0, 2.0};  // n delta^2 or n eps^2
  for (std::int64_t n : ns) {
    const double nd = static_cast<double>(n);
    for (double x : scaled) {
      DivergenceRow g;
      g.kind = "gaussian";
      g.n = n;
      g.param = std::sqrt(x / nd);
      g.closed = chi2_gaussians(SeqVector({g.param}), SeqVector({0.0}), n);
      g.oracle = chi2_gaussians_quadrature_1d(g.param, n);
      g.rel_err = std::abs(g.closed - g.oracle) / std::abs(g.oracle);
      rows.push_back(g);

      DivergenceRow s;
      s.kind = "sign_mixture";
      s.n = n;
      s.param = std::sqrt(x / nd);
      const SignMixtureChi2 c = chi2_point_vs_signmixture(1, s.param, n);
      s.closed = c.exact;
      s.oracle = chi2_signmixture_quadrature_1d(s.param, n);
      s.rel_err = std::abs(s.closed - s.oracle) / std::abs(s.oracle);
      s.bound_dominates = !(x <= 1.0) || c.exact <= c.bound;
      rows.push_back(s);
    }
  }
  return rows;
}

// ---- lower-bound audit grids ----

std::vector<std::string> lb_constructions() {
  return {"gsm_lb1", "gsm_lb2", "gsm_lb3", "density_twopoint", "density_bump", "causal_case1", "causal_case2"};
}

namespace {

const std::int64_t kLbNs[] = {10, 100, 1000, 10000, 100000};

NuisancePilots grid_pilots(int which) {
  if (which == 0) return NuisancePilots(GridFunction::constant(1, 0.5), GridFunction::constant(1, 0.5));
  return NuisancePilots(GridFunction({0.2, 0.8, 0.5, 0.3}), GridFunction({0.3, 0.6, 0.7, 0.4}));
}

}  // namespace

std::vector<LBInstance> lb_default_grid(const std::string& construction) {
  std::vector<LBInstance> out;
  const SeqVector th({1.0, 0.5});
  if (construction == "gsm_lb1") {
    for (std::int64_t n : kLbNs) {
      const double nd = static_cast<double>(n);
      out.push_back(gsm_lb1(th, 2.0 / nd, n));
      out.push_back(gsm_lb1(th, 5.0 * std::sqrt(quadratic_functional(th) / nd), n));
    }
  } else if (construction == "gsm_lb2") {
    for (std::int64_t n : kLbNs) {
      const double nd = static_cast<double>(n);
      out.push_back(gsm_lb2(th, kDefaultAlpha / (2.0 * nd), n));
      out.push_back(gsm_lb2(th, kDefaultAlpha / (8.0 * nd), n));
    }
  } else if (construction == "gsm_lb3") {
    const SeqVector offsets({1.0, 0.5, 0.001, -0.002});
    for (std::int64_t n : {25, 100}) {
      for (double r : {0.2, 0.35, 0.5, 1.0, 2.0}) out.push_back(gsm_lb3(offsets, r, n));
    }
  } else if (construction == "density_twopoint") {
    const PiecewiseDensity f1({0.5, 1.5});
    const PiecewiseDensity f2({0.2, 0.8, 1.0, 2.0});
    const std::pair<std::int64_t, double> pts[] = {{10, 0.5}, {100, 0.05}, {1000, 0.01}, {1000, 1e-4}, {10000, 1e-3}};
    for (const auto* f : {&f1, &f2}) {
      for (const auto& [n, r] : pts) out.push_back(density_twopoint(*f, twopoint_eps(*f, r, n), n, r));
    }
  } else if (construction == "density_bump") {
    const PiecewiseDensity f1({0.0, 0.0, 2.0, 2.0});
    const PiecewiseDensity f2({0.001, 1.999, 1.0, 1.0});
    const std::pair<std::int64_t, double> pts[] = {{10, 1.0}, {100, 1.0}, {100, 0.1}, {1000, 0.1}, {1000, 0.01}};
    for (const auto* f : {&f1, &f2}) {
      for (const auto& [n, r] : pts) out.push_back(density_bump_instance(*f, r, n));
    }
  } else if (construction == "causal_case1") {
    for (int which : {0, 1}) {
      const NuisancePilots p = grid_pilots(which);
      for (std::int64_t n : kLbNs) out.push_back(causal_case1(p, case1_zeta(p, n), n));
    }
  } else if (construction == "causal_case2") {
    struct Pt {
      std::int64_t n;
      double r, s;
    };
    const Pt pts[] = {{10, 0.01, 0.01}, {100, 0.01, 0.001}, {100, 1e-3, 1e-2}, {1000, 1e-3, 1e-3}, {1000, 0.1, 0.1}};
    for (int which : {0, 1}) {
      const NuisancePilots p = grid_pilots(which);
      for (const Pt& pt : pts) out.push_back(causal_case2_instance(p, pt.r, pt.s, pt.n));
    }
  } else {
    throw std::invalid_argument("unknown construction '" + construction + "'");
  }
  return out;
}

}  // namespace funcest
