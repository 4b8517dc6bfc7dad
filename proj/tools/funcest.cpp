// Command-line front end: estimators, Monte Carlo sweeps and lower-bound audits.
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "funcest/causal.hpp"
#include "funcest/density.hpp"
#include "funcest/gsm.hpp"
#include "funcest/harness.hpp"
#include "funcest/io.hpp"
#include "funcest/lower_bounds.hpp"

using namespace funcest;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kVerifyFailed = 2;

struct EstimateArgs {
  std::string model = "gsm";
  std::string estimator = "first_order";
  std::string data;
  std::string pilot;
  std::int64_t n = 1;
  std::size_t truncation = 0;
  double delta = 0.1;
  std::uint64_t seed = 0;
  std::size_t fitter_cells = 4;
  double margin = CausalModel::kDefaultMargin;
};

int run_estimate(const EstimateArgs& a) {
  double value = 0.0;
  if (a.model == "gsm") {
    const SeqVector y(read_numbers(a.data));
    const SeqVector pilot(read_numbers(a.pilot));
    const GsmSample sample{y, a.n, a.seed};
    if (a.estimator == "plugin") {
      value = plugin_q(pilot);
    } else if (a.estimator == "first_order") {
      value = first_order_q(sample, pilot);
    } else if (a.estimator == "higher_order") {
      const std::size_t t = a.truncation == 0 ? pilot.ambient_len() : a.truncation;
      value = higher_order_q(split_sample(sample, a.seed), pilot, t);
    } else if (a.estimator == "adaptive") {
      value = adaptive_q(sample, pilot, a.delta);
    } else {
      throw ConfigError("unknown gsm estimator " + a.estimator);
    }
  } else if (a.model == "density") {
    const PiecewiseDensity pilot = read_density(a.pilot);
    if (a.estimator == "plugin") {
      value = plugin_t(pilot);
    } else if (a.estimator == "first_order") {
      value = first_order_t(DensitySample{read_numbers(a.data), a.seed}, pilot);
    } else {
      throw ConfigError("unknown density estimator " + a.estimator);
    }
  } else if (a.model == "causal") {
    const CausalSample sample{read_causal_sample(a.data), a.seed};
    if (a.estimator == "cross_fit") {
      value = cross_fit_psi(sample, histogram_fitter(a.fitter_cells, a.margin), a.seed, a.margin);
    } else {
      const NuisancePilots pilots = read_pilots(a.pilot, a.margin);
      if (a.estimator == "plugin") {
        value = plugin_psi(sample, pilots);
      } else if (a.estimator == "first_order") {
        value = first_order_psi(sample, pilots);
      } else {
        throw ConfigError("unknown causal estimator " + a.estimator);
      }
    }
  } else {
    throw ConfigError("unknown model " + a.model);
  }
  std::cout << format_double(value) << '\n';
  return kOk;
}

ExperimentConfig config_with_overrides(const std::string& path, std::size_t workers, const std::string& output) {
  ExperimentConfig cfg = load_config(path);
  if (workers > 0) cfg.workers = workers;
  if (!output.empty()) cfg.output = output;
  return cfg;
}

void emit_risk(const ExperimentConfig& cfg, const RiskReport& report) {
  if (cfg.output.empty() || cfg.output == "-") {
    write_risk_csv(std::cout, report);
    return;
  }
  std::ofstream out(cfg.output);
  if (!out) throw ConfigError("cannot write " + cfg.output);
  write_risk_csv(out, report);
}

int run_rate_study(const ExperimentConfig& cfg) {
  const RiskReport report = mc_risk(cfg);
  if (!cfg.output.empty() && cfg.output != "-") emit_risk(cfg, report);
  std::map<std::string, std::vector<std::pair<double, double>>> points;
  for (const auto& row : report.rows) points[row.estimator].emplace_back(static_cast<double>(row.n), row.mse);
  std::cout << "estimator,slope,intercept,r2\n";
  for (const auto& est : cfg.estimators) {
    const auto& pts = points[est];
    bool positive = pts.size() >= 3;
    for (const auto& p : pts) positive = positive && p.second > 0.0;
    if (!positive) {
      std::cout << est << ",nan,nan,nan\n";
      continue;
    }
    const RateFit fit = fit_rate(pts);
    std::cout << est << ',' << format_double(fit.slope) << ',' << format_double(fit.intercept) << ','
              << format_double(fit.r2) << '\n';
  }
  return kOk;
}

int run_lb_verify(std::vector<std::string> constructions) {
  if (constructions.empty()) constructions = lb_constructions();
  bool all = true;
  write_lb_csv_header(std::cout);
  for (const auto& c : constructions) {
    for (const auto& inst : lb_default_grid(c)) {
      write_lb_csv_row(std::cout, inst);
      all = all && inst.passed();
    }
  }
  return all ? kOk : kVerifyFailed;
}

int run_divergence() {
  constexpr double kTol = 1e-8;
  bool ok = true;
  std::cout << "kind,n,param,closed,oracle,rel_err,bound_dominates\n";
  for (const auto& row : divergence_table()) {
    std::cout << row.kind << ',' << row.n << ',' << format_double(row.param) << ',' << format_double(row.closed)
              << ',' << format_double(row.oracle) << ',' << format_double(row.rel_err) << ','
              << (row.bound_dominates ? "yes" : "no") << '\n';
    ok = ok && row.rel_err <= kTol && row.bound_dominates;
  }
  return ok ? kOk : kVerifyFailed;
}

int run_cri(const std::string& estimator, const std::vector<double>& theta, double alpha, std::int64_t n,
            std::int64_t reps, std::uint64_t seed, double delta, std::size_t workers) {
  const CriReport rep = cri_check(estimator, SeqVector(theta), alpha, n, reps, seed, delta, workers);
  std::cout << "estimator,alpha,n,beta_hat,beta_se,risk_d2,risk_d2_se,bound,slack,pass\n";
  std::cout << rep.estimator << ',' << format_double(rep.alpha) << ',' << rep.n << ','
            << format_double(rep.beta_hat) << ',' << format_double(rep.beta_se) << ','
            << format_double(rep.risk_d2) << ',' << format_double(rep.risk_d2_se) << ','
            << format_double(rep.bound) << ',' << format_double(rep.slack) << ','
            << (rep.pass ? "pass" : "fail") << '\n';
  return rep.pass ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional estimation with black-box pilots"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "One-shot estimate from data and pilot files");
  estimate->add_option("--model", est.model, "gsm | density | causal")->required();
  estimate->add_option("--estimator", est.estimator, "plugin | first_order | higher_order | adaptive | cross_fit");
  estimate->add_option("--data", est.data, "Observation file")->required();
  estimate->add_option("--pilot", est.pilot, "Pilot file");
  estimate->add_option("--n", est.n, "Noise scale of a gsm observation");
  estimate->add_option("--truncation", est.truncation, "higher_order truncation (0 = full)");
  estimate->add_option("--delta", est.delta, "adaptive confidence level");
  estimate->add_option("--seed", est.seed, "Seed for splitting");
  estimate->add_option("--fitter-cells", est.fitter_cells, "cross_fit histogram cells");
  estimate->add_option("--margin", est.margin, "Pilot margin");

  std::string config_path, output;
  std::size_t workers = 0;
  auto* risk = app.add_subcommand("risk", "Monte Carlo risk sweep from a JSON config");
  risk->add_option("config", config_path, "Config file")->required();
  risk->add_option("--workers", workers, "Override worker count");
  risk->add_option("--output", output, "Override output path ('-' for stdout)");

  auto* rate = app.add_subcommand("rate-study", "Risk sweep followed by log-log slope fits");
  rate->add_option("config", config_path, "Config file")->required();
  rate->add_option("--workers", workers, "Override worker count");
  rate->add_option("--output", output, "Risk CSV path");

  std::vector<std::string> constructions;
  auto* lb = app.add_subcommand("lb-verify", "Audit the lower-bound constructions on their default grids");
  lb->add_option("--construction", constructions, "Restrict to these constructions");

  app.add_subcommand("divergence", "Closed-form divergences against quadrature");

  std::string cri_est = "first_order";
  std::vector<double> theta{1.0};
  double alpha = 0.3, delta = 0.1;
  std::int64_t n = 100, reps = 10000;
  std::uint64_t seed = 1;
  auto* cri = app.add_subcommand("cri-check", "Constrained risk inequality check for a gsm estimator");
  cri->add_option("--estimator", cri_est, "plugin | first_order | adaptive");
  cri->add_option("--theta", theta, "Coefficients of theta")->expected(1, -1);
  cri->add_option("--alpha", alpha);
  cri->add_option("--n", n);
  cri->add_option("--reps", reps);
  cri->add_option("--seed", seed);
  cri->add_option("--delta", delta);
  cri->add_option("--workers", workers);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*estimate) return run_estimate(est);
    if (*risk) {
      const ExperimentConfig cfg = config_with_overrides(config_path, workers, output);
      emit_risk(cfg, mc_risk(cfg));
      return kOk;
    }
    if (*rate) return run_rate_study(config_with_overrides(config_path, workers, output));
    if (*lb) return run_lb_verify(constructions);
    if (app.got_subcommand("divergence")) return run_divergence();
    if (*cri) return run_cri(cri_est, theta, alpha, n, reps, seed, delta, workers == 0 ? 1 : workers);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kOk;
}
