// Acceptance run: one PASS/FAIL line per criterion, with the measured numbers.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "funcest/causal.hpp"
#include "funcest/density.hpp"
#include "funcest/divergence.hpp"
#include "funcest/gsm.hpp"
#include "funcest/harness.hpp"
#include "funcest/io.hpp"
#include "funcest/lower_bounds.hpp"
#include "funcest/numeric.hpp"
#include "funcest/rng.hpp"

using namespace funcest;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
  return buf;
}

struct Mc {
  double mean = 0.0, var = 0.0, se = 0.0;
};

Mc moments(const std::vector<double>& xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  const double k = static_cast<double>(xs.size());
  Mc m;
  m.mean = s.value() / k;
  CompensatedSum q;
  for (double x : xs) q.add((x - m.mean) * (x - m.mean));
  m.var = q.value() / (k - 1.0);
  m.se = std::sqrt(m.var / k);
  return m;
}

std::vector<double> replicate(std::size_t reps, std::size_t workers, const std::function<double(std::size_t)>& f) {
  std::vector<double> out(reps);
  parallel_for(reps, workers, [&](std::size_t i) { out[i] = f(i); });
  return out;
}

SeqVector gaussian_vector(CounterRng& rng, std::size_t len, double scale) {
  std::vector<double> v(len);
  for (double& x : v) x = scale * rng.normal();
  return SeqVector(std::move(v));
}

double log_uniform(CounterRng& rng, double lo, double hi) {
  return std::exp(std::log(lo) + rng.uniform() * (std::log(hi) - std::log(lo)));
}

// ---- 1: first-order moments ----
Outcome criterion1(std::size_t workers) {
  CounterRng rng(derive_seed(101, {"c1"}));
  const std::size_t reps = 100000;
  int bad = 0;
  double worst_z = 0.0, worst_var = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t len = 1 + rng.below(50);
    const SeqVector star = gaussian_vector(rng, len, 1.0 / std::sqrt(static_cast<double>(len)));
    const SeqVector hat = star + gaussian_vector(rng, len, 0.3 / std::sqrt(static_cast<double>(len)));
    const auto n = static_cast<std::int64_t>(std::llround(log_uniform(rng, 10.0, 10000.0)));
    const double q = quadratic_functional(star);
    const double r = squared_distance(star.coeffs(), hat.coeffs());
    const auto errs = replicate(reps, workers, [&](std::size_t i) {
      return first_order_q(sample_gsm(star, n, derive_seed(101, {"c1", inst, i})), hat) - q;
    });
    const Mc m = moments(errs);
    const double z = std::abs(m.mean + r) / m.se;
    const double v_ref = 4.0 * quadratic_functional(hat) / static_cast<double>(n);
    const double v_rel = std::abs(m.var - v_ref) / v_ref;
    worst_z = std::max(worst_z, z);
    worst_var = std::max(worst_var, v_rel);
    if (z > 4.0 || v_rel > 0.05) ++bad;
  }
  return {bad == 0, "20 instances, R=1e5; max |bias err|/SE=" + fmt(worst_z) + ", max var rel err=" + fmt(worst_var) +
                        ", violations=" + std::to_string(bad)};
}

// ---- 2: higher-order bias ----
Outcome criterion2(std::size_t workers) {
  CounterRng rng(derive_seed(102, {"c2"}));
  const std::size_t reps = 100000;
  int bad = 0, cases = 0;
  double worst_z = 0.0;
  for (int inst = 0; inst < 6; ++inst) {
    const std::size_t len = 2 + 2 * rng.below(10);
    const SeqVector star = gaussian_vector(rng, len, 1.0 / std::sqrt(static_cast<double>(len)));
    const SeqVector hat = star + gaussian_vector(rng, len, 0.5 / std::sqrt(static_cast<double>(len)));
    const auto n = static_cast<std::int64_t>(std::llround(log_uniform(rng, 10.0, 1000.0)));
    const double q = quadratic_functional(star);
    for (std::size_t t : {std::size_t{0}, len / 2, len}) {
      double tail = 0.0;
      for (std::size_t j = t; j < len; ++j) tail += (hat[j] - star[j]) * (hat[j] - star[j]);
      const auto errs = replicate(reps, workers, [&](std::size_t i) {
        const GsmSample s = sample_gsm(star, n, derive_seed(102, {"y", inst, t, i}));
        return higher_order_q(split_sample(s, derive_seed(102, {"u", inst, t, i})), hat, t) - q;
      });
      const Mc m = moments(errs);
      const double z = std::abs(m.mean + tail) / m.se;
      worst_z = std::max(worst_z, z);
      ++cases;
      if (z > 4.0) ++bad;
    }
  }
  return {bad == 0, std::to_string(cases) + " (instance, T) cases, R=1e5; max |bias err|/SE=" + fmt(worst_z) +
                        ", violations=" + std::to_string(bad)};
}

PiecewiseDensity random_density(CounterRng& rng, std::size_t cells) {
  std::vector<double> h(cells);
  double total = 0.0;
  for (double& x : h) total += (x = 0.1 + rng.uniform());
  for (double& x : h) x *= static_cast<double>(cells) / total;
  return PiecewiseDensity(std::move(h));
}

// ---- 3: density first-order bias ----
Outcome criterion3(std::size_t workers) {
  CounterRng rng(derive_seed(103, {"c3"}));
  const std::size_t reps = 40000;
  int bad = 0;
  double worst_z = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const PiecewiseDensity star = random_density(rng, 1 + rng.below(8));
    const PiecewiseDensity hat = random_density(rng, 1 + rng.below(8));
    const auto n = static_cast<std::int64_t>(5 + rng.below(100));
    const double target = t_quadratic(star);
    GridFunction a = star.heights(), b = hat.heights();
    align_grids(a, b);
    const double gap = l2sq_distance(a, b);
    const auto errs = replicate(reps, workers, [&](std::size_t i) {
      return first_order_t(sample_density(star, n, derive_seed(103, {inst, i})), hat) - target;
    });
    const Mc m = moments(errs);
    const double z = m.se > 0.0 ? std::abs(m.mean + gap) / m.se : (std::abs(m.mean + gap) < 1e-12 ? 0.0 : 1e300);
    worst_z = std::max(worst_z, z);
    if (z > 4.0) ++bad;
  }
  // Constant pilot: every replicate returns the same value.
  const PiecewiseDensity star = random_density(rng, 5);
  const PiecewiseDensity flat = PiecewiseDensity::uniform(3);
  const auto vals = replicate(1000, workers, [&](std::size_t i) {
    return first_order_t(sample_density(star, 37, derive_seed(103, {"flat", i})), flat);
  });
  const bool zero_var = std::all_of(vals.begin(), vals.end(), [&](double v) { return v == vals[0]; });
  return {bad == 0 && zero_var, "20 instances, R=4e4; max |bias err|/SE=" + fmt(worst_z) + ", violations=" +
                                    std::to_string(bad) + ", constant pilot variance " +
                                    (zero_var ? "exactly 0" : "nonzero")};
}

CausalModel random_causal(CounterRng& rng, std::size_t cells) {
  std::vector<double> mu(cells), pi(cells), eta(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    pi[k] = 0.2 + 0.6 * rng.uniform();
    mu[k] = 0.25 + 0.5 * rng.uniform();
    const double lim = std::min(mu[k] / pi[k], (1.0 - mu[k]) / (1.0 - pi[k]));
    const double lim2 = std::min(mu[k] / (1.0 - pi[k]), (1.0 - mu[k]) / pi[k]);
    eta[k] = (2.0 * rng.uniform() - 1.0) * 0.9 * std::min(lim, lim2);
  }
  return CausalModel(GridFunction(std::move(mu)), GridFunction(std::move(pi)), GridFunction(std::move(eta)));
}

GridFunction jitter(CounterRng& rng, const GridFunction& f, double amp) {
  std::vector<double> v(f.values().begin(), f.values().end());
  for (double& x : v) x = std::clamp(x + amp * (2.0 * rng.uniform() - 1.0), 0.1, 0.9);
  return GridFunction(std::move(v));
}

// ---- 4: causal double robustness ----
Outcome criterion4(std::size_t workers) {
  CounterRng rng(derive_seed(104, {"c4"}));
  const std::size_t reps = 40000;
  const std::int64_t n = 100;
  int bad = 0, cases = 0;
  double worst_z = 0.0, worst_exact = 0.0;
  for (int inst = 0; inst < 5; ++inst) {
    const CausalModel truth = random_causal(rng, 2 + rng.below(5));
    const GridFunction pi_off = jitter(rng, truth.pi(), 0.25);
    const GridFunction mu_off = jitter(rng, truth.mu(), 0.25);
    const std::vector<NuisancePilots> pilots{NuisancePilots(pi_off, mu_off), NuisancePilots(truth.pi(), mu_off),
                                             NuisancePilots(pi_off, truth.mu())};
    for (std::size_t c = 0; c < pilots.size(); ++c) {
      const double expected = conditional_bias(pilots[c], truth);
      const double target = psi_cov(truth);
      const auto errs = replicate(reps, workers, [&](std::size_t i) {
        return first_order_psi(sample_causal(truth, n, derive_seed(104, {inst, c, i})), pilots[c]) - target;
      });
      const Mc m = moments(errs);
      const double z = std::abs(m.mean - expected) / m.se;
      worst_z = std::max(worst_z, z);
      // The exact summand mean carries the same bias.
      worst_exact = std::max(worst_exact,
                             std::abs(first_order_summand_moments(pilots[c], truth).mean - target - expected));
      if (c > 0 && expected != 0.0) ++bad;
      ++cases;
      if (z > 4.0) ++bad;
    }
  }
  return {bad == 0 && worst_exact < 1e-12,
          std::to_string(cases) + " cases (one-sided exact pilots included), R=4e4, n=100; max |bias err|/SE=" +
              fmt(worst_z) + ", exact-moment err=" + fmt(worst_exact, 2) + ", violations=" + std::to_string(bad)};
}

// ---- 5: rate exponents ----
Outcome criterion5(std::size_t workers) {
  const std::vector<std::int64_t> ns{100, 316, 1000, 3162, 10000};
  const std::size_t reps = 10000;
  std::string detail;
  bool ok = true;
  for (const auto& [gamma, target] : {std::pair{0.4, -0.8}, std::pair{0.6, -1.0}}) {
    std::vector<std::pair<double, double>> pts;
    for (std::int64_t n : ns) {
      const double r = std::pow(static_cast<double>(n), -gamma);
      const SeqVector hat({1.0, 0.0});
      const SeqVector star({1.0, std::sqrt(r)});
      const double q = quadratic_functional(star);
      const auto errs = replicate(reps, workers, [&](std::size_t i) {
        return first_order_q(sample_gsm(star, n, derive_seed(105, {gamma == 0.4 ? "g04" : "g06", n, i})), hat) - q;
      });
      CompensatedSum s;
      for (double e : errs) s.add(e * e);
      pts.emplace_back(static_cast<double>(n), s.value() / static_cast<double>(reps));
    }
    const RateFit fit = fit_rate(pts);
    const bool pass = std::abs(fit.slope - target) <= 0.15;
    ok = ok && pass;
    detail += "r=n^-" + fmt(gamma, 2) + ": slope " + fmt(fit.slope) + " (target " + fmt(target, 2) + ", r2 " +
              fmt(fit.r2) + "); ";
  }
  return {ok, detail + "R=1e4"};
}

// ---- 6: divergence formulas ----
Outcome criterion6() {
  const auto rows = divergence_table();
  double worst = 0.0;
  bool dominance = true;
  for (const auto& r : rows) {
    worst = std::max(worst, r.rel_err);
    dominance = dominance && r.bound_dominates;
  }
  return {worst <= 1e-8 && dominance && rows.size() == 50,
          std::to_string(rows.size()) + " grid points; max rel err " + fmt(worst, 3) + "; cosh <= exp bound " +
              (dominance ? "everywhere" : "violated")};
}

// E[W_n^2] - 1 by the 2^{2m}-term sum over (lambda, nu), integrating the
// single-observation cross term on the bumped densities' grid.
double bump_chi2_enumerated(const PiecewiseDensity& p0, std::size_t m, double h, int n) {
  const std::size_t count = std::size_t{1} << m;
  std::vector<PiecewiseDensity> comps;
  for (std::size_t s = 0; s < count; ++s) {
    std::vector<int> lam(m);
    for (std::size_t j = 0; j < m; ++j) lam[j] = (s >> j) & 1U ? 1 : -1;
    comps.push_back(density_bump(p0, m, h, lam));
  }
  const GridFunction base = p0.heights().refined(comps[0].cells() / p0.cells());
  CompensatedSum total;
  for (const auto& a : comps) {
    for (const auto& b : comps) {
      CompensatedSum cross;
      for (std::size_t k = 0; k < base.cells(); ++k) {
        cross.add((a[k] - base[k]) * (b[k] - base[k]) / base[k] * base.cell_width());
      }
      total.add(std::expm1(static_cast<double>(n) * std::log1p(cross.value())));
    }
  }
  return total.value() / static_cast<double>(count * count);
}

// ---- 7: bump-family chi^2 ----
Outcome criterion7() {
  const std::vector<PiecewiseDensity> bases{PiecewiseDensity::uniform(1), PiecewiseDensity({0.5, 1.5, 1.0, 1.0}),
                                            PiecewiseDensity({0.8, 1.2})};
  int cases = 0, printed_bad = 0, corrected_bad = 0;
  double worst_ratio = 0.0;
  std::set<int> failing_n;
  for (const auto& p0 : bases) {
    for (std::size_t m = 1; m <= 3; ++m) {
      for (int n = 1; n <= 4; ++n) {
        for (double h : {0.005, 0.01, 0.02, 0.05, 0.1, 0.2}) {
          const BumpChi2 c = density_bump_chi2(p0, m, h, n);
          if (!c.conditions_hold) continue;
          const double exact = bump_chi2_enumerated(p0, m, h, n);
          ++cases;
          const double ratio = exact / c.printed_bound;
          worst_ratio = std::max(worst_ratio, ratio);
          if (exact > c.printed_bound * (1.0 + 1e-12)) {
            ++printed_bad;
            failing_n.insert(n);
          }
          if (exact > c.corrected_bound * (1.0 + 1e-12)) ++corrected_bad;
        }
      }
    }
  }
  std::string ns;
  for (int n : failing_n) ns += (ns.empty() ? "" : ",") + std::to_string(n);
  return {printed_bad == 0,
          std::to_string(cases) + " (p0, m, n, h) cases within the bound conditions; exact > exp(m n^2 h^4/inf^2)-1 in " +
              std::to_string(printed_bad) + " (n in {" + ns + "}), max exact/bound " + fmt(worst_ratio) +
              "; exp(4 m n^2 h^4/inf^2)-1 violated in " + std::to_string(corrected_bad)};
}

// ---- 8: lower-bound audit ----
Outcome criterion8() {
  int total = 0, failed = 0;
  std::string failures;
  for (const auto& name : lb_constructions()) {
    const auto grid = lb_default_grid(name);
    for (const auto& inst : grid) {
      ++total;
      if (!inst.passed()) {
        ++failed;
        failures += " " + name;
      }
    }
    if (grid.size() != 10) ++failed;
  }
  const std::vector<NuisancePilots> pilots{
      NuisancePilots(GridFunction::constant(1, 0.5), GridFunction::constant(1, 0.5)),
      NuisancePilots(GridFunction({0.2, 0.8, 0.5, 0.3}), GridFunction({0.3, 0.6, 0.7, 0.4}))};
  double worst_mean = 0.0;
  for (const auto& p : pilots) {
    for (std::size_t m = 1; m <= 6; ++m) {
      const Case2Plan plan = plan_causal_case2(p, m, 0.01, 0.01);
      worst_mean = std::max(worst_mean, CausalCase2Family(p, m, plan.h1, plan.h2).mixture_mean_error());
    }
  }
  return {failed == 0 && worst_mean <= 1e-12,
          std::to_string(total) + " instances over " + std::to_string(lb_constructions().size()) +
              " constructions, failures=" + std::to_string(failed) + failures +
              "; case 2 max |E q_lambda - p| for m<=6: " + fmt(worst_mean, 2)};
}

// ---- 9: causal small-instance Hellinger ----
Outcome criterion9() {
  const std::vector<NuisancePilots> pilots{
      NuisancePilots(GridFunction::constant(1, 0.5), GridFunction::constant(1, 0.5)),
      NuisancePilots(GridFunction({0.2, 0.8, 0.5, 0.3}), GridFunction({0.3, 0.6, 0.7, 0.4}))};
  double worst = 0.0;
  std::vector<double> per_pilot;
  int cases = 0;
  for (const auto& p : pilots) {
    per_pilot.push_back(0.0);
    for (const auto& [r, s] : {std::pair{0.01, 0.01}, std::pair{0.001, 0.01}, std::pair{0.04, 0.002}}) {
      for (std::size_t m = 1; m <= 3; ++m) {
        const Case2Plan plan = plan_causal_case2(p, m, r, s);
        const CausalCase2Family fam(p, m, plan.h1, plan.h2);
        for (std::int64_t n = 1; n <= 3; ++n) {
          const double h2 = fam.hellinger_exhaustive(n);
          const double scale = static_cast<double>(m * n * n) * (std::pow(plan.h1, 4) + std::pow(plan.h2, 4));
          worst = std::max(worst, h2 / scale);
          per_pilot.back() = std::max(per_pilot.back(), h2 / scale);
          ++cases;
        }
      }
    }
  }
  return {worst <= kHiddenConstant,
          std::to_string(cases) + " cases (n, m <= 3); empirical constant max H^2 / (m n^2 (h1^4 + h2^4)) = " +
              fmt(worst) + " (limit " + fmt(kHiddenConstant) + "); flat pilot " + fmt(per_pilot[0]) +
              ", varying pilot " + fmt(per_pilot[1])};
}

// ---- 10: adaptive envelope ----
Outcome criterion10(std::size_t workers) {
  const SeqVector hat({1.0});
  const std::vector<RadiusSchedule> radii{{0.0, 0.0}, {1.0, 1.0}, {1.0, 0.5}, {1.0, 0.25}};
  int rows = 0, env_bad = 0, dom_bad = 0;
  double worst_env = 0.0, worst_dom = 0.0;
  std::string where;
  for (double delta : {0.1, 0.01}) {
    const auto prof = adaptive_risk_profile(hat, delta, {100, 1000, 10000}, radii,
                                            {Direction::parallel, Direction::orthogonal}, 100000,
                                            derive_seed(110, {delta == 0.1 ? "d1" : "d2"}), workers);
    for (const auto& row : prof) {
      ++rows;
      const double env_ratio = row.mse_ad / row.envelope;
      const double dom_limit = 10.0 * std::min(row.mse_pi, row.mse_fo) + 10.0 * delta / static_cast<double>(row.n);
      const double dom_ratio = row.mse_ad / dom_limit;
      worst_env = std::max(worst_env, env_ratio);
      worst_dom = std::max(worst_dom, dom_ratio);
      if (env_ratio > 10.0 || dom_ratio > 1.0) {
        if (env_ratio > 10.0) ++env_bad;
        if (dom_ratio > 1.0) ++dom_bad;
        where += std::string(" [") + to_string(row.direction) + " n=" + std::to_string(row.n) + " r=" + fmt(row.r, 3) +
                 " delta=" + fmt(delta, 2) + " mse_ad=" + fmt(row.mse_ad, 3) + " f=" + fmt(row.envelope, 3) + "]";
      }
    }
  }
  return {env_bad == 0 && dom_bad == 0,
          std::to_string(rows) + " grid points, R=1e5; max mse_ad/f_delta=" + fmt(worst_env) +
              " (limit 10), max mse_ad/(10 min + 10 delta/n)=" + fmt(worst_dom) + " (limit 1); violations env=" +
              std::to_string(env_bad) + " dom=" + std::to_string(dom_bad) + where};
}

// ---- 11: CRI consistency ----
Outcome criterion11(std::size_t workers) {
  struct Point {
    std::vector<double> theta;
    double alpha;
    std::int64_t n;
  };
  const std::vector<Point> grid{{{1.0}, 0.3, 100},       {{1.0}, 0.1, 100},      {{1.0}, 0.05, 1000},
                                {{2.0}, 0.3, 10},        {{0.5}, 0.2, 50},       {{1.0, 1.0}, 0.2, 100},
                                {{0.3, 0.4}, 0.5, 20},   {{1.0}, 0.0, 100},      {{3.0}, 0.01, 10000},
                                {{1.0, -0.5, 0.25}, 0.1, 500}};
  int bad = 0, cases = 0;
  double min_slack = 1e300;
  for (const char* est : {"plugin", "first_order", "adaptive"}) {
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const CriReport rep = cri_check(est, SeqVector(grid[g].theta), grid[g].alpha, grid[g].n, 20000,
                                      derive_seed(111, {g}), 0.1, workers);
      ++cases;
      min_slack = std::min(min_slack, rep.slack);
      if (!rep.pass) ++bad;
    }
  }
  return {bad == 0, std::to_string(cases) + " (estimator, theta, alpha, n) points, R=2e4; min slack " +
                        fmt(min_slack) + ", violations=" + std::to_string(bad)};
}

// ---- 12: reproducibility ----
Outcome criterion12() {
  std::vector<ExperimentConfig> configs(3);
  configs[0].model = ModelKind::gsm;
  configs[0].estimators = {"plugin", "first_order", "higher_order", "adaptive"};
  configs[0].truth = SeqVector({1.0, 0.5, -0.25});
  configs[0].pilot_mode = PilotMode::random_direction;
  configs[1].model = ModelKind::density;
  configs[1].estimators = {"plugin", "first_order"};
  configs[1].truth = PiecewiseDensity({0.5, 1.5, 1.0, 1.0});
  configs[1].pilot_mode = PilotMode::random_direction;
  configs[2].model = ModelKind::causal;
  configs[2].estimators = {"plugin", "first_order", "cross_fit"};
  configs[2].truth = CausalModel(GridFunction({0.4, 0.6}), GridFunction({0.3, 0.5}), GridFunction({0.1, 0.2}));
  configs[2].s_radius = {0.05, 0.5};
  int identical = 0;
  for (auto& c : configs) {
    c.n_grid = {20, 200};
    c.radius = {0.05, 0.5};
    c.replications = 2000;
    c.seed = 112;
    std::string out[2];
    for (int w = 0; w < 2; ++w) {
      c.workers = w == 0 ? 1 : 4;
      std::ostringstream os;
      write_risk_csv(os, mc_risk(c));
      out[w] = os.str();
    }
    if (out[0] == out[1]) ++identical;
  }
  return {identical == 3, std::to_string(identical) + "/3 models give byte-identical risk CSV on 1 and 4 workers"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::size_t workers = 1;
  std::vector<int> only;
  app.add_option("--workers", workers, "Worker threads for Monte Carlo loops");
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria{
      [&] { return criterion1(workers); },  [&] { return criterion2(workers); },
      [&] { return criterion3(workers); },  [&] { return criterion4(workers); },
      [&] { return criterion5(workers); },  [] { return criterion6(); },
      [] { return criterion7(); },          [] { return criterion8(); },
      [] { return criterion9(); },          [&] { return criterion10(workers); },
      [&] { return criterion11(workers); }, [] { return criterion12(); }};

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << " ("
              << fmt(secs, 3) << "s)" << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
