#include "funcest/causal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "funcest/numeric.hpp"
#include "funcest/rng.hpp"

namespace funcest {

namespace {

bool in_unit_interval(double p) {
  return p >= -CausalModel::kProbabilityTolerance && p <= 1.0 + CausalModel::kProbabilityTolerance;
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

void align3(GridFunction& a, GridFunction& b, GridFunction& c) {
  const std::size_t common = std::lcm(std::lcm(a.cells(), b.cells()), c.cells());
  if (a.cells() != common) a = a.refined(common / a.cells());
  if (b.cells() != common) b = b.refined(common / b.cells());
  if (c.cells() != common) c = c.refined(common / c.cells());
}

void require_shared_grid(const NuisancePilots& pilots, const CausalModel& truth, const char* what) {
  if (pilots.cells() != truth.cells()) {
    throw std::invalid_argument(std::string(what) + ": pilots and model live on different grids");
  }
}

template <class Summand>
Moments exact_moments(const NuisancePilots& pilots, const CausalModel& truth, Summand summand) {
  require_shared_grid(pilots, truth, "exact moments");
  const double w = 1.0 / static_cast<double>(truth.cells());
  CompensatedSum first;
  CompensatedSum second;
  for (std::size_t k = 0; k < truth.cells(); ++k) {
    for (int a = 0; a <= 1; ++a) {
      for (int y = 0; y <= 1; ++y) {
        const double p = truth.joint_probability(k, a, y) * w;
        const double v = summand(k, a, y);
        first.add(p * v);
        second.add(p * v * v);
      }
    }
  }
  const double mean = first.value();
  return {mean, std::max(0.0, second.value() - mean * mean)};
}

}  // namespace

CausalModel::CausalModel(GridFunction mu, GridFunction pi, GridFunction eta, double margin)
    : mu_(std::move(mu)), pi_(std::move(pi)), eta_(std::move(eta)), margin_(margin) {
  if (!(margin_ > 0.0 && margin_ < 0.5)) throw std::invalid_argument("CausalModel: margin must lie in (0, 0.5)");
  align3(mu_, pi_, eta_);
  for (std::size_t k = 0; k < cells(); ++k) {
    if (!in_unit_interval(mu_[k]) || !in_unit_interval(pi_[k])) {
      throw std::invalid_argument("CausalModel: mu and pi must lie in [0,1] (cell " +
                                  std::to_string(k) + ")");
    }
    for (int a = 0; a <= 1; ++a) {
      if (!in_unit_interval(outcome_probability(k, a))) {
        throw std::invalid_argument("CausalModel: conditional outcome probability outside [0,1] (cell " +
                                    std::to_string(k) + ")");
      }
    }
  }
}

double CausalModel::outcome_probability(std::size_t k, int a) const {
  return a == 1 ? mu_[k] + (1.0 - pi_[k]) * eta_[k] : mu_[k] - pi_[k] * eta_[k];
}

double CausalModel::joint_probability(std::size_t k, int a, int y) const {
  const double pa = a == 1 ? pi_[k] : 1.0 - pi_[k];
  const double py1 = clamp01(outcome_probability(k, a));
  return pa * (y == 1 ? py1 : 1.0 - py1);
}

std::vector<double> CausalModel::outcome_table() const {
  std::vector<double> table(4 * cells());
  const double w = 1.0 / static_cast<double>(cells());
  for (std::size_t k = 0; k < cells(); ++k) {
    for (int a = 0; a <= 1; ++a) {
      for (int y = 0; y <= 1; ++y) table[4 * k + 2 * a + y] = joint_probability(k, a, y) * w;
    }
  }
  return table;
}

NuisancePilots::NuisancePilots(GridFunction pi_hat, GridFunction mu_hat, double margin)
    : pi_hat_(std::move(pi_hat)), mu_hat_(std::move(mu_hat)), margin_(margin) {
  if (!(margin_ > 0.0 && margin_ < 0.5)) throw std::invalid_argument("NuisancePilots: margin must lie in (0, 0.5)");
  align_grids(pi_hat_, mu_hat_);
  const double lo = margin_ - 1e-12;
  const double hi = 1.0 - margin_ + 1e-12;
  for (std::size_t k = 0; k < pi_hat_.cells(); ++k) {
    if (pi_hat_[k] < lo || pi_hat_[k] > hi || mu_hat_[k] < lo || mu_hat_[k] > hi) {
      throw std::invalid_argument("NuisancePilots: pilot value outside [margin, 1 - margin] (cell " +
                                  std::to_string(k) + ")");
    }
  }
}

double psi_cov(const CausalModel& model) {
  CompensatedSum s;
  for (std::size_t k = 0; k < model.cells(); ++k) {
    const double p = model.pi()[k];
    s.add(p * (1.0 - p) * model.eta()[k]);
  }
  return s.value() / static_cast<double>(model.cells());
}

double likelihood(const CausalModel& model, double x, int a, int y) {
  if ((a != 0 && a != 1) || (y != 0 && y != 1)) throw std::invalid_argument("likelihood: a, y must be binary");
  return model.joint_probability(model.mu().cell_of(x), a, y);
}

CausalSample sample_causal(const CausalModel& model, std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_causal: n must be at least 1");
  CounterRng rng(seed);
  CausalSample out{std::vector<Observation>(static_cast<std::size_t>(n)), seed};
  for (auto& o : out.obs) {
    o.x = rng.uniform();
    const std::size_t k = model.mu().cell_of(o.x);
    o.a = rng.bernoulli(model.pi()[k]) ? 1 : 0;
    o.y = rng.bernoulli(model.outcome_probability(k, o.a)) ? 1 : 0;
  }
  return out;
}

double plugin_psi(std::span<const Observation> obs, const NuisancePilots& pilots) {
  if (obs.empty()) throw std::invalid_argument("plugin_psi: empty sample");
  CompensatedSum s;
  for (const auto& o : obs) {
    const std::size_t k = pilots.pi_hat().cell_of(o.x);
    s.add(static_cast<double>(o.a * o.y) - pilots.pi_hat()[k] * pilots.mu_hat()[k]);
  }
  return s.value() / static_cast<double>(obs.size());
}

double first_order_psi(std::span<const Observation> obs, const NuisancePilots& pilots) {
  if (obs.empty()) throw std::invalid_argument("first_order_psi: empty sample");
  CompensatedSum s;
  for (const auto& o : obs) {
    const std::size_t k = pilots.pi_hat().cell_of(o.x);
    s.add((o.a - pilots.pi_hat()[k]) * (o.y - pilots.mu_hat()[k]));
  }
  return s.value() / static_cast<double>(obs.size());
}

double cross_fit_psi(const CausalSample& sample, const PilotFitter& fit, std::uint64_t seed,
                     double margin) {
  const std::size_t n = sample.obs.size();
  if (n < 2) throw std::invalid_argument("cross_fit_psi: need at least two observations");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  CounterRng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

  std::vector<Observation> first, second;
  first.reserve(n / 2);
  second.reserve(n - n / 2);
  for (std::size_t i = 0; i < n; ++i) (i < n / 2 ? first : second).push_back(sample.obs[order[i]]);

  auto pilots_from = [&](std::span<const Observation> part) {
    PilotFit f = fit(part);
    return NuisancePilots(std::move(f.pi_hat), std::move(f.mu_hat), margin);
  };
  const double on_second = first_order_psi(second, pilots_from(first));
  const double on_first = first_order_psi(first, pilots_from(second));
  return 0.5 * (on_first + on_second);
}

PilotFitter histogram_fitter(std::size_t cells, double margin) {
  if (cells == 0) throw std::invalid_argument("histogram_fitter: cells must be positive");
  return [cells, margin](std::span<const Observation> obs) {
    std::vector<double> count(cells, 0.0), sum_a(cells, 0.0), sum_y(cells, 0.0);
    const GridFunction grid = GridFunction::constant(cells, 0.0);
    for (const auto& o : obs) {
      const std::size_t k = grid.cell_of(o.x);
      count[k] += 1.0;
      sum_a[k] += o.a;
      sum_y[k] += o.y;
    }
    std::vector<double> pi(cells, 0.5), mu(cells, 0.5);
    for (std::size_t k = 0; k < cells; ++k) {
      if (count[k] > 0.0) {
        pi[k] = std::clamp(sum_a[k] / count[k], margin, 1.0 - margin);
        mu[k] = std::clamp(sum_y[k] / count[k], margin, 1.0 - margin);
      }
    }
    return PilotFit{GridFunction(std::move(pi)), GridFunction(std::move(mu))};
  };
}

double conditional_bias(const NuisancePilots& pilots, const CausalModel& truth) {
  require_shared_grid(pilots, truth, "conditional_bias");
  CompensatedSum s;
  for (std::size_t k = 0; k < truth.cells(); ++k) {
    s.add((truth.pi()[k] - pilots.pi_hat()[k]) * (truth.mu()[k] - pilots.mu_hat()[k]));
  }
  return s.value() / static_cast<double>(truth.cells());
}

Moments first_order_summand_moments(const NuisancePilots& pilots, const CausalModel& truth) {
  return exact_moments(pilots, truth, [&](std::size_t k, int a, int y) {
    return (a - pilots.pi_hat()[k]) * (y - pilots.mu_hat()[k]);
  });
}

Moments plugin_summand_moments(const NuisancePilots& pilots, const CausalModel& truth) {
  return exact_moments(pilots, truth, [&](std::size_t k, int a, int y) {
    return static_cast<double>(a * y) - pilots.pi_hat()[k] * pilots.mu_hat()[k];
  });
}

}  // namespace funcest
