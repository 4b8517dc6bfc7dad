#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "funcest/causal.hpp"
#include "funcest/rng.hpp"
#include "mc_stats.hpp"

using namespace funcest;

namespace {

CausalModel constant_model(double mu, double pi, double eta) {
  return CausalModel(GridFunction::constant(1, mu), GridFunction::constant(1, pi), GridFunction::constant(1, eta));
}

// psi by brute force over outcomes: E[AY] - E[pi mu].
double psi_bruteforce(const CausalModel& m) {
  double eay = 0.0, pimu = 0.0;
  const double w = 1.0 / m.cells();
  for (std::size_t k = 0; k < m.cells(); ++k) {
    for (int a = 0; a < 2; ++a) {
      for (int y = 0; y < 2; ++y) eay += w * a * y * m.joint_probability(k, a, y);
    }
    pimu += w * m.pi()[k] * m.mu()[k];
  }
  return eay - pimu;
}

CausalModel random_model(CounterRng& rng, std::size_t cells) {
  std::vector<double> mu(cells), pi(cells), eta(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    pi[k] = 0.2 + 0.6 * rng.uniform();
    mu[k] = 0.3 + 0.4 * rng.uniform();
    // Keep mu + (1 - pi) eta and mu - pi eta inside [0, 1].
    const double lim = std::min(mu[k], 1.0 - mu[k]) * 0.9;
    eta[k] = (2.0 * rng.uniform() - 1.0) * lim;
  }
  return CausalModel(GridFunction(mu), GridFunction(pi), GridFunction(eta));
}

}  // namespace

TEST(Causal, ConditionalProbabilities) {
  const auto m = constant_model(0.5, 0.4, 0.2);
  EXPECT_NEAR(m.outcome_probability(0, 1), 0.5 + 0.6 * 0.2, 1e-15);
  EXPECT_NEAR(m.outcome_probability(0, 0), 0.5 - 0.4 * 0.2, 1e-15);
  // E[Y|X] recovers mu.
  EXPECT_NEAR(0.4 * m.outcome_probability(0, 1) + 0.6 * m.outcome_probability(0, 0), 0.5, 1e-15);
  const auto t = m.outcome_table();
  ASSERT_EQ(t.size(), 4u);
  EXPECT_NEAR(t[2 + 1], 0.4 * m.outcome_probability(0, 1), 1e-15);
  double total = 0.0;
  for (double p : t) total += p;
  EXPECT_NEAR(total, 1.0, 1e-15);
  EXPECT_THROW(constant_model(0.9, 0.5, 0.5), std::invalid_argument);
}

TEST(Causal, PsiCovExamples) {
  EXPECT_EQ(psi_cov(constant_model(0.3, 0.6, 0.0)), 0.0);
  EXPECT_NEAR(psi_cov(constant_model(0.5, 0.5, 0.5)), 0.125, 1e-15);
  CounterRng rng(1);
  for (int i = 0; i < 10; ++i) {
    const auto m = random_model(rng, 2 + i);
    EXPECT_NEAR(psi_cov(m), psi_bruteforce(m), 1e-14);
  }
}

TEST(Causal, LikelihoodIntegratesToOne) {
  CounterRng rng(2);
  const auto m = random_model(rng, 5);
  double total = 0.0;
  for (std::size_t i = 0; i < 1000; ++i) {
    const double x = (i + 0.5) / 1000.0;
    for (int a = 0; a < 2; ++a) {
      for (int y = 0; y < 2; ++y) total += likelihood(m, x, a, y) / 1000.0;
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Causal, SampleFrequencies) {
  const auto m = constant_model(0.5, 0.3, 0.2);
  const auto s = sample_causal(m, 100000, 4);
  double a = 0, ay = 0;
  for (const auto& o : s.obs) {
    a += o.a;
    ay += o.a * o.y;
  }
  EXPECT_NEAR(a / 1e5, 0.3, 0.006);
  EXPECT_NEAR(ay / 1e5, 0.3 * 0.64, 0.006);
}

TEST(Causal, SingleObservationEstimators) {
  const NuisancePilots half(GridFunction::constant(1, 0.5), GridFunction::constant(1, 0.5));
  const std::vector<Observation> one{{0.3, 1, 1}};
  EXPECT_NEAR(plugin_psi(one, half), 0.75, 1e-15);
  EXPECT_NEAR(first_order_psi(one, half), 0.25, 1e-15);
  EXPECT_THROW(NuisancePilots(GridFunction::constant(1, 0.05), GridFunction::constant(1, 0.5)),
               std::invalid_argument);
}

TEST(Causal, ConditionalBias) {
  const auto truth = constant_model(0.5, 0.5, 0.1);
  const NuisancePilots exact_pi(truth.pi(), GridFunction::constant(1, 0.3));
  EXPECT_EQ(conditional_bias(exact_pi, truth), 0.0);
  const NuisancePilots shifted(GridFunction::constant(1, 0.4), GridFunction::constant(1, 0.7));
  EXPECT_NEAR(conditional_bias(shifted, truth), 0.1 * -0.2, 1e-15);
  CounterRng rng(5);
  const auto m = random_model(rng, 6);
  const NuisancePilots p(GridFunction({0.3, 0.5, 0.7}).refined(2), GridFunction({0.6, 0.4, 0.5}).refined(2));
  double riemann = 0.0;
  const std::size_t fine = 6 * 4096;
  for (std::size_t i = 0; i < fine; ++i) {
    const double x = (i + 0.5) / fine;
    riemann += (m.pi()(x) - p.pi_hat()(x)) * (m.mu()(x) - p.mu_hat()(x)) / fine;
  }
  EXPECT_NEAR(conditional_bias(p, m), riemann, 1e-12);
}

TEST(Causal, FirstOrderDoubleRobustBias) {
  CounterRng rng(6);
  const auto truth = random_model(rng, 4);
  const NuisancePilots p(GridFunction({0.3, 0.5, 0.7, 0.4}), GridFunction({0.6, 0.4, 0.5, 0.45}));
  const std::int64_t n = 50;
  const auto st = mc_run(40000, [&](std::size_t i) {
    return first_order_psi(sample_causal(truth, n, derive_seed(7, {i})), p);
  });
  EXPECT_LE(std::abs(st.mean - psi_cov(truth) - conditional_bias(p, truth)), 4.0 * st.se);
  const Moments mom = first_order_summand_moments(p, truth);
  EXPECT_NEAR(mom.mean, psi_cov(truth) + conditional_bias(p, truth), 1e-14);
  EXPECT_NEAR(st.var, mom.variance / n, 0.05 * mom.variance / n);
}

TEST(Causal, PluginUnbiasedAtTruthWithNoEffect) {
  const auto truth = constant_model(0.4, 0.6, 0.0);
  const NuisancePilots p(truth.pi(), truth.mu());
  const auto st = mc_run(20000, [&](std::size_t i) {
    return plugin_psi(sample_causal(truth, 40, derive_seed(8, {i})), p);
  });
  EXPECT_LE(std::abs(st.mean), 4.0 * st.se);
  EXPECT_NEAR(plugin_summand_moments(p, truth).mean, 0.0, 1e-15);
}

TEST(Causal, CrossFitMatchesHalfEvaluations) {
  const NuisancePilots p(GridFunction::constant(1, 0.4), GridFunction::constant(1, 0.6));
  const PilotFitter fixed = [&](std::span<const Observation>) { return PilotFit{p.pi_hat(), p.mu_hat()}; };
  const CausalSample s{{{0.1, 1, 0}, {0.7, 0, 1}}, 0};
  // Each half is one point; the average of the two single-point values.
  const double expect = 0.5 * ((1 - 0.4) * (0 - 0.6) + (0 - 0.4) * (1 - 0.6));
  EXPECT_NEAR(cross_fit_psi(s, fixed, 3), expect, 1e-15);
  const auto big = sample_causal(constant_model(0.5, 0.5, 0.2), 101, 2);
  EXPECT_EQ(cross_fit_psi(big, histogram_fitter(3), 11), cross_fit_psi(big, histogram_fitter(3), 11));
  const PilotFitter bad = [](std::span<const Observation>) {
    return PilotFit{GridFunction::constant(1, 0.0), GridFunction::constant(1, 0.5)};
  };
  EXPECT_THROW(cross_fit_psi(big, bad, 1), std::invalid_argument);
}

TEST(Causal, HistogramFitterClipsAndFallsBack) {
  const std::vector<Observation> obs{{0.1, 1, 1}, {0.2, 1, 1}};
  const auto fit = histogram_fitter(2, 0.1)(obs);
  EXPECT_NEAR(fit.pi_hat[0], 0.9, 1e-15);
  EXPECT_NEAR(fit.mu_hat[0], 0.9, 1e-15);
  EXPECT_EQ(fit.pi_hat[1], 0.5);
}
