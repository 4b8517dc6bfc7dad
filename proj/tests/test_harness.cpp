#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "funcest/harness.hpp"
#include "funcest/io.hpp"
#include "funcest/numeric.hpp"
#include "funcest/rng.hpp"

using namespace funcest;

namespace {

ExperimentConfig gsm_config() {
  ExperimentConfig c;
  c.model = ModelKind::gsm;
  c.estimators = {"plugin", "first_order", "higher_order", "adaptive"};
  c.n_grid = {10, 100};
  c.radius = {0.5, 0.5};
  c.replications = 400;
  c.seed = 12;
  c.truth = SeqVector({1.0, 0.5});
  return c;
}

std::string csv(const RiskReport& r) {
  std::ostringstream os;
  write_risk_csv(os, r);
  return os.str();
}

}  // namespace

TEST(MakePilot, GsmExactRadius) {
  const SeqVector th({1.0, -0.5});
  EXPECT_EQ(make_pilot(th, PilotSpec{}, 1), th);
  PilotSpec s;
  s.r = 0.09;
  const auto fixed = make_pilot(th, s, 1);
  EXPECT_NEAR(fixed[0], 1.3, 1e-15);
  EXPECT_EQ(fixed[1], -0.5);
  s.mode = PilotMode::random_direction;
  s.axis = 0;
  const auto rnd = make_pilot(th, s, 2);
  EXPECT_NEAR(squared_distance(rnd.coeffs(), th.coeffs()), 0.09, 1e-15);
  s.mode = PilotMode::spread;
  s.k = 5;
  const auto spread = make_pilot(th, s, 3);
  EXPECT_EQ(spread.ambient_len(), 5u);
  EXPECT_NEAR(squared_distance(spread.coeffs(), th.padded(5).coeffs()), 0.09, 1e-15);
}

TEST(MakePilot, DensityExactRadiusOrError) {
  const PiecewiseDensity f({0.5, 1.5, 1.0, 1.0});
  PilotSpec s;
  s.r = 0.04;
  s.mode = PilotMode::random_direction;
  const auto p = make_pilot(f, s, 7);
  EXPECT_NEAR(l2sq_distance(p, f), 0.04, 1e-14);
  s.r = 100.0;
  EXPECT_THROW(make_pilot(f, s, 7), std::domain_error);
}

TEST(MakePilot, CausalStaysInsideMargin) {
  const CausalModel m(GridFunction({0.4, 0.6}), GridFunction({0.3, 0.5}), GridFunction({0.1, 0.0}));
  PilotSpec s;
  s.r = 0.01;
  s.s = 0.0025;
  const auto p = make_pilot(m, s, 1);
  EXPECT_NEAR(l2sq_distance(p.pi_hat(), m.pi()), 0.01, 1e-15);
  EXPECT_NEAR(l2sq_distance(p.mu_hat(), m.mu()), 0.0025, 1e-15);
  s.r = 0.5;
  EXPECT_THROW(make_pilot(m, s, 1), std::domain_error);
}

TEST(Config, Validation) {
  auto c = gsm_config();
  EXPECT_NO_THROW(c.validate());
  c.n_grid = {100, 10};
  EXPECT_THROW(c.validate(), ConfigError);
  c = gsm_config();
  c.replications = 50;
  EXPECT_THROW(c.validate(), ConfigError);
  c = gsm_config();
  c.radius.gamma = 3.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = gsm_config();
  c.estimators = {"cross_fit"};
  EXPECT_THROW(c.validate(), ConfigError);
  c = gsm_config();
  c.truth = PiecewiseDensity::uniform(2);
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  const auto c = parse_config(R"({"model":"density","estimators":["plugin","first_order"],"n_grid":[10,20],
      "radius":{"c":0.1,"gamma":0.5},"replications":200,"seed":3,
      "truth":{"heights":[0.5,1.5]},"pilot":{"mode":"random-direction"}})");
  EXPECT_EQ(c.model, ModelKind::density);
  EXPECT_EQ(c.replications, 200);
  EXPECT_EQ(c.pilot_mode, PilotMode::random_direction);
  EXPECT_THROW(parse_config("{"), ConfigError);
  EXPECT_THROW(parse_config(R"({"model":"gsm"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"model":"gsm","estimators":["plugin"],"n_grid":[10],"radius":{"c":0,"gamma":0},
      "truth":{"theta":[1]},"tail":"bogus"})"),
               ConfigError);
}

TEST(Summaries, BiasVarianceDecomposition) {
  CounterRng rng(3);
  std::vector<double> e(1000);
  for (auto& x : e) x = 0.3 + rng.normal();
  const auto st = summarize_errors(e);
  const double rr = 1000.0;
  EXPECT_NEAR(st.mse, st.bias * st.bias + st.var * (rr - 1) / rr, 1e-12);
  EXPECT_NEAR(st.bias_se, std::sqrt(st.var / rr), 1e-15);
}

TEST(ParallelFor, CoversEveryIndexOnce) {
  std::vector<int> hits(1001, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 7) throw std::runtime_error("x");
               }),
               std::runtime_error);
}

TEST(McRisk, DeterministicAcrossWorkers) {
  auto c = gsm_config();
  const auto a = csv(mc_risk(c));
  c.workers = 3;
  EXPECT_EQ(a, csv(mc_risk(c)));
  EXPECT_NE(a.find("model,estimator,n,r,s,mse,mse_se,bias,bias_se,var,reps,seed"), std::string::npos);
}

TEST(McRisk, PluginWithExactPilotHasZeroRisk) {
  auto c = gsm_config();
  c.radius = {0.0, 0.0};
  c.estimators = {"plugin"};
  for (const auto& row : mc_risk(c).rows) EXPECT_EQ(row.mse, 0.0);
  c.model = ModelKind::density;
  c.estimators = {"plugin"};
  c.truth = PiecewiseDensity({0.5, 1.5});
  for (const auto& row : mc_risk(c).rows) EXPECT_EQ(row.mse, 0.0);
}

TEST(McRisk, FirstOrderVarianceFourOverN) {
  ExperimentConfig c;
  c.model = ModelKind::gsm;
  c.estimators = {"first_order"};
  c.n_grid = {100};
  c.radius = {0.0, 0.0};
  c.replications = 100000;
  c.seed = 1;
  c.truth = SeqVector({1.0});
  const auto row = mc_risk(c).rows.at(0);
  EXPECT_NEAR(row.mse, 0.04, 0.004);
}

TEST(McRisk, CausalFirstOrderExactPilots) {
  ExperimentConfig c;
  c.model = ModelKind::causal;
  c.estimators = {"first_order"};
  c.n_grid = {50};
  c.radius = {0.0, 0.0};
  c.replications = 20000;
  c.seed = 2;
  const CausalModel truth(GridFunction({0.4, 0.6}), GridFunction({0.3, 0.5}), GridFunction({0.1, 0.2}));
  c.truth = truth;
  const auto row = mc_risk(c).rows.at(0);
  const NuisancePilots exact(truth.pi(), truth.mu());
  const double v = first_order_summand_moments(exact, truth).variance / 50.0;
  EXPECT_NEAR(row.mse, v, 0.1 * v);
}

TEST(FitRate, ExactAndNoisyPowerLaws) {
  std::vector<std::pair<double, double>> a, b, noisy;
  CounterRng rng(9);
  for (double n : {100.0, 316.0, 1000.0, 3162.0, 10000.0}) {
    a.emplace_back(n, 7.0 / n);
    b.emplace_back(n, 3.0 * std::pow(n, -0.8));
    noisy.emplace_back(n, (1.0 + 0.1 * (rng.uniform() - 0.5)) / n);
  }
  const auto fa = fit_rate(a);
  EXPECT_NEAR(fa.slope, -1.0, 1e-12);
  EXPECT_NEAR(fa.r2, 1.0, 1e-12);
  EXPECT_NEAR(fit_rate(b).slope, -0.8, 1e-12);
  EXPECT_NEAR(fit_rate(noisy).slope, -1.0, 0.1);
  EXPECT_THROW(fit_rate({{1.0, 1.0}, {2.0, 0.0}, {3.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(fit_rate({{1.0, 1.0}, {2.0, 1.0}}), std::invalid_argument);
}

TEST(CriCheck, PluginEqualityAndZeroAlpha) {
  const SeqVector th({1.0});
  const auto zero = cri_check("first_order", th, 0.0, 100, 200, 1);
  EXPECT_EQ(zero.bound, 0.0);
  EXPECT_TRUE(zero.pass);
  const auto pl = cri_check("plugin", th, 0.3, 100, 200, 1);
  EXPECT_EQ(pl.beta_hat, 0.0);
  EXPECT_NEAR(pl.risk_d2, std::pow(0.09 + 0.6, 2), 1e-12);
  EXPECT_NEAR(pl.bound, pl.risk_d2, 1e-12);
  EXPECT_TRUE(pl.pass);
  EXPECT_THROW(cri_check("plugin", SeqVector({0.0}), 0.3, 100, 200, 1), std::invalid_argument);
}

TEST(CriCheck, FirstOrderHolds) {
  const auto rep = cri_check("first_order", SeqVector({1.0}), 0.3, 100, 100000, 5);
  EXPECT_TRUE(rep.pass);
  EXPECT_GT(rep.slack, 0.0);
}

TEST(Adaptive, EnvelopeFormula) {
  EXPECT_NEAR(adaptive_envelope(0.0, 0.1, 2.0, 100), 0.1 * 2.0 / 100, 1e-15);
  EXPECT_NEAR(adaptive_envelope(1.0, 0.1, 2.0, 100), 1.0 + std::log(10.0) * 2.0 / 100, 1e-15);
}

TEST(Adaptive, ExactPilotTracksPlugin) {
  const auto rows = adaptive_risk_profile(SeqVector({1.0}), 0.1, {1000}, {RadiusSchedule{0.0, 0.0}},
                                          {Direction::parallel}, 2000, 3);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_LE(rows[0].mse_ad, 10.0 * rows[0].envelope);
  EXPECT_GE(rows[0].plugin_share, 0.95);
}

TEST(DivergenceTable, AllRowsAgree) {
  const auto rows = divergence_table();
  EXPECT_EQ(rows.size(), 50u);
  for (const auto& r : rows) {
    EXPECT_LE(r.rel_err, 1e-8) << r.kind << ' ' << r.n << ' ' << r.param;
    EXPECT_TRUE(r.bound_dominates);
  }
}

TEST(Io, LbCsvRow) {
  const auto inst = gsm_lb2(SeqVector({1.0}), 0.0005, 100);
  std::ostringstream os;
  write_lb_csv_header(os);
  write_lb_csv_row(os, inst);
  const auto text = os.str();
  EXPECT_NE(text.find("gsm_lb2,n=100;r=5e-04"), std::string::npos);
  EXPECT_NE(text.find(",pass\n"), std::string::npos);
}

TEST(Io, CausalSampleRoundTrip) {
  const std::vector<Observation> obs{{0.25, 1, 0}, {0.75, 0, 1}};
  const std::string path = ::testing::TempDir() + "causal_rt.csv";
  {
    std::ofstream out(path);
    write_causal_sample(out, obs);
  }
  const auto back = read_causal_sample(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].x, 0.75);
  EXPECT_EQ(back[1].y, 1);
  EXPECT_EQ(format_double(0.1), "0.1");
}
