#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "funcest/divergence.hpp"
#include "funcest/harness.hpp"
#include "funcest/lower_bounds.hpp"
#include "funcest/numeric.hpp"
#include "funcest/quadrature.hpp"

using namespace funcest;

namespace {

bool has_check(const LBInstance& inst, const std::string& name) {
  for (const auto& c : inst.checks) {
    if (c.name == name) return true;
  }
  return false;
}

// E[W_n^2] - 1 for the bump family by enumerating (lambda, nu) and integrating
// the single-observation cross term on the bumped densities' grid.
double bump_chi2_bruteforce(const PiecewiseDensity& p0, std::size_t m, double h, int n) {
  const std::size_t count = std::size_t{1} << m;
  std::vector<PiecewiseDensity> comps;
  for (std::size_t s = 0; s < count; ++s) {
    std::vector<int> lam(m);
    for (std::size_t j = 0; j < m; ++j) lam[j] = (s >> j) & 1U ? 1 : -1;
    comps.push_back(density_bump(p0, m, h, lam));
  }
  const GridFunction base = p0.heights().refined(comps[0].cells() / p0.cells());
  double total = 0.0;
  for (const auto& a : comps) {
    for (const auto& b : comps) {
      double cross = 0.0;
      for (std::size_t k = 0; k < base.cells(); ++k) {
        cross += (a[k] - base[k]) * (b[k] - base[k]) / base[k] * base.cell_width();
      }
      total += std::pow(1.0 + cross, n);
    }
  }
  return total / static_cast<double>(count * count) - 1.0;
}

}  // namespace

TEST(GaussianMixture, Validation) {
  EXPECT_THROW(GaussianMixture({SeqVector({0.0})}, {0.5}, 1), std::invalid_argument);
  EXPECT_THROW(GaussianMixture({SeqVector({0.0}), SeqVector({0.0, 1.0})}, {0.5, 0.5}, 1), std::invalid_argument);
  EXPECT_NO_THROW(GaussianMixture::point(SeqVector({1.0}), 3));
}

TEST(Chi2Mixture, TwoPointMatchesQuadrature) {
  const std::int64_t n = 10;
  const double eps = 0.2, c = 0.3;
  const GaussianMixture mix({SeqVector({c + eps}), SeqVector({c - eps})}, {0.5, 0.5}, n);
  const double sd = 1.0 / std::sqrt(10.0);
  const auto integrand = [&](double x) {
    const double p = normal_pdf((x - c) / sd) / sd;
    const double q = 0.5 * (normal_pdf((x - c - eps) / sd) + normal_pdf((x - c + eps) / sd)) / sd;
    return p > 0.0 ? q * q / p : 0.0;
  };
  const double oracle = integrate(integrand, c - 5.0, c + 5.0).value - 1.0;
  EXPECT_NEAR(chi2_mixture_vs_point(mix, SeqVector({c})) / oracle, 1.0, 1e-9);
}

TEST(GsmLb1, ChecksAndSeparation) {
  const SeqVector th({1.0, 0.5});
  const std::int64_t n = 100;
  const auto inst = gsm_lb1(th, 0.05, n);
  EXPECT_TRUE(inst.passed());
  const double nu = std::sqrt(0.2 / (2.0 * n * 1.25));
  EXPECT_NEAR(inst.param("nu"), nu, 1e-15);
  EXPECT_NEAR(inst.separation, (2 * nu - nu * nu) * 1.25, 1e-14);
  EXPECT_GE(inst.separation * inst.separation, 0.2 * 1.25 / (2.0 * n));
  EXPECT_NEAR(inst.realized_radius[0], 0.2 / (2.0 * n), 1e-15);
  EXPECT_LE(inst.divergence, 0.2);
  EXPECT_THROW(gsm_lb1(th, 0.001, n), std::invalid_argument);
  EXPECT_THROW(gsm_lb1(SeqVector::zeros(2), 0.05, n), std::invalid_argument);
}

TEST(GsmLb2, SeparationIsDirectFunctionalGap) {
  const SeqVector th({1.0, 0.5});
  const double r = 0.0005;
  const auto inst = gsm_lb2(th, r, 100);
  EXPECT_TRUE(inst.passed());
  EXPECT_NEAR(inst.separation, r + 2.0 * std::sqrt(r) * th.norm(), 1e-14);
  EXPECT_NEAR(inst.divergence, std::expm1(100 * r), 1e-15);
  const auto zero = gsm_lb2(th, 0.0, 100);
  EXPECT_EQ(zero.separation, 0.0);
  EXPECT_THROW(gsm_lb2(th, 0.02, 100), std::invalid_argument);
}

TEST(GsmLb3, OneDimensionalCaseAgainstQuadrature) {
  const SeqVector th({1.0, 0.01});
  const std::int64_t n = 10;
  const double r = 0.04;
  Lb3Options opt;
  opt.eps_override = std::sqrt(r);  // d = 1
  const auto inst = gsm_lb3(th, r, n, 0.2, opt);
  ASSERT_EQ(inst.param("d"), 1.0);
  const double eps = inst.param("eps");
  const double sd = 1.0 / std::sqrt(10.0);
  const auto integrand = [&](double x) {
    const double p = normal_pdf(x / sd) / sd;
    const double q = 0.5 * (normal_pdf((x - eps) / sd) + normal_pdf((x + eps) / sd)) / sd;
    return p > 0.0 ? q * q / p : 0.0;
  };
  EXPECT_NEAR(inst.divergence, integrate(integrand, -5.0, 5.0).value - 1.0, 1e-10);
  EXPECT_TRUE(inst.passed());
}

TEST(GsmLb3, PrintedEpsPasses) {
  const SeqVector th({1.0, 0.5, 0.001, -0.002});
  for (double r : {0.2, 0.35, 2.0}) {
    const auto inst = gsm_lb3(th, r, 25);
    EXPECT_TRUE(inst.passed()) << r;
    EXPECT_NEAR(inst.param("eps"), std::sqrt(0.2) * std::min(1.0 / (25 * r), 1.0 / 25), 1e-15);
    EXPECT_EQ(inst.param("d"), std::floor(r / std::pow(inst.param("eps"), 2) * (1 + 1e-12)));
  }
}

TEST(GsmLb3, ComponentsAndBruteForceWithOffsets) {
  const SeqVector th({1.0, 0.5, 0.001, -0.002});
  Lb3Options opt;
  opt.eps_override = std::sqrt(0.1);
  const auto inst = gsm_lb3(th, 0.4, 1, 0.2, opt);
  EXPECT_TRUE(inst.passed());
  const auto d = static_cast<std::size_t>(inst.param("d"));
  ASSERT_EQ(d, 4u);
  const double eps = inst.param("eps");
  EXPECT_NEAR(inst.param("chi2_bruteforce"), inst.divergence, 1e-12);
  EXPECT_NEAR(inst.divergence, std::pow(std::cosh(0.1), 4) - 1.0, 1e-14);
  const auto& mix = std::get<SignMixture>(*inst.alt_dist);
  const double q0 = quadratic_functional(mix.center);
  for (std::uint64_t s = 0; s < (1ULL << d); ++s) {
    const SeqVector c = mix.component(s);
    EXPECT_NEAR(squared_distance(c.coeffs(), mix.center.coeffs()), d * eps * eps, 1e-15);
    EXPECT_GE(quadratic_functional(c) - q0, d * eps * eps / 2.0);
  }
}

TEST(DensityTwoPoint, WorkedExample) {
  const PiecewiseDensity p1({0.5, 1.5});
  EXPECT_NEAR(twopoint_gamma(p1), 0.1875, 1e-15);
  EXPECT_EQ(twopoint_gamma(PiecewiseDensity::uniform(4)), 0.0);
  const auto p2 = twopoint_alternative(p1, 0.1);
  const double gap = t_quadratic(p2) - t_quadratic(p1);
  EXPECT_GE(gap, 0.0375);
  // p2 = p1 (1 + 0.1 p1 - 0.125) on each cell.
  EXPECT_NEAR(p2[0], 0.5 * (1 + 0.05 - 0.125), 1e-15);
  EXPECT_NEAR(p2[1], 1.5 * (1 + 0.15 - 0.125), 1e-15);
  EXPECT_EQ(twopoint_alternative(p1, 0.0).heights().values()[1], 1.5);
  const auto inst = density_twopoint(p1, 0.1, 2, 0.05);
  EXPECT_TRUE(has_check(inst, "hellinger_single"));
  EXPECT_GE(inst.separation, 2 * 0.1 * 0.1875);
  EXPECT_THROW(twopoint_alternative(p1, 5.0), std::invalid_argument);
}

TEST(DensityBump, MassAndDistance) {
  const PiecewiseDensity p0({0.5, 1.5, 1.0, 1.0});
  for (std::size_t m : {1u, 2u, 3u}) {
    std::vector<int> lam(m, 1);
    lam[0] = -1;
    const double h = 0.05;
    const auto p = density_bump(p0, m, h, lam);
    EXPECT_NEAR(integral(p.heights()), 1.0, 1e-14);
    const auto base = p0.refined(p.cells() / p0.cells());
    EXPECT_NEAR(l2sq_distance(p, base), 2.0 * m * h * h, 1e-14);
    EXPECT_EQ(density_bump(p0, m, 0.0, lam).heights().values()[0], 0.5);
  }
}

TEST(DensityBump, Chi2AgainstEnumeration) {
  const PiecewiseDensity p0({0.5, 1.5, 1.0, 1.0});
  for (std::size_t m = 1; m <= 3; ++m) {
    for (int n = 1; n <= 4; ++n) {
      for (double h : {0.01, 0.05, 0.1}) {
        const auto c = density_bump_chi2(p0, m, h, n);
        EXPECT_NEAR(c.exact, bump_chi2_bruteforce(p0, m, h, n), 1e-12 * std::max(1.0, c.exact));
        EXPECT_LE(c.exact, c.corrected_bound * (1 + 1e-12));
      }
    }
  }
}

TEST(DensityBump, PrintedBoundFailsOnFlatBase) {
  // Flat p0, m = 1, n = 3: exact = 12 h^4 + O(h^8) exceeds exp(9 h^4) - 1.
  const auto p0 = PiecewiseDensity::uniform(1);
  const auto c = density_bump_chi2(p0, 1, 0.1, 3);
  EXPECT_GT(c.exact, c.printed_bound);
  EXPECT_LE(c.exact, c.corrected_bound);
}

TEST(CausalCase1, FlatPilots) {
  const NuisancePilots p(GridFunction::constant(1, 0.5), GridFunction::constant(1, 0.5));
  const auto zero = causal_case1(p, 0.0, 10);
  EXPECT_EQ(zero.param("hellinger_single"), 0.0);
  const auto inst = causal_case1(p, 0.05, 10);
  // Independent table: P(a, y) under (mu, pi, eta) = (0.5, 0.5, zeta).
  const auto table = [](double zeta) {
    const double p1 = 0.5 + 0.5 * zeta, p0 = 0.5 - 0.5 * zeta;
    return std::vector<double>{0.5 * (1 - p0), 0.5 * p0, 0.5 * (1 - p1), 0.5 * p1};
  };
  EXPECT_NEAR(inst.param("hellinger_single"), hellinger_vectors(table(0.0), table(0.05)), 1e-15);
  const CausalModel null(GridFunction::constant(1, 0.5), GridFunction::constant(1, 0.5), GridFunction::constant(1, 0.0));
  const CausalModel alt(GridFunction::constant(1, 0.5), GridFunction::constant(1, 0.5), GridFunction::constant(1, 0.05));
  EXPECT_NEAR(inst.separation, psi_cov(alt) - psi_cov(null), 1e-15);
  EXPECT_THROW(causal_case1(p, 0.06, 10), std::invalid_argument);
}

TEST(CausalCase2, MixtureMeanIsNull) {
  const NuisancePilots p(GridFunction({0.2, 0.8, 0.5, 0.3}), GridFunction({0.3, 0.6, 0.7, 0.4}));
  for (std::size_t m = 1; m <= 6; ++m) {
    const double h = 0.03 * std::sqrt(1.0 / (4.0 * m));
    const CausalCase2Family fam(p, m, h, h);
    EXPECT_LE(fam.mixture_mean_error(), 1e-15) << m;
    const CausalCase2Family flat(p, m, 0.0, 0.0);
    EXPECT_EQ(flat.mixture_mean_error(), 0.0);
    EXPECT_EQ(flat.separation(), 0.0);
  }
}

TEST(CausalCase2, TableAgreesWithModel) {
  const NuisancePilots p(GridFunction({0.2, 0.8, 0.5, 0.3}), GridFunction({0.3, 0.6, 0.7, 0.4}));
  const CausalCase2Family fam(p, 2, 0.01, 0.008);
  for (std::uint64_t lam = 0; lam < 4; ++lam) {
    const auto t = fam.outcome_table(lam);
    const auto ref = fam.model(lam).outcome_table();
    ASSERT_EQ(t.size(), ref.size());
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(t[i], ref[i], 1e-15);
  }
}

TEST(CausalCase2, HellingerTwoSamplesByEnumeration) {
  const NuisancePilots p(GridFunction::constant(1, 0.5), GridFunction::constant(1, 0.5));
  const std::size_t m = 2;
  const CausalCase2Family fam(p, m, 0.02, 0.015);
  const auto null = fam.null_model().outcome_table();
  std::vector<std::vector<double>> tables;
  for (std::uint64_t lam = 0; lam < (1u << m); ++lam) tables.push_back(fam.outcome_table(lam));
  const std::size_t k = null.size();
  double h2 = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      double mix = 0.0;
      for (const auto& t : tables) mix += t[i] * t[j] / tables.size();
      h2 += std::pow(std::sqrt(null[i] * null[j]) - std::sqrt(mix), 2);
    }
  }
  EXPECT_NEAR(fam.hellinger_exhaustive(2), h2, 1e-14);
  EXPECT_NEAR(fam.hellinger_exhaustive(1), 0.0, 1e-15);
  EXPECT_LE(h2, fam.chi2(2) + 1e-15);
}

TEST(CausalCase2, SeparationAndRanges) {
  const NuisancePilots p(GridFunction::constant(1, 0.5), GridFunction::constant(1, 0.5));
  const CausalCase2Family fam(p, 3, 0.02, 0.015);
  double min_gap = 1e300;
  for (std::uint64_t lam = 0; lam < 8; ++lam) {
    const auto mdl = fam.model(lam);
    min_gap = std::min(min_gap, integral_product(mdl.pi(), mdl.mu()) - 0.25);
  }
  EXPECT_NEAR(fam.separation(), min_gap, 1e-14);
  EXPECT_GE(fam.separation(), 3 * 0.02 * 0.015 * (1 - 1e-12));
  EXPECT_THROW(CausalCase2Family(p, 1, 1.0, 0.0).model(0), std::invalid_argument);
}

TEST(LbDefaultGrids, EveryConstructionPasses) {
  for (const auto& name : lb_constructions()) {
    const auto grid = lb_default_grid(name);
    EXPECT_EQ(grid.size(), 10u) << name;
    for (const auto& inst : grid) {
      EXPECT_TRUE(has_check(inst, "separation"));
      EXPECT_TRUE(has_check(inst, "divergence"));
      for (const auto& c : inst.checks) EXPECT_TRUE(c.pass) << name << ' ' << c.name << ' ' << c.value << " vs " << c.limit;
    }
  }
}
