#include "funcest/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "funcest/numeric.hpp"
#include "funcest/quadrature.hpp"

namespace funcest {

double chi2_gaussians(const SeqVector& theta, const SeqVector& theta_tilde, std::int64_t n) {
  if (theta.ambient_len() != theta_tilde.ambient_len()) {
    throw std::invalid_argument("chi2_gaussians: dimension mismatch");
  }
  if (n < 1) throw std::invalid_argument("chi2_gaussians: n must be at least 1");
  const double x = static_cast<double>(n) * squared_distance(theta.coeffs(), theta_tilde.coeffs());
  if (x > kMaxChi2Exponent) {
    throw std::overflow_error("chi2_gaussians: exponent " + std::to_string(x) + " too large");
  }
  return std::expm1(x);
}

SignMixtureChi2 chi2_point_vs_signmixture(std::int64_t d, double eps, std::int64_t n) {
  if (d < 1) throw std::invalid_argument("chi2_point_vs_signmixture: d must be at least 1");
  if (n < 1) throw std::invalid_argument("chi2_point_vs_signmixture: n must be at least 1");
  const double nd = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  SignMixtureChi2 out;
  out.exact = cosh_pow_minus_one(nd * eps * eps, dd);
  out.bound = std::expm1(dd * nd * nd * eps * eps * eps * eps);
  out.bound_applies = std::abs(eps) <= 1.0 / nd;
  return out;
}

DiscreteDist::DiscreteDist(std::vector<std::pair<std::uint64_t, double>> atoms) : atoms_(std::move(atoms)) {
  std::sort(atoms_.begin(), atoms_.end());
  CompensatedSum total;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (i > 0 && atoms_[i].first == atoms_[i - 1].first) {
      throw std::invalid_argument("DiscreteDist: duplicate outcome id");
    }
    const double p = atoms_[i].second;
    if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("DiscreteDist: negative probability");
    total.add(p);
  }
  if (std::abs(total.value() - 1.0) > kMassTolerance) {
    throw std::invalid_argument("DiscreteDist: probabilities do not sum to one");
  }
}

DiscreteDist DiscreteDist::from_probabilities(std::span<const double> p) {
  std::vector<std::pair<std::uint64_t, double>> atoms(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) atoms[i] = {i, p[i]};
  return DiscreteDist(std::move(atoms));
}

double DiscreteDist::probability(std::uint64_t id) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), std::make_pair(id, -1.0));
  return it != atoms_.end() && it->first == id ? it->second : 0.0;
}

double hellinger_discrete(const DiscreteDist& p, const DiscreteDist& q) {
  // Merge the two sorted atom lists; outcomes missing from one side have
  // probability zero there.
  const auto a = p.atoms();
  const auto b = q.atoms();
  CompensatedSum s;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    double pa = 0.0, qb = 0.0;
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      pa = a[i++].second;
    } else if (i == a.size() || b[j].first < a[i].first) {
      qb = b[j++].second;
    } else {
      pa = a[i++].second;
      qb = b[j++].second;
    }
    const double d = std::sqrt(pa) - std::sqrt(qb);
    s.add(d * d);
  }
  return s.value();
}

double hellinger_vectors(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("hellinger_vectors: outcome spaces differ");
  CompensatedSum s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    s.add(d * d);
  }
  return s.value();
}

HellingerProduct hellinger_product_bound(double h2_single, std::int64_t n) {
  if (!(h2_single >= 0.0 && h2_single <= 2.0)) {
    throw std::invalid_argument("hellinger_product_bound: h2 must lie in [0, 2]");
  }
  if (n < 1) throw std::invalid_argument("hellinger_product_bound: n must be at least 1");
  const double nd = static_cast<double>(n);
  // 2 - 2 (1 - h/2)^n via log1p/expm1 keeps precision for tiny h.
  const double exact = h2_single == 2.0 ? 2.0 : -2.0 * std::expm1(nd * std::log1p(-0.5 * h2_single));
  return {nd * h2_single, exact};
}

double cri_bound(const SeqVector& theta, double alpha, double beta, std::int64_t n) {
  if (alpha < 0.0 || beta < 0.0) throw std::invalid_argument("cri_bound: alpha and beta must be nonnegative");
  if (n < 1) throw std::invalid_argument("cri_bound: n must be at least 1");
  const double gap = alpha * alpha + 2.0 * alpha * theta.norm();
  const double v = positive_part(gap - beta * std::exp(static_cast<double>(n) * alpha * alpha / 2.0));
  return v * v;
}

double expected_signed_power_minus_one(std::span<const double> c, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("expected_signed_power: n must be nonnegative");
  const auto order = static_cast<std::size_t>(n);
  // excess[k] = E[T^k] - 1 with T = 1 + the signed terms added so far.
  std::vector<double> excess(order + 1, 0.0);
  std::vector<double> next(order + 1);
  for (double cj : c) {
    if (cj == 0.0) continue;
    const double c2 = cj * cj;
    for (std::size_t k = 0; k <= order; ++k) {
      // E[(T + s c)^k] = sum over even i of C(k,i) c^i E[T^{k-i}].
      double term = 1.0;
      CompensatedSum acc;
      acc.add(excess[k]);
      for (std::size_t i = 2; i <= k; i += 2) {
        term *= c2 * static_cast<double>(k - i + 2) * static_cast<double>(k - i + 1) /
                (static_cast<double>(i) * static_cast<double>(i - 1));
        acc.add(term * (1.0 + excess[k - i]));
      }
      next[k] = acc.value();
    }
    excess.swap(next);
  }
  return excess[order];
}

SignedChi2 sign_mixture_chi2(std::span<const double> c, std::int64_t n, double max_work) {
  const double nd = static_cast<double>(n);
  if (static_cast<double>(c.size()) * nd * nd <= max_work) {
    return {expected_signed_power_minus_one(c, n), false};
  }
  double log_prod = 0.0;
  for (double cj : c) log_prod += log_cosh(nd * cj);
  return {std::expm1(log_prod), true};
}

namespace {

// p(x) (exp(t) - 1)^2 from log p(x) and t, finite in both tails.
double weighted_square(double log_p, double t) {
  if (t < 1.0) {
    const double e = std::expm1(t);
    return e * e * std::exp(log_p);
  }
  const double log_e = t + std::log1p(-std::exp(-t));
  return std::exp(2.0 * log_e + log_p);
}

double log_normal_pdf(double x, double nd) {
  return -0.5 * nd * x * x + 0.5 * std::log(nd) - 0.5 * std::log(2.0 * M_PI);
}

}  // namespace

double chi2_gaussians_quadrature_1d(double delta, std::int64_t n) {
  const double nd = static_cast<double>(n);
  // chi^2 = int p (q/p - 1)^2 with p = N(0, 1/n), q = N(delta, 1/n).
  auto f = [&](double x) {
    if (!std::isfinite(x)) return 0.0;
    return weighted_square(log_normal_pdf(x, nd), nd * delta * x - 0.5 * nd * delta * delta);
  };
  // Split at the midpoint of the two centers so each half has a single mode.
  const double mid = 0.5 * delta;
  return integrate(f, -kInfinity, mid).value + integrate(f, mid, kInfinity).value;
}

double chi2_signmixture_quadrature_1d(double eps, std::int64_t n) {
  const double nd = static_cast<double>(n);
  auto f = [&](double x) {
    if (!std::isfinite(x)) return 0.0;
    return weighted_square(log_normal_pdf(x, nd), log_cosh(nd * eps * x) - 0.5 * nd * eps * eps);
  };
  // Integrand is even.
  return 2.0 * integrate(f, 0.0, kInfinity).value;
}

}  // namespace funcest
