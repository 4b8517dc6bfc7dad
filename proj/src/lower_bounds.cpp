#include "funcest/lower_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "funcest/divergence.hpp"
#include "funcest/numeric.hpp"

namespace funcest {

namespace {

bool within_upper(double value, double limit) {
  return value <= limit + kAuditRoundoff * std::max(std::abs(limit), 1e-300);
}

void check_le(LBInstance& inst, std::string name, double value, double limit) {
  inst.checks.push_back({std::move(name), value, limit, within_upper(value, limit)});
}

void check_ge(LBInstance& inst, std::string name, double value, double limit) {
  const bool ok = value >= limit - kAuditRoundoff * std::abs(limit);
  inst.checks.push_back({std::move(name), value, limit, ok});
}

void check_membership(LBInstance& inst) {
  for (std::size_t i = 0; i < inst.claimed_radius.size(); ++i) {
    check_le(inst, inst.claimed_radius.size() == 1 ? "membership" : "membership_" + std::to_string(i + 1),
             inst.realized_radius[i], inst.claimed_radius[i]);
  }
}

void standard_checks(LBInstance& inst) {
  check_membership(inst);
  check_ge(inst, "separation", inst.separation, inst.claimed_separation);
  check_le(inst, "divergence", inst.divergence, inst.budget);
}

void require_n(std::int64_t n, const char* what) {
  if (n < 1) throw std::invalid_argument(std::string(what) + ": n must be at least 1");
}

void require_alpha(double alpha, const char* what) {
  if (!(alpha > 0.0)) throw std::invalid_argument(std::string(what) + ": alpha must be positive");
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

// ---- shared types ----

GaussianMixture::GaussianMixture(std::vector<SeqVector> centers, std::vector<double> weights, std::int64_t n)
    : centers_(std::move(centers)), weights_(std::move(weights)), n_(n) {
  require_n(n_, "GaussianMixture");
  if (centers_.empty() || centers_.size() != weights_.size()) {
    throw std::invalid_argument("GaussianMixture: need one weight per center");
  }
  CompensatedSum total;
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    if (centers_[i].ambient_len() != centers_[0].ambient_len()) {
      throw std::invalid_argument("GaussianMixture: centers differ in ambient length");
    }
    if (!(weights_[i] >= 0.0)) throw std::invalid_argument("GaussianMixture: negative weight");
    total.add(weights_[i]);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) throw std::invalid_argument("GaussianMixture: weights must sum to one");
}

GaussianMixture GaussianMixture::point(SeqVector center, std::int64_t n) {
  return GaussianMixture({std::move(center)}, {1.0}, n);
}

SeqVector SignMixture::component(std::uint64_t signs) const {
  if (indices.size() > 63) throw std::invalid_argument("SignMixture: too many coordinates for a sign mask");
  std::vector<double> c(center.coeffs().begin(), center.coeffs().end());
  for (std::size_t j = 0; j < indices.size(); ++j) c[indices[j]] += ((signs >> j) & 1U) ? eps : -eps;
  return SeqVector(std::move(c));
}

GaussianMixture SignMixture::materialize() const {
  if (indices.size() > kMaxMaterialized) {
    throw std::invalid_argument("SignMixture: refusing to materialize more than 2^20 components");
  }
  const std::uint64_t count = std::uint64_t{1} << indices.size();
  std::vector<SeqVector> centers;
  centers.reserve(count);
  for (std::uint64_t s = 0; s < count; ++s) centers.push_back(component(s));
  return GaussianMixture(std::move(centers), std::vector<double>(count, 1.0 / static_cast<double>(count)), n);
}

const char* to_string(DivergenceKind kind) { return kind == DivergenceKind::chi2 ? "chi2" : "hellinger"; }

bool LBInstance::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.pass; });
}

double LBInstance::param(const std::string& name) const {
  for (const auto& [k, v] : params) {
    if (k == name) return v;
  }
  throw std::out_of_range("LBInstance: no parameter " + name);
}

// ---- Gaussian sequence model ----

double chi2_mixture_vs_point(const GaussianMixture& mixture, const SeqVector& null_center) {
  const auto& centers = mixture.centers();
  const auto& w = mixture.weights();
  std::vector<std::vector<double>> shifted;
  shifted.reserve(centers.size());
  for (const auto& c : centers) {
    if (c.ambient_len() != null_center.ambient_len()) {
      throw std::invalid_argument("chi2_mixture_vs_point: dimension mismatch");
    }
    std::vector<double> d(c.ambient_len());
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = c[j] - null_center[j];
    shifted.push_back(std::move(d));
  }
  // E_P[(dQ/dP)^2] - 1 = sum_ab w_a w_b (exp(n <u_a, u_b>) - 1).
  const double nd = static_cast<double>(mixture.n());
  CompensatedSum s;
  for (std::size_t a = 0; a < shifted.size(); ++a) {
    for (std::size_t b = 0; b < shifted.size(); ++b) {
      s.add(w[a] * w[b] * std::expm1(nd * dot(shifted[a], shifted[b])));
    }
  }
  return s.value();
}

LBInstance gsm_lb1(const SeqVector& theta_hat, double r, std::int64_t n, double alpha) {
  require_n(n, "gsm_lb1");
  require_alpha(alpha, "gsm_lb1");
  const double norm2 = quadratic_functional(theta_hat);
  const double nd = static_cast<double>(n);
  if (!(norm2 > 0.0)) throw std::invalid_argument("gsm_lb1: pilot must be nonzero");
  if (r < 1.0 / nd) throw std::invalid_argument("gsm_lb1: regime requires r >= 1/n");
  if (r * r > kHiddenConstant * norm2 / nd) {
    throw std::invalid_argument("gsm_lb1: regime requires r^2 <= 100 |theta_hat|^2 / n");
  }
  const double nu = std::sqrt(alpha / (2.0 * nd * norm2));
  if (nu >= 1.0) throw std::invalid_argument("gsm_lb1: nu >= 1");

  const SeqVector alt = (1.0 - nu) * theta_hat;
  LBInstance inst;
  inst.construction = "gsm_lb1";
  inst.params = {{"n", nd}, {"r", r}, {"alpha", alpha}, {"nu", nu}, {"pilot_norm2", norm2}};
  inst.null_dist = GaussianMixture::point(theta_hat, n);
  inst.alt_dist = GaussianMixture::point(alt, n);
  inst.separation = std::abs(quadratic_functional(theta_hat) - quadratic_functional(alt));
  inst.claimed_separation = nu * norm2;
  inst.divergence_kind = DivergenceKind::chi2;
  inst.divergence = chi2_gaussians(alt, theta_hat, n);
  inst.budget = alpha;
  inst.claimed_radius = {r};
  inst.realized_radius = {squared_distance(theta_hat.coeffs(), alt.coeffs())};
  standard_checks(inst);
  return inst;
}

LBInstance gsm_lb2(const SeqVector& theta_hat, double r, std::int64_t n, double alpha) {
  require_n(n, "gsm_lb2");
  require_alpha(alpha, "gsm_lb2");
  const double nd = static_cast<double>(n);
  if (r < 0.0) throw std::invalid_argument("gsm_lb2: r must be nonnegative");
  if (r > 1.0 / nd) throw std::invalid_argument("gsm_lb2: regime requires r <= 1/n");
  if (2.0 * nd * r > alpha) throw std::invalid_argument("gsm_lb2: requires 2 n r <= alpha");
  if (theta_hat.ambient_len() == 0) throw std::invalid_argument("gsm_lb2: empty pilot");

  LBInstance inst;
  const double norm = theta_hat.norm();
  SeqVector direction;
  if (norm > 0.0) {
    direction = (1.0 / norm) * theta_hat;
  } else {
    direction = SeqVector::axis(theta_hat.ambient_len(), 0);
    inst.flags.push_back("zero pilot: stretched along the first coordinate");
  }
  const SeqVector alt = theta_hat + std::sqrt(r) * direction;
  inst.construction = "gsm_lb2";
  inst.params = {{"n", nd}, {"r", r}, {"alpha", alpha}, {"pilot_norm", norm}};
  inst.null_dist = GaussianMixture::point(theta_hat, n);
  inst.alt_dist = GaussianMixture::point(alt, n);
  inst.separation = std::abs(quadratic_functional(alt) - quadratic_functional(theta_hat));
  inst.claimed_separation = 2.0 * std::sqrt(r) * norm;
  inst.divergence_kind = DivergenceKind::chi2;
  inst.divergence = chi2_gaussians(alt, theta_hat, n);
  inst.budget = alpha;
  inst.claimed_radius = {r};
  inst.realized_radius = {squared_distance(theta_hat.coeffs(), alt.coeffs())};
  standard_checks(inst);
  return inst;
}

double lb3_printed_eps(double r, std::int64_t n, double alpha) {
  require_n(n, "lb3_printed_eps");
  if (!(r > 0.0)) throw std::invalid_argument("gsm_lb3: r must be positive");
  const double nd = static_cast<double>(n);
  return std::sqrt(alpha) * std::min(1.0 / (nd * r), 1.0 / nd);
}

LBInstance gsm_lb3(const SeqVector& theta_hat, double r, std::int64_t n, double alpha, const Lb3Options& options) {
  require_n(n, "gsm_lb3");
  require_alpha(alpha, "gsm_lb3");
  const double printed = lb3_printed_eps(r, n, alpha);
  const double eps = options.eps_override.value_or(printed);
  if (!(eps > 0.0)) throw std::invalid_argument("gsm_lb3: eps must be positive");
  // Relative slack so that eps = sqrt(r / d) recovers d despite rounding.
  const double ratio = r / (eps * eps) * (1.0 + 1e-12);
  if (ratio < 1.0) throw std::invalid_argument("gsm_lb3: d = floor(r / eps^2) is zero");
  if (ratio > static_cast<double>(options.max_dimension)) {
    throw std::invalid_argument("gsm_lb3: d = floor(r / eps^2) exceeds the dimension cap");
  }
  const auto d = static_cast<std::size_t>(std::floor(ratio));

  std::vector<std::size_t> indices;
  indices.reserve(d);
  for (std::size_t j = 0; j < theta_hat.ambient_len() && indices.size() < d; ++j) {
    if (std::abs(theta_hat[j]) <= eps / 4.0) indices.push_back(j);
  }
  SeqVector center = theta_hat;
  if (indices.size() < d) {
    if (!options.pad_with_zeros) {
      throw std::invalid_argument("gsm_lb3: fewer than d coordinates with |theta_hat_j| <= eps/4");
    }
    const std::size_t old_len = theta_hat.ambient_len();
    const std::size_t missing = d - indices.size();
    center = theta_hat.padded(old_len + missing);
    for (std::size_t j = 0; j < missing; ++j) indices.push_back(old_len + j);
  }

  const double nd = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  LBInstance inst;
  inst.construction = "gsm_lb3";
  inst.params = {{"n", nd},     {"r", r},           {"alpha", alpha}, {"eps", eps},
                 {"eps_printed", printed}, {"d", dd}, {"bound_exponent", dd * nd * nd * std::pow(eps, 4)}};
  if (options.eps_override) inst.flags.push_back("eps overridden; printed eps = " + fmt_double(printed));

  // Null and alternative share the offset theta_hat, so the divergence is the
  // centered sign-mixture value.
  const SignMixtureChi2 closed = chi2_point_vs_signmixture(static_cast<std::int64_t>(d), eps, n);
  if (d <= 10) {
    SignMixture mix{center, indices, eps, n};
    const double brute = chi2_mixture_vs_point(mix.materialize(), center);
    inst.params.emplace_back("chi2_bruteforce", brute);
  }

  CompensatedSum abs_offsets;
  for (std::size_t j : indices) abs_offsets.add(std::abs(center[j]));
  inst.separation = dd * eps * eps - 2.0 * eps * abs_offsets.value();
  inst.claimed_separation = dd * eps * eps / 2.0;
  inst.divergence_kind = DivergenceKind::chi2;
  inst.divergence = closed.exact;
  inst.budget = alpha;
  inst.claimed_radius = {r};
  inst.realized_radius = {dd * eps * eps};
  inst.null_dist = GaussianMixture::point(center, n);
  inst.alt_dist = SignMixture{std::move(center), std::move(indices), eps, n};
  standard_checks(inst);
  return inst;
}

// ---- Density model ----

double twopoint_gamma(const PiecewiseDensity& p1) {
  const double theta = t_quadratic(p1);
  return moment3(p1) - theta * theta;
}

PiecewiseDensity twopoint_alternative(const PiecewiseDensity& p1, double eps) {
  const double theta = t_quadratic(p1);
  std::vector<double> v(p1.cells());
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] = p1[k] * (1.0 + eps * p1[k] - eps * theta);
    if (v[k] < 0.0) throw std::invalid_argument("density_twopoint: eps too large (negative density)");
    if (v[k] > p1.sup_bound()) throw std::invalid_argument("density_twopoint: eps too large (sup bound breached)");
  }
  return PiecewiseDensity(GridFunction(std::move(v)), p1.sup_bound());
}

double twopoint_eps(const PiecewiseDensity& f_hat, double r, std::int64_t n, double alpha) {
  require_n(n, "twopoint_eps");
  require_alpha(alpha, "twopoint_eps");
  if (!(r > 0.0)) throw std::invalid_argument("twopoint_eps: r must be positive");
  const double gamma = twopoint_gamma(f_hat);
  if (!(gamma > 1e-15)) throw std::invalid_argument("twopoint_eps: degenerate pilot (gamma = 0)");
  const double theta = t_quadratic(f_hat);
  double eps = std::sqrt(alpha * std::min(1.0 / static_cast<double>(n), r) / gamma);

  // int (p1 - p2)^2 = eps^2 int p1^2 (p1 - theta)^2.
  CompensatedSum k;
  for (double v : f_hat.heights().values()) k.add(v * v * (v - theta) * (v - theta));
  const double l2_coef = k.value() * f_hat.heights().cell_width();
  if (l2_coef > 0.0) eps = std::min(eps, std::sqrt(r / l2_coef));

  // Validity: 1 + eps (v - theta) >= 0 and v (1 + eps (v - theta)) <= M.
  const double safety = 1.0 - 1e-12;
  for (double v : f_hat.heights().values()) {
    if (v <= 0.0) continue;
    if (v < theta) eps = std::min(eps, safety / (theta - v));
    if (v > theta) eps = std::min(eps, safety * (f_hat.sup_bound() / v - 1.0) / (v - theta));
  }
  return eps;
}

LBInstance density_twopoint(const PiecewiseDensity& f_hat, double eps, std::int64_t n, double r, double alpha) {
  require_n(n, "density_twopoint");
  if (eps < 0.0) throw std::invalid_argument("density_twopoint: eps must be nonnegative");
  const PiecewiseDensity p2 = twopoint_alternative(f_hat, eps);
  const double gamma = twopoint_gamma(f_hat);
  const double w = f_hat.heights().cell_width();
  std::vector<double> m1(f_hat.cells()), m2(f_hat.cells());
  for (std::size_t k = 0; k < m1.size(); ++k) {
    m1[k] = f_hat[k] * w;
    m2[k] = p2[k] * w;
  }
  const double h2 = hellinger_vectors(m1, m2);
  const HellingerProduct prod = hellinger_product_bound(std::min(h2, 2.0), n);

  LBInstance inst;
  inst.construction = "density_twopoint";
  inst.params = {{"n", static_cast<double>(n)}, {"r", r}, {"alpha", alpha}, {"eps", eps}, {"gamma", gamma},
                 {"hellinger_single", h2}, {"hellinger_product_exact", prod.exact}};
  inst.null_dist = DensityMixture{{f_hat}, {1.0}};
  inst.alt_dist = DensityMixture{{p2}, {1.0}};
  inst.separation = t_quadratic(p2) - t_quadratic(f_hat);
  inst.claimed_separation = 2.0 * eps * gamma;
  inst.divergence_kind = DivergenceKind::hellinger;
  inst.divergence = prod.bound;
  inst.budget = alpha;
  inst.claimed_radius = {r};
  inst.realized_radius = {l2sq_distance(f_hat, p2)};
  standard_checks(inst);
  check_le(inst, "hellinger_single", h2, eps * eps * gamma);
  return inst;
}

namespace {

struct ResolvedRegion {
  std::size_t first;
  std::size_t last;
  double volume;  // of the whole region
};

ResolvedRegion resolve(const PiecewiseDensity& p0, BumpRegion region) {
  const std::size_t last = region.last == 0 ? p0.cells() : region.last;
  if (region.first >= last || last > p0.cells()) throw std::invalid_argument("density_bump: bad region");
  return {region.first, last, static_cast<double>(last - region.first) / static_cast<double>(p0.cells())};
}

double region_inf(const PiecewiseDensity& p0, const ResolvedRegion& rr) {
  double lo = p0[rr.first];
  for (std::size_t k = rr.first; k < rr.last; ++k) lo = std::min(lo, p0[k]);
  return lo;
}

}  // namespace

PiecewiseDensity density_bump(const PiecewiseDensity& p0, std::size_t m, double h, std::span<const int> lambda,
                              BumpRegion region) {
  if (m == 0) throw std::invalid_argument("density_bump: m must be positive");
  if (lambda.size() != m) throw std::invalid_argument("density_bump: need one sign per pair");
  if (h < 0.0) throw std::invalid_argument("density_bump: h must be nonnegative");
  const ResolvedRegion rr = resolve(p0, region);
  const double vol_a = rr.volume / (2.0 * static_cast<double>(m));
  const double height = h / std::sqrt(vol_a);
  const double inf = region_inf(p0, rr);
  if (height > inf * (1.0 + 1e-12)) {
    throw std::invalid_argument("density_bump: h / sqrt(vol A) exceeds inf p0 on the region");
  }
  const std::size_t factor = 2 * m;
  const std::size_t width = rr.last - rr.first;  // fine cells per set
  GridFunction g = p0.heights().refined(factor);
  for (std::size_t t = 0; t < factor; ++t) {
    const int lam = lambda[t / 2];
    if (lam != 1 && lam != -1) throw std::invalid_argument("density_bump: signs must be +1 or -1");
    const double delta = (t % 2 == 0 ? 1.0 : -1.0) * lam * height;
    for (std::size_t c = 0; c < width; ++c) {
      const std::size_t k = rr.first * factor + t * width + c;
      double v = g[k] + delta;
      if (v < 0.0 && v > -1e-12 * std::max(inf, 1.0)) v = 0.0;
      g[k] = v;
    }
  }
  return PiecewiseDensity(std::move(g), p0.sup_bound());
}

BumpChi2 density_bump_chi2(const PiecewiseDensity& p0, std::size_t m, double h, std::int64_t n,
                           BumpRegion region) {
  require_n(n, "density_bump_chi2");
  if (m == 0) throw std::invalid_argument("density_bump_chi2: m must be positive");
  const ResolvedRegion rr = resolve(p0, region);
  const double inf = region_inf(p0, rr);
  if (!(inf > 0.0)) throw std::invalid_argument("density_bump_chi2: p0 must be positive on the region");
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  const double vol_a = rr.volume / (2.0 * md);
  const double height = h / std::sqrt(vol_a);

  // a_j = int over A_j u B_j of 1/p0, on the grid refined by 2m.
  const std::size_t factor = 2 * m;
  const std::size_t width = rr.last - rr.first;
  const double fine_w = 1.0 / static_cast<double>(p0.cells() * factor);
  BumpChi2 out;
  out.inf_p0 = inf;
  out.a.assign(m, 0.0);
  for (std::size_t t = 0; t < factor; ++t) {
    for (std::size_t c = 0; c < width; ++c) {
      const std::size_t fine = rr.first * factor + t * width + c;
      out.a[t / 2] += fine_w / p0[fine / factor];
    }
  }
  std::vector<double> coef(m);
  bool small = true;
  for (std::size_t j = 0; j < m; ++j) {
    coef[j] = height * height * out.a[j];
    small = small && nd * coef[j] <= 1.0;
  }
  const SignedChi2 chi = sign_mixture_chi2(coef, n);
  out.exact = chi.value;
  out.exact_is_bound = chi.is_bound;
  const double x = md * nd * nd * std::pow(h, 4) / (inf * inf);
  out.printed_bound = std::expm1(x);
  out.corrected_bound = std::expm1(4.0 * x);
  out.conditions_hold = height <= inf && small;
  return out;
}

LBInstance density_bump_instance(const PiecewiseDensity& f_hat, double r, std::int64_t n, double alpha) {
  require_n(n, "density_bump_instance");
  require_alpha(alpha, "density_bump_instance");
  if (!(r > 0.0)) throw std::invalid_argument("density_bump_instance: r must be positive");
  const double big_m = f_hat.sup_bound();
  const double nd = static_cast<double>(n);
  double eps = std::min(std::sqrt(r) / (4.0 * std::sqrt(1.0 + big_m)), 1.0);

  // Longest run of cells where the pilot is at most eps/4.
  std::size_t best_first = 0, best_len = 0;
  for (std::size_t k = 0; k < f_hat.cells();) {
    if (f_hat[k] > eps / 4.0) {
      ++k;
      continue;
    }
    std::size_t e = k;
    while (e < f_hat.cells() && f_hat[e] <= eps / 4.0) ++e;
    if (e - k > best_len) {
      best_first = k;
      best_len = e - k;
    }
    k = e;
  }
  if (best_len == 0) throw std::invalid_argument("density_bump_instance: no cell with f_hat <= eps/4");
  const BumpRegion region{best_first, best_first + best_len};
  const double v = static_cast<double>(best_len) / static_cast<double>(f_hat.cells());
  const double log_budget = std::log1p(alpha);

  auto choose_m = [&](double e) {
    const double need = std::max({std::ceil(nd * e / 2.0), std::ceil(nd * nd * e * e / log_budget), 1.0});
    if (need > 1e6) throw std::invalid_argument("density_bump_instance: required m too large");
    return static_cast<std::size_t>(need);
  };
  // Pair imbalance sum_j |int_{A_j} f - int_{B_j} f| for the 2m-way split.
  auto imbalance = [&](std::size_t m) {
    const std::size_t factor = 2 * m;
    const double fine_w = 1.0 / static_cast<double>(f_hat.cells() * factor);
    CompensatedSum total;
    for (std::size_t j = 0; j < m; ++j) {
      double diff = 0.0;
      for (std::size_t side = 0; side < 2; ++side) {
        const std::size_t t = 2 * j + side;
        for (std::size_t c = 0; c < best_len; ++c) {
          const std::size_t fine = best_first * factor + t * best_len + c;
          diff += (side == 0 ? 1.0 : -1.0) * f_hat[fine / factor] * fine_w;
        }
      }
      total.add(std::abs(diff));
    }
    return total.value();
  };
  // int (f_hat - U_S)^2.
  CompensatedSum k0s;
  for (std::size_t k = 0; k < f_hat.cells(); ++k) {
    const double u = (k >= region.first && k < region.last) ? 1.0 / v : 0.0;
    k0s.add((f_hat[k] - u) * (f_hat[k] - u));
  }
  const double k0 = k0s.value() / static_cast<double>(f_hat.cells());

  std::size_t m = choose_m(eps);
  bool shrunk = false;
  for (int iter = 0; iter < 50; ++iter) {
    // Largest membership distance over lambda, divided by eps^2.
    const double kmax = k0 + 2.0 * imbalance(m) / v + 1.0 / v;
    double cap = std::sqrt(r / kmax);
    // Sup bound on the bumps: (1 - eps) f + 2 eps / v <= M.
    for (std::size_t k = region.first; k < region.last; ++k) {
      cap = std::min(cap, (big_m - f_hat[k]) / (2.0 / v - f_hat[k]));
    }
    if (eps <= cap) break;
    eps = cap * (1.0 - 1e-12);
    shrunk = true;
    m = choose_m(eps);
  }

  // Mixed null density and its bumps.
  std::vector<double> mixed(f_hat.cells());
  for (std::size_t k = 0; k < mixed.size(); ++k) {
    const double u = (k >= region.first && k < region.last) ? 1.0 / v : 0.0;
    mixed[k] = (1.0 - eps) * f_hat[k] + eps * u;
  }
  const PiecewiseDensity p_tilde(GridFunction(std::move(mixed)), big_m);
  const double vol_a = v / (2.0 * static_cast<double>(m));
  const double height = eps / v;
  const double h = height * std::sqrt(vol_a);
  const BumpChi2 chi = density_bump_chi2(p_tilde, m, h, n, region);

  // Exact separation and membership extremes over lambda (separable per pair).
  const std::size_t factor = 2 * m;
  const GridFunction fine_tilde = p_tilde.heights().refined(factor);
  const GridFunction fine_hat = f_hat.heights().refined(factor);
  const double fine_w = 1.0 / static_cast<double>(fine_tilde.cells());
  CompensatedSum sep_pen, mem_gain, base_mem;
  for (std::size_t j = 0; j < m; ++j) {
    double tilde_diff = 0.0, dev_diff = 0.0;
    for (std::size_t side = 0; side < 2; ++side) {
      const double sg = side == 0 ? 1.0 : -1.0;
      for (std::size_t c = 0; c < best_len; ++c) {
        const std::size_t fine = best_first * factor + (2 * j + side) * best_len + c;
        tilde_diff += sg * fine_tilde[fine] * fine_w;
        dev_diff += sg * (fine_tilde[fine] - fine_hat[fine]) * fine_w;
      }
    }
    sep_pen.add(std::abs(tilde_diff));
    mem_gain.add(std::abs(dev_diff));
  }
  const double pert_sq = height * height * v;  // int of the squared perturbation
  const double null_dist = l2sq_distance(p_tilde, f_hat);
  const double alt_dist = null_dist + 2.0 * height * mem_gain.value() + pert_sq;

  LBInstance inst;
  inst.construction = "density_bump";
  inst.params = {{"n", nd},  {"r", r}, {"alpha", alpha}, {"eps", eps},
                 {"m", static_cast<double>(m)}, {"region_volume", v}, {"h", h}, {"sup_bound", big_m}};
  if (shrunk) inst.flags.push_back("eps reduced to keep every bumped density inside the radius and sup bound");
  if (chi.exact_is_bound) inst.flags.push_back("divergence is the prod-cosh upper bound (exact sum too large)");
  inst.null_dist = DensityMixture{{p_tilde}, {1.0}};
  DensityMixture alt;
  if (m <= 12) {
    const std::uint64_t count = std::uint64_t{1} << m;
    for (std::uint64_t s = 0; s < count; ++s) {
      std::vector<int> lam(m);
      for (std::size_t j = 0; j < m; ++j) lam[j] = ((s >> j) & 1U) ? 1 : -1;
      alt.components.push_back(density_bump(p_tilde, m, h, lam, region));
    }
    alt.weights.assign(count, 1.0 / static_cast<double>(count));
  } else {
    alt.implicit_log2_size = m;
  }
  inst.alt_dist = std::move(alt);
  inst.separation = pert_sq - 2.0 * height * sep_pen.value();
  inst.claimed_separation = 7.0 / 16.0 * eps * eps;
  inst.divergence_kind = DivergenceKind::chi2;
  inst.divergence = chi.exact;
  inst.budget = alpha;
  inst.claimed_radius = {r};
  inst.realized_radius = {std::max(null_dist, alt_dist)};
  standard_checks(inst);
  return inst;
}

// ---- Causal model ----

namespace {

double case1_h2(const NuisancePilots& pilots, double zeta) {
  const CausalModel null(pilots.mu_hat(), pilots.pi_hat(), GridFunction::constant(1, 0.0), pilots.margin());
  const CausalModel alt(pilots.mu_hat(), pilots.pi_hat(), GridFunction::constant(1, zeta), pilots.margin());
  return hellinger_vectors(null.outcome_table(), alt.outcome_table());
}

}  // namespace

LBInstance causal_case1(const NuisancePilots& pilots, double zeta, std::int64_t n, double alpha) {
  require_n(n, "causal_case1");
  const double eps = pilots.margin();
  if (zeta < 0.0) throw std::invalid_argument("causal_case1: zeta must be nonnegative");
  if (zeta > eps / 2.0 * (1.0 + 1e-12)) throw std::invalid_argument("causal_case1: zeta must be at most eps/2");

  const CausalModel null(pilots.mu_hat(), pilots.pi_hat(), GridFunction::constant(1, 0.0), eps);
  const CausalModel alt(pilots.mu_hat(), pilots.pi_hat(), GridFunction::constant(1, zeta), eps);
  const double h2 = hellinger_vectors(null.outcome_table(), alt.outcome_table());
  const HellingerProduct prod = hellinger_product_bound(std::min(h2, 2.0), n);
  const double exact_gap = psi_cov(alt) - psi_cov(null);
  const double printed_gap = zeta * integral_product(pilots.pi_hat(), pilots.pi_hat());

  LBInstance inst;
  inst.construction = "causal_case1";
  inst.params = {{"n", static_cast<double>(n)}, {"alpha", alpha}, {"zeta", zeta}, {"eps", eps},
                 {"hellinger_single", h2}, {"hellinger_product_exact", prod.exact},
                 {"printed_separation", printed_gap}};
  if (std::abs(exact_gap - printed_gap) > 1e-12 * std::max(1.0, std::abs(exact_gap))) {
    inst.flags.push_back("printed separation zeta*E[pi_hat^2] = " + fmt_double(printed_gap) +
                         " differs from the exact psi_cov gap " + fmt_double(exact_gap));
  }
  inst.null_dist = CausalMixture{{null}, {1.0}};
  inst.alt_dist = CausalMixture{{alt}, {1.0}};
  inst.separation = exact_gap;
  inst.claimed_separation = zeta * eps * (1.0 - eps);
  inst.divergence_kind = DivergenceKind::hellinger;
  inst.divergence = prod.bound;
  inst.budget = alpha;
  inst.claimed_radius = {0.0, 0.0};
  inst.realized_radius = {l2sq_distance(alt.pi(), null.pi()), l2sq_distance(alt.mu(), null.mu())};
  standard_checks(inst);
  check_le(inst, "hellinger_single", h2, kHiddenConstant * zeta * zeta);
  return inst;
}

double case1_zeta(const NuisancePilots& pilots, std::int64_t n, double alpha) {
  require_n(n, "case1_zeta");
  require_alpha(alpha, "case1_zeta");
  const double nd = static_cast<double>(n);
  double hi = pilots.margin() / 2.0;
  if (nd * case1_h2(pilots, hi) <= alpha) return hi;
  double lo = 0.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (nd * case1_h2(pilots, mid) <= alpha ? lo : hi) = mid;
  }
  return lo;
}

CausalCase2Family::CausalCase2Family(const NuisancePilots& pilots, std::size_t m, double h1, double h2)
    : pi_hat_(pilots.pi_hat()),
      mu_hat_(pilots.mu_hat()),
      margin_(pilots.margin()),
      m_(m),
      h1_(h1),
      h2_(h2),
      null_(GridFunction::constant(1, 0.5), GridFunction::constant(1, 0.5), GridFunction::constant(1, 0.0)) {
  if (m_ == 0) throw std::invalid_argument("causal_case2: m must be positive");
  if (h1_ < 0.0 || h2_ < 0.0) throw std::invalid_argument("causal_case2: h1, h2 must be nonnegative");
  const std::size_t cells = std::lcm(pi_hat_.cells(), 4 * m_);
  if (cells > (std::size_t{1} << 24)) throw std::invalid_argument("causal_case2: grid too fine");
  pi_hat_ = pi_hat_.refined(cells / pi_hat_.cells());
  mu_hat_ = mu_hat_.refined(cells / mu_hat_.cells());
  bump_.assign(cells, -1);
  const std::size_t len = cells / (4 * m_);
  for (std::size_t b = 0; b < 2 * m_; ++b) {
    const std::size_t start = b * (cells / (2 * m_));
    for (std::size_t c = 0; c < len; ++c) bump_[start + c] = static_cast<int>(b);
  }
  null_ = CausalModel(mu_hat_, pi_hat_, GridFunction::constant(1, 0.0), margin_);
  // Each cell sees only its own pair's sign, so both constant sign vectors
  // cover every value the family can take.
  model_from_signs(std::vector<int>(m_, 1));
  model_from_signs(std::vector<int>(m_, -1));
}

double CausalCase2Family::pi_step(std::size_t cell) const {
  const int b = bump_[cell];
  if (b < 0) return 0.0;
  const double sign = (b % 2 == 0) ? -1.0 : 1.0;
  return sign * h1_ / (std::sqrt(bump_volume()) * mu_hat_[cell]);
}

double CausalCase2Family::mu_step(std::size_t cell) const {
  const int b = bump_[cell];
  if (b < 0) return 0.0;
  const double sign = (b % 2 == 0) ? -1.0 : 1.0;
  return sign * h2_ / (std::sqrt(bump_volume()) * pi_hat_[cell]);
}

CausalModel CausalCase2Family::model_from_signs(const std::vector<int>& signs) const {
  const std::size_t cells = pi_hat_.cells();
  std::vector<double> pi(cells), mu(cells), eta(cells);
  const double lo = margin_ / 2.0;
  const double hi = 1.0 - margin_ / 2.0;
  for (std::size_t k = 0; k < cells; ++k) {
    const double lam = bump_[k] < 0 ? 0.0 : signs[static_cast<std::size_t>(bump_[k]) / 2];
    pi[k] = pi_hat_[k] + lam * pi_step(k);
    mu[k] = mu_hat_[k] + lam * mu_step(k);
    if (pi[k] < lo || pi[k] > hi || mu[k] < lo || mu[k] > hi) {
      throw std::invalid_argument("causal_case2: perturbed nuisance leaves [eps/2, 1 - eps/2] (cell " +
                                  std::to_string(k) + ")");
    }
    eta[k] = (mu_hat_[k] - mu[k]) / (1.0 - pi[k]);
  }
  return CausalModel(GridFunction(std::move(mu)), GridFunction(std::move(pi)), GridFunction(std::move(eta)),
                     margin_);
}

CausalModel CausalCase2Family::model(std::uint64_t lambda) const {
  if (m_ > 64) throw std::invalid_argument("causal_case2: sign mask supports m <= 64");
  std::vector<int> signs(m_);
  for (std::size_t j = 0; j < m_; ++j) signs[j] = ((lambda >> j) & 1U) ? 1 : -1;
  return model_from_signs(signs);
}

std::vector<double> CausalCase2Family::table_from_signs(const std::vector<int>& signs) const {
  // q_lambda written so that it is affine in (pi_lambda, mu_lambda).
  const std::size_t cells = pi_hat_.cells();
  const double w = 1.0 / static_cast<double>(cells);
  std::vector<double> t(4 * cells);
  for (std::size_t k = 0; k < cells; ++k) {
    const double lam = bump_[k] < 0 ? 0.0 : signs[static_cast<std::size_t>(bump_[k]) / 2];
    const double pi = pi_hat_[k] + lam * pi_step(k);
    const double mu = mu_hat_[k] + lam * mu_step(k);
    const double mh = mu_hat_[k];
    t[4 * k + 0] = (1.0 - pi - mu + pi * mh) * w;  // a=0, y=0
    t[4 * k + 1] = (mu - pi * mh) * w;             // a=0, y=1
    t[4 * k + 2] = pi * (1.0 - mh) * w;            // a=1, y=0
    t[4 * k + 3] = pi * mh * w;                    // a=1, y=1
  }
  return t;
}

std::vector<double> CausalCase2Family::null_table() const { return table_from_signs(std::vector<int>(m_, 0)); }

std::vector<double> CausalCase2Family::outcome_table(std::uint64_t lambda) const {
  if (m_ > 64) throw std::invalid_argument("causal_case2: sign mask supports m <= 64");
  std::vector<int> signs(m_);
  for (std::size_t j = 0; j < m_; ++j) signs[j] = ((lambda >> j) & 1U) ? 1 : -1;
  return table_from_signs(signs);
}

double CausalCase2Family::pi_distance() const {
  CompensatedSum s;
  for (std::size_t k = 0; k < cells(); ++k) s.add(pi_step(k) * pi_step(k));
  return s.value() / static_cast<double>(cells());
}

double CausalCase2Family::mu_distance() const {
  CompensatedSum s;
  for (std::size_t k = 0; k < cells(); ++k) s.add(mu_step(k) * mu_step(k));
  return s.value() / static_cast<double>(cells());
}

double CausalCase2Family::separation() const {
  double best = std::numeric_limits<double>::infinity();
  for (double lam : {1.0, -1.0}) {
    CompensatedSum s;
    for (std::size_t k = 0; k < cells(); ++k) {
      const double dp = lam * pi_step(k);
      const double dm = lam * mu_step(k);
      s.add(pi_hat_[k] * dm + mu_hat_[k] * dp + dp * dm);
    }
    best = std::min(best, s.value() / static_cast<double>(cells()));
  }
  return best;
}

double CausalCase2Family::mixture_mean_error() const {
  if (m_ > 20) throw std::invalid_argument("causal_case2: mixture enumeration limited to m <= 20");
  const std::uint64_t count = std::uint64_t{1} << m_;
  const std::vector<double> p = null_table();
  std::vector<CompensatedSum> acc(p.size());
  for (std::uint64_t s = 0; s < count; ++s) {
    const auto q = outcome_table(s);
    for (std::size_t i = 0; i < q.size(); ++i) acc[i].add(q[i]);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    worst = std::max(worst, std::abs(acc[i].value() / static_cast<double>(count) - p[i]));
  }
  return worst;
}

double CausalCase2Family::chi2(std::int64_t n) const {
  require_n(n, "causal_case2 chi2");
  // q_lambda - p = sum_j lambda_j D_j with D_j supported on pair j, so
  // E_p[L_lambda L_nu] = 1 + sum_j lambda_j nu_j c_j, c_j = sum D_j^2 / p.
  const std::vector<double> p = null_table();
  const std::vector<double> plus = table_from_signs(std::vector<int>(m_, 1));
  std::vector<double> c(m_, 0.0);
  for (std::size_t k = 0; k < cells(); ++k) {
    if (bump_[k] < 0) continue;
    const std::size_t j = static_cast<std::size_t>(bump_[k]) / 2;
    for (std::size_t o = 0; o < 4; ++o) {
      const double d = plus[4 * k + o] - p[4 * k + o];
      c[j] += d * d / p[4 * k + o];
    }
  }
  return sign_mixture_chi2(c, n).value;
}

std::size_t CausalCase2Family::merged_atoms() const {
  std::size_t inside = 0;
  for (int b : bump_) inside += b >= 0 ? 1 : 0;
  return 4 * inside + 1;
}

double CausalCase2Family::hellinger_exhaustive(std::int64_t n) const {
  require_n(n, "causal_case2 hellinger");
  if (m_ > 16) throw std::invalid_argument("causal_case2: exhaustive Hellinger limited to m <= 16");
  const std::uint64_t count = std::uint64_t{1} << m_;
  const std::size_t atoms = merged_atoms();
  const double work = std::pow(static_cast<double>(atoms), static_cast<double>(n)) * static_cast<double>(count);
  if (work > 2e9) throw std::invalid_argument("causal_case2: exhaustive Hellinger too large");

  // Merged outcome space: every bump cell x (a, y), plus one atom for all
  // outcomes off the bumps, where every q_lambda equals p.
  const std::vector<double> p = null_table();
  std::vector<double> p_atom;
  std::vector<std::vector<double>> q_atom(count);
  std::vector<std::vector<double>> tables(count);
  for (std::uint64_t s = 0; s < count; ++s) tables[s] = outcome_table(s);
  CompensatedSum outside;
  for (std::size_t k = 0; k < cells(); ++k) {
    if (bump_[k] < 0) {
      for (std::size_t o = 0; o < 4; ++o) outside.add(p[4 * k + o]);
      continue;
    }
    for (std::size_t o = 0; o < 4; ++o) {
      p_atom.push_back(p[4 * k + o]);
      for (std::uint64_t s = 0; s < count; ++s) q_atom[s].push_back(tables[s][4 * k + o]);
    }
  }
  p_atom.push_back(outside.value());
  for (std::uint64_t s = 0; s < count; ++s) q_atom[s].push_back(outside.value());

  // Depth-first enumeration of n-tuples carrying running products.
  const auto depth = static_cast<std::size_t>(n);
  std::vector<double> p_prod(depth + 1, 1.0);
  std::vector<std::vector<double>> q_prod(depth + 1, std::vector<double>(count, 1.0));
  CompensatedSum h2;
  const double inv_count = 1.0 / static_cast<double>(count);
  auto visit = [&](auto&& self, std::size_t level) -> void {
    if (level == depth) {
      CompensatedSum q;
      for (std::uint64_t s = 0; s < count; ++s) q.add(q_prod[depth][s]);
      const double d = std::sqrt(p_prod[depth]) - std::sqrt(q.value() * inv_count);
      h2.add(d * d);
      return;
    }
    for (std::size_t a = 0; a < atoms; ++a) {
      p_prod[level + 1] = p_prod[level] * p_atom[a];
      for (std::uint64_t s = 0; s < count; ++s) q_prod[level + 1][s] = q_prod[level][s] * q_atom[s][a];
      self(self, level + 1);
    }
  };
  visit(visit, 0);
  return h2.value();
}

Case2Plan plan_causal_case2(const NuisancePilots& pilots, std::size_t m, double r, double s) {
  if (r < 0.0 || s < 0.0) throw std::invalid_argument("plan_causal_case2: radii must be nonnegative");
  const double eps = pilots.margin();
  const double sq_vol = std::sqrt(1.0 / (4.0 * static_cast<double>(m)));
  Case2Plan plan;
  const double h1_nominal = sq_vol * std::min(std::sqrt(r), eps / 2.0);
  const double h2_nominal = sq_vol * std::min(std::sqrt(s), eps / 2.0);
  plan.h1 = h1_nominal;
  plan.h2 = h2_nominal;

  // Distances scale with h^2; ranges scale with h.
  const CausalCase2Family unit(pilots, m, 0.0, 0.0);
  const std::size_t cells = unit.cells();
  CompensatedSum k_pi, k_mu;
  double h1_cap = std::numeric_limits<double>::infinity();
  double h2_cap = h1_cap;
  const GridFunction pi_f = unit.null_model().pi();
  const GridFunction mu_f = unit.null_model().mu();
  for (std::size_t k = 0; k < cells; ++k) {
    if (unit.bump_of(k) < 0) continue;
    const double ph = pi_f[k], mh = mu_f[k];
    k_pi.add(1.0 / (sq_vol * sq_vol * mh * mh));
    k_mu.add(1.0 / (sq_vol * sq_vol * ph * ph));
    const double room_pi = std::min(ph - eps / 2.0, 1.0 - eps / 2.0 - ph);
    const double room_mu = std::min(mh - eps / 2.0, 1.0 - eps / 2.0 - mh);
    h1_cap = std::min(h1_cap, sq_vol * mh * room_pi);
    h2_cap = std::min(h2_cap, sq_vol * ph * room_mu);
  }
  const double dist_pi = k_pi.value() / static_cast<double>(cells);
  const double dist_mu = k_mu.value() / static_cast<double>(cells);
  const double safety = 1.0 - 1e-12;
  if (plan.h1 * plan.h1 * dist_pi > r) plan.h1 = std::sqrt(r / dist_pi) * safety;
  if (plan.h2 * plan.h2 * dist_mu > s) plan.h2 = std::sqrt(s / dist_mu) * safety;
  plan.h1 = std::min(plan.h1, h1_cap * safety);
  plan.h2 = std::min(plan.h2, h2_cap * safety);

  // Remaining validity: the untreated outcome probabilities of q_lambda.
  for (int it = 0; it < 200; ++it) {
    try {
      CausalCase2Family probe(pilots, m, plan.h1, plan.h2);
      break;
    } catch (const std::invalid_argument&) {
      plan.h1 *= 0.9;
      plan.h2 *= 0.9;
    }
  }
  plan.shrink1 = h1_nominal > 0.0 ? plan.h1 / h1_nominal : 1.0;
  plan.shrink2 = h2_nominal > 0.0 ? plan.h2 / h2_nominal : 1.0;
  return plan;
}

LBInstance causal_case2(const NuisancePilots& pilots, std::size_t m, double h1, double h2, double r, double s,
                        std::int64_t n, double alpha) {
  require_n(n, "causal_case2");
  const CausalCase2Family fam(pilots, m, h1, h2);
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);

  LBInstance inst;
  inst.construction = "causal_case2";
  inst.params = {{"n", nd}, {"r", r}, {"s", s}, {"alpha", alpha}, {"m", md}, {"h1", h1}, {"h2", h2}};
  inst.null_dist = CausalMixture{{fam.null_model()}, {1.0}};
  CausalMixture alt;
  if (m <= 10) {
    const std::uint64_t count = std::uint64_t{1} << m;
    for (std::uint64_t l = 0; l < count; ++l) alt.components.push_back(fam.model(l));
    alt.weights.assign(count, 1.0 / static_cast<double>(count));
  } else {
    alt.implicit_log2_size = m;
  }
  inst.alt_dist = std::move(alt);

  inst.separation = fam.separation();
  inst.claimed_separation = md * h1 * h2;
  inst.divergence_kind = DivergenceKind::hellinger;
  inst.budget = alpha;
  const double small_work = std::pow(static_cast<double>(fam.merged_atoms()), nd) * std::ldexp(1.0, static_cast<int>(m));
  if (n <= 3 && m <= 3 && small_work <= 2e8) {
    inst.divergence = fam.hellinger_exhaustive(n);
    const double scale = md * nd * nd * (std::pow(h1, 4) + std::pow(h2, 4));
    if (scale > 0.0) inst.params.emplace_back("hellinger_constant", inst.divergence / scale);
  } else {
    inst.divergence = fam.chi2(n);
    inst.flags.push_back("divergence is chi^2(mixture || null), an upper bound on H^2");
  }
  inst.claimed_radius = {r, s};
  inst.realized_radius = {fam.pi_distance(), fam.mu_distance()};
  standard_checks(inst);
  if (m <= 20) {
    check_le(inst, "mixture_mean", fam.mixture_mean_error(), 1e-12);
  } else {
    inst.flags.push_back("mixture mean identity not enumerated (m > 20)");
  }
  return inst;
}

LBInstance causal_case2_instance(const NuisancePilots& pilots, double r, double s, std::int64_t n, double alpha,
                                 std::size_t max_m) {
  std::optional<LBInstance> last;
  for (std::size_t m = 1; m <= max_m; m *= 2) {
    const Case2Plan plan = plan_causal_case2(pilots, m, r, s);
    LBInstance inst = causal_case2(pilots, m, plan.h1, plan.h2, r, s, n, alpha);
    inst.params.emplace_back("shrink1", plan.shrink1);
    inst.params.emplace_back("shrink2", plan.shrink2);
    const bool fits = inst.divergence <= alpha;
    last = std::move(inst);
    if (fits) break;
  }
  return *last;
}

}  // namespace funcest
