#pragma once

// Discrete heavy-tail fitting: power law with KS-selected xmin, discretized log-normal on the
// same tail, semi-parametric bootstrap goodness of fit, and Vuong's likelihood-ratio test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "scimap/error.hpp"
#include "scimap/util/parallel.hpp"
#include "scimap/util/rng.hpp"

namespace scimap {

// ---------------------------------------------------------------------------
// Special functions

/// Hurwitz zeta sum_{k>=0} (q + k)^-s for s > 1, q > 0. Direct summation until q + N is large
/// relative to s, then an Euler-Maclaurin tail with eight Bernoulli terms; relative error is
/// below 1e-12 across the parameter range used here.
inline double hurwitz_zeta(double s, double q) {
  if (!(s > 1.0) || !(q > 0.0)) throw Error(ErrorKind::InvalidArgument, "hurwitz_zeta needs s > 1 and q > 0");
  const double threshold = std::max(12.0, 2.0 * s);
  double sum = 0.0;
  double a = q;
  while (a < threshold) {
    sum += std::pow(a, -s);
    a += 1.0;
  }
  // B_{2j} / (2j)!
  static constexpr double kB[] = {1.0 / 12.0,          -1.0 / 720.0,           1.0 / 30240.0,
                                  -1.0 / 1209600.0,    1.0 / 47900160.0,       -691.0 / 1307674368000.0,
                                  1.0 / 74724249600.0, -3617.0 / 10670622842880000.0};
  const double a_s = std::pow(a, -s);
  double tail = a * a_s / (s - 1.0) + 0.5 * a_s;
  // Term j uses s(s+1)...(s+2j-2) * a^(-s-2j+1).
  double rising = s;
  double power = a_s / a;
  for (int j = 0; j < 8; ++j) {
    tail += kB[j] * rising * power;
    rising *= (s + 2 * j + 1) * (s + 2 * j + 2);
    power /= a * a;
  }
  return sum + tail;
}

/// log P(Z > z) for a standard normal, accurate far into both tails.
inline double log_normal_sf(double z) {
  if (z < 25.0) return std::log(0.5 * std::erfc(z / std::numbers::sqrt2));
  // Asymptotic expansion of the Mills ratio.
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return -0.5 * z2 - std::log(z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

/// log(exp(a) - exp(b)) for a > b.
inline double log_diff_exp(double a, double b) {
  if (!(a > b)) return -std::numeric_limits<double>::infinity();
  return a + std::log1p(-std::exp(b - a));
}

// ---------------------------------------------------------------------------
// Results

enum class TailModel { power_law, log_normal };

constexpr std::string_view to_string(TailModel m) { return m == TailModel::power_law ? "power_law" : "log_normal"; }

struct TailFit {
  TailModel model = TailModel::power_law;
  double alpha = 0;  // power law
  double mu = 0;     // log-normal
  double sigma = 0;  // log-normal
  std::int64_t xmin = 1;
  std::size_t n_tail = 0;
  double log_likelihood = 0;
  double ks_stat = 0;

  bool operator==(const TailFit&) const = default;
};

struct GofResult {
  double p_value = 0;
  std::size_t n_bootstrap = 0;
  std::uint64_t seed = 0;
  double observed_ks = 0;
  std::size_t failed_refits = 0;
};

enum class Preference { power_law, log_normal, indistinguishable };

constexpr std::string_view to_string(Preference p) {
  switch (p) {
    case Preference::power_law: return "power_law";
    case Preference::log_normal: return "log_normal";
    case Preference::indistinguishable: return "indistinguishable";
  }
  return "?";
}

struct VuongResult {
  double statistic = 0;
  double p_value = 1;
  double log_likelihood_ratio = 0;
  std::size_t n = 0;
  Preference preferred = Preference::indistinguishable;
};

// ---------------------------------------------------------------------------
// Discrete power law

namespace detail {

/// Distinct sorted values with multiplicities.
struct Histogram {
  std::vector<std::int64_t> values;
  std::vector<std::size_t> counts;
  std::vector<std::size_t> tail_count;  // samples >= values[i]
  std::vector<double> tail_log_sum;     // sum of ln x over samples >= values[i]
  std::size_t n = 0;

  explicit Histogram(std::span<const std::int64_t> samples) {
    std::vector<std::int64_t> s(samples.begin(), samples.end());
    for (auto x : s)
      if (x <= 0) throw Error(ErrorKind::NonPositiveSample, "sample " + std::to_string(x) + " is not positive");
    std::sort(s.begin(), s.end());
    n = s.size();
    for (std::size_t i = 0; i < s.size();) {
      std::size_t j = i;
      while (j < s.size() && s[j] == s[i]) ++j;
      values.push_back(s[i]);
      counts.push_back(j - i);
      i = j;
    }
    tail_count.assign(values.size() + 1, 0);
    tail_log_sum.assign(values.size() + 1, 0.0);
    for (std::size_t i = values.size(); i-- > 0;) {
      tail_count[i] = tail_count[i + 1] + counts[i];
      tail_log_sum[i] = tail_log_sum[i + 1] + static_cast<double>(counts[i]) * std::log(static_cast<double>(values[i]));
    }
  }

  std::size_t index_of(std::int64_t xmin) const {
    return static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), xmin) - values.begin());
  }
};

/// Maximum deviation between the empirical and fitted power-law CDFs over the tail from index i0.
inline double power_law_ks(const Histogram& h, std::size_t i0, double alpha) {
  const auto xmin = h.values[i0];
  const double z = hurwitz_zeta(alpha, static_cast<double>(xmin));
  const double n = static_cast<double>(h.tail_count[i0]);
  double cum = 0, d = 0;
  // cur tracks zeta(alpha, pos); short gaps are bridged by subtracting terms.
  double cur = z;
  std::int64_t pos = xmin;
  for (std::size_t i = i0; i < h.values.size(); ++i) {
    const auto x = h.values[i];
    cum += static_cast<double>(h.counts[i]);
    const std::int64_t target = x + 1;
    if (target - pos <= 64) {
      for (; pos < target; ++pos) cur -= std::pow(static_cast<double>(pos), -alpha);
    } else {
      cur = hurwitz_zeta(alpha, static_cast<double>(target));
      pos = target;
    }
    const double fitted = 1.0 - cur / z;
    d = std::max(d, std::abs(cum / n - fitted));
  }
  return std::min(d, 1.0);
}

inline double power_law_mle(const Histogram& h, std::size_t i0, double lo, double hi) {
  const double n = static_cast<double>(h.tail_count[i0]);
  const double log_sum = h.tail_log_sum[i0];
  const double xmin = static_cast<double>(h.values[i0]);
  auto nll = [&](double a) { return n * std::log(hurwitz_zeta(a, xmin)) + a * log_sum; };
  std::uintmax_t iters = 200;
  return boost::math::tools::brent_find_minima(nll, lo, hi, 30, iters).first;
}

}  // namespace detail

struct PowerLawOptions {
  std::size_t min_tail = 50;  // smallest tail a candidate xmin may leave (capped at n)
  double alpha_lo = 1.0001;
  double alpha_hi = 30.0;
};

inline double power_law_log_pmf(std::int64_t x, double alpha, std::int64_t xmin) {
  return -alpha * std::log(static_cast<double>(x)) - std::log(hurwitz_zeta(alpha, static_cast<double>(xmin)));
}

inline double power_law_cdf(std::int64_t x, double alpha, std::int64_t xmin) {
  if (x < xmin) return 0.0;
  return 1.0 - hurwitz_zeta(alpha, static_cast<double>(x + 1)) / hurwitz_zeta(alpha, static_cast<double>(xmin));
}

/// Discrete power-law fit. Each distinct value leaving a large enough, non-constant tail is a
/// candidate xmin; alpha is the numerical MLE for that tail; the chosen xmin minimizes KS.
inline TailFit fit_power_law(std::span<const std::int64_t> samples, const PowerLawOptions& opts = {}) {
  const detail::Histogram h(samples);
  if (h.values.size() < 2) throw Error(ErrorKind::DegenerateInput, "power-law fit needs at least two distinct values");
  const std::size_t min_tail = std::max<std::size_t>(2, std::min(opts.min_tail, h.n));
  TailFit best;
  best.ks_stat = 2.0;
  for (std::size_t i = 0; i + 1 < h.values.size(); ++i) {
    if (h.tail_count[i] < min_tail) break;
    const double alpha = detail::power_law_mle(h, i, opts.alpha_lo, opts.alpha_hi);
    const double ks = detail::power_law_ks(h, i, alpha);
    if (ks < best.ks_stat) {
      best.alpha = alpha;
      best.xmin = h.values[i];
      best.n_tail = h.tail_count[i];
      best.ks_stat = ks;
    }
  }
  const double xmin = static_cast<double>(best.xmin);
  const auto i0 = h.index_of(best.xmin);
  best.log_likelihood = -static_cast<double>(best.n_tail) * std::log(hurwitz_zeta(best.alpha, xmin)) -
                        best.alpha * h.tail_log_sum[i0];
  return best;
}

/// Exact sampler for the discrete power law on [xmin, inf): inversion against a tabulated CDF,
/// with a bracketed zeta search past the table.
class PowerLawSampler {
 public:
  PowerLawSampler(double alpha, std::int64_t xmin, std::size_t table = 1 << 14)
      : alpha_(alpha), xmin_(xmin), z_(hurwitz_zeta(alpha, static_cast<double>(xmin))) {
    cdf_.reserve(table);
    double acc = 0;
    for (std::size_t k = 0; k < table; ++k) {
      acc += std::pow(static_cast<double>(xmin + static_cast<std::int64_t>(k)), -alpha) / z_;
      cdf_.push_back(acc);
    }
  }

  std::int64_t operator()(Rng& rng) const {
    const double u = uniform01(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it != cdf_.end()) return xmin_ + (it - cdf_.begin());
    // P(X >= x) = zeta(alpha, x) / z; find the smallest x with P(X >= x + 1) <= 1 - u.
    const double target = 1.0 - u;
    auto survival_after = [&](std::int64_t x) { return hurwitz_zeta(alpha_, static_cast<double>(x + 1)) / z_; };
    std::int64_t lo = xmin_ + static_cast<std::int64_t>(cdf_.size()) - 1;  // survival_after(lo) > target
    std::int64_t hi = lo * 2;
    while (survival_after(hi) > target) {
      lo = hi;
      if (hi > (INT64_C(1) << 60)) return hi;
      hi *= 2;
    }
    while (hi - lo > 1) {
      const auto mid = lo + (hi - lo) / 2;
      (survival_after(mid) > target ? lo : hi) = mid;
    }
    return hi;
  }

 private:
  double alpha_;
  std::int64_t xmin_;
  double z_;
  std::vector<double> cdf_;
};

/// Semi-parametric bootstrap: synthetic sets draw from the fitted tail with probability
/// n_tail / n and otherwise resample the observed values below xmin; each is refitted and the
/// p-value is the fraction of synthetic KS distances at least the observed one.
inline GofResult gof_bootstrap(const TailFit& fit, std::span<const std::int64_t> samples, std::size_t n_sims,
                               std::uint64_t seed, unsigned workers = 1, const PowerLawOptions& opts = {}) {
  if (fit.model != TailModel::power_law) throw Error(ErrorKind::InvalidArgument, "bootstrap needs a power-law fit");
  if (n_sims < 100) throw Error(ErrorKind::InvalidArgument, "bootstrap needs at least 100 simulations");
  if (samples.empty()) throw Error(ErrorKind::EmptyInput, "no samples");
  std::vector<std::int64_t> below;
  for (auto x : samples)
    if (x < fit.xmin) below.push_back(x);
  std::sort(below.begin(), below.end());
  const double p_tail = static_cast<double>(fit.n_tail) / static_cast<double>(samples.size());
  const PowerLawSampler sampler(fit.alpha, fit.xmin);

  std::vector<double> ks(n_sims, 0.0);
  std::vector<char> failed(n_sims, 0);
  parallel_chunks(n_sims, std::max(1u, workers), [&](std::size_t begin, std::size_t end, unsigned) {
    std::vector<std::int64_t> synth(samples.size());
    for (std::size_t i = begin; i < end; ++i) {
      auto rng = derived_rng(seed, i);
      for (auto& x : synth) {
        if (below.empty() || uniform01(rng) < p_tail)
          x = sampler(rng);
        else
          x = below[uniform_index(rng, below.size())];
      }
      try {
        ks[i] = fit_power_law(synth, opts).ks_stat;
      } catch (const Error&) {
        failed[i] = 1;  // a constant synthetic set cannot be fitted; counts as not exceeding
      }
    }
  });
  GofResult r;
  r.n_bootstrap = n_sims;
  r.seed = seed;
  r.observed_ks = fit.ks_stat;
  std::size_t exceed = 0;
  for (std::size_t i = 0; i < n_sims; ++i) {
    if (failed[i]) {
      ++r.failed_refits;
      continue;
    }
    if (ks[i] >= fit.ks_stat) ++exceed;
  }
  r.p_value = static_cast<double>(exceed) / static_cast<double>(n_sims);
  return r;
}

// ---------------------------------------------------------------------------
// Discretized log-normal

/// log P(X = x | X >= xmin) for P(X = x) = F(x + 1) - F(x), F the continuous log-normal CDF.
inline double lognormal_log_pmf(std::int64_t x, double mu, double sigma, std::int64_t xmin) {
  auto z = [&](std::int64_t t) { return (std::log(static_cast<double>(t)) - mu) / sigma; };
  const double z1 = z(x), z2 = z(x + 1), z0 = z(xmin);
  double log_mass;
  if (z1 > 0)
    log_mass = log_diff_exp(log_normal_sf(z1), log_normal_sf(z2));
  else  // lower half: difference of CDFs, via the mirrored survival function
    log_mass = log_diff_exp(log_normal_sf(-z2), log_normal_sf(-z1));
  return log_mass - log_normal_sf(z0);
}

inline double lognormal_cdf(std::int64_t x, double mu, double sigma, std::int64_t xmin) {
  if (x < xmin) return 0.0;
  auto z = [&](std::int64_t t) { return (std::log(static_cast<double>(t)) - mu) / sigma; };
  return 1.0 - std::exp(log_normal_sf(z(x + 1)) - log_normal_sf(z(xmin)));
}

struct LogNormalOptions {
  double sigma_lo = 1e-3;
  double sigma_hi = 20.0;
  double mu_span = 60.0;  // mu searched in [ln(max) - mu_span, ln(max) + 10]
};

/// Maximum-likelihood (mu, sigma) of the discretized log-normal truncated at xmin, by nested
/// one-dimensional minimization (mu profiled out for each sigma).
inline TailFit fit_lognormal_tail(std::span<const std::int64_t> samples, std::int64_t xmin,
                                  const LogNormalOptions& opts = {}) {
  if (xmin < 1) throw Error(ErrorKind::InvalidArgument, "xmin must be positive");
  const detail::Histogram h(samples);
  const auto i0 = h.index_of(xmin);
  if (h.values.size() - i0 < 2) throw Error(ErrorKind::DegenerateInput, "log-normal tail needs two distinct values");
  auto nll = [&](double mu, double sigma) {
    double s = 0;
    for (std::size_t i = i0; i < h.values.size(); ++i)
      s -= static_cast<double>(h.counts[i]) * lognormal_log_pmf(h.values[i], mu, sigma, xmin);
    return std::isfinite(s) ? s : 1e300;
  };
  const double top = std::log(static_cast<double>(h.values.back()));
  const double mu_lo = top - opts.mu_span, mu_hi = top + 10.0;
  auto best_mu = [&](double sigma) {
    std::uintmax_t it = 300;
    return boost::math::tools::brent_find_minima([&](double m) { return nll(m, sigma); }, mu_lo, mu_hi, 30, it);
  };
  std::uintmax_t it = 300;
  // Search sigma on a log scale.
  auto outer = boost::math::tools::brent_find_minima(
      [&](double ls) { return best_mu(std::exp(ls)).second; }, std::log(opts.sigma_lo), std::log(opts.sigma_hi), 30, it);
  TailFit f;
  f.model = TailModel::log_normal;
  f.sigma = std::exp(outer.first);
  f.mu = best_mu(f.sigma).first;
  f.xmin = xmin;
  f.n_tail = h.tail_count[i0];
  f.log_likelihood = -nll(f.mu, f.sigma);
  double cum = 0, d = 0;
  for (std::size_t i = i0; i < h.values.size(); ++i) {
    cum += static_cast<double>(h.counts[i]);
    d = std::max(d, std::abs(cum / static_cast<double>(f.n_tail) - lognormal_cdf(h.values[i], f.mu, f.sigma, xmin)));
  }
  f.ks_stat = std::min(d, 1.0);
  return f;
}

// ---------------------------------------------------------------------------
// Model comparison

inline double tail_log_pmf(const TailFit& f, std::int64_t x) {
  return f.model == TailModel::power_law ? power_law_log_pmf(x, f.alpha, f.xmin)
                                         : lognormal_log_pmf(x, f.mu, f.sigma, f.xmin);
}

/// Vuong's test on pointwise log-likelihoods of model A and model B. Positive statistics
/// favour A. `prefer_a` / `prefer_b` name the outcome when the test is significant.
inline VuongResult vuong_from_loglik(std::span<const double> ll_a, std::span<const double> ll_b,
                                     double significance = 0.05, Preference prefer_a = Preference::power_law,
                                     Preference prefer_b = Preference::log_normal) {
  if (ll_a.size() != ll_b.size() || ll_a.size() < 2)
    throw Error(ErrorKind::InvalidArgument, "Vuong's test needs two equal-length samples of size >= 2");
  const std::size_t n = ll_a.size();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = ll_a[i] - ll_b[i];
  const double sum = std::accumulate(r.begin(), r.end(), 0.0);
  const double mean = sum / static_cast<double>(n);
  double ss = 0;
  for (double x : r) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  VuongResult v;
  v.n = n;
  v.log_likelihood_ratio = sum;
  if (sd == 0.0) {
    v.statistic = mean == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), mean);
  } else {
    v.statistic = mean * std::sqrt(static_cast<double>(n)) / sd;
  }
  v.p_value = std::erfc(std::abs(v.statistic) / std::numbers::sqrt2);
  if (v.p_value < significance && v.statistic != 0.0) v.preferred = v.statistic > 0 ? prefer_a : prefer_b;
  return v;
}

/// Power law versus log-normal on their shared tail.
inline VuongResult vuong_compare(const TailFit& fit_pl, const TailFit& fit_ln, std::span<const std::int64_t> samples,
                                 double significance = 0.05) {
  if (fit_pl.xmin != fit_ln.xmin)
    throw Error(ErrorKind::SharedSupportViolation, "fits use xmin " + std::to_string(fit_pl.xmin) + " and " +
                                                       std::to_string(fit_ln.xmin));
  std::vector<double> a, b;
  for (auto x : samples) {
    if (x < fit_pl.xmin) continue;
    a.push_back(tail_log_pmf(fit_pl, x));
    b.push_back(tail_log_pmf(fit_ln, x));
  }
  const auto pa = fit_pl.model == TailModel::power_law ? Preference::power_law : Preference::log_normal;
  const auto pb = fit_ln.model == TailModel::power_law ? Preference::power_law : Preference::log_normal;
  return vuong_from_loglik(a, b, significance, pa, pb);
}

/// Empirical and fitted CDFs at each distinct tail value.
struct CdfPoint {
  std::int64_t x = 0;
  double empirical = 0;
  double power_law = 0;
  double log_normal = 0;
};

inline std::vector<CdfPoint> tail_cdf_points(const TailFit& fit_pl, const TailFit& fit_ln,
                                             std::span<const std::int64_t> samples) {
  const detail::Histogram h(samples);
  const auto i0 = h.index_of(fit_pl.xmin);
  std::vector<CdfPoint> out;
  double cum = 0;
  for (std::size_t i = i0; i < h.values.size(); ++i) {
    cum += static_cast<double>(h.counts[i]);
    CdfPoint p;
    p.x = h.values[i];
    p.empirical = cum / static_cast<double>(h.tail_count[i0]);
    p.power_law = power_law_cdf(p.x, fit_pl.alpha, fit_pl.xmin);
    p.log_normal = lognormal_cdf(p.x, fit_ln.mu, fit_ln.sigma, fit_ln.xmin);
    out.push_back(p);
  }
  return out;
}

}  // namespace scimap
