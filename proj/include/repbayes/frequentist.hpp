#ifndef REPBAYES_FREQUENTIST_HPP
#define REPBAYES_FREQUENTIST_HPP

// Frequentist operating characteristics of the replication-success measures:
// success regions in the relative effect estimate d, shrinkage-paradox
// limits, analytic power and type I error, an information-consistency check,
// and a seeded Monte Carlo oracle.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "repbayes/normal_model.hpp"
#include "repbayes/numerics.hpp"

namespace repbayes::freq {

using normal::Level;
using normal::ReplicationPair;

enum class Method { sceptical_bf, two_trials, replication_bf, sceptical_p };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::sceptical_bf: return "sceptical_bf";
    case Method::two_trials: return "two_trials";
    case Method::replication_bf: return "replication_bf";
    case Method::sceptical_p: return "sceptical_p";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Success regions in d
// ---------------------------------------------------------------------------

/// Ordered disjoint intervals of relative effect estimates d achieving
/// replication success at a level. May be empty; endpoints may be infinite.
struct SuccessRegion {
  Method method;
  std::vector<std::pair<double, double>> intervals;
  bool empty() const { return intervals.empty(); }
  bool contains(double d) const {
    for (const auto& iv : intervals)
      if (d >= iv.first && d <= iv.second) return true;
    return false;
  }
  /// Smallest positive d in the region (the minimum relative effect estimate
  /// for a success in the original direction).
  std::optional<double> d_min() const {
    for (const auto& iv : intervals) {
      if (iv.second < 0.0) continue;
      return std::max(iv.first, 0.0);
    }
    return std::nullopt;
  }
};

/// Threshold z-value of the sceptical p-value comparison at level gamma:
/// the recalibrated p is compared against 1 - Phi(z_gamma), i.e. the plain
/// sceptical p against 1 - Phi(z_gamma/sqrt(golden ratio)).
inline double sceptical_p_threshold_z(Level gamma) {
  return normal::invert_min_bf(gamma.gamma) / std::sqrt(normal::golden_ratio);
}

/// Minimum relative effect estimate for sceptical-p success at the one-sided
/// level alpha_s: d >= sqrt((1/c + 1/(K-1))/K), K = z_o^2/z_{alpha_s}^2.
inline double sceptical_p_d_min(double z_o, double c, double alpha_s) {
  if (!(alpha_s > 0.0 && alpha_s < 0.5))
    throw std::domain_error("sceptical_p_d_min: alpha_s must be in (0, 0.5)");
  const double z_a = num::gaussian_quantile(1.0 - alpha_s);
  const double K = z_o * z_o / (z_a * z_a);
  if (K <= 1.0) return num::inf;  // no attainable success
  return std::sqrt((1.0 / c + 1.0 / (K - 1.0)) / K);
}

namespace detail {

// Success condition for the sceptical BF as a quadratic in d:
//   (alpha - beta) d^2 + 2 beta d - beta - L >= 0,
// alpha = z_o^2/(1/c+g), beta = z_o^2/(1/c+1),
// L = log[(1/c+1)/((1/c+g)(1+g))] + z_o^2 g/(1+g).
inline SuccessRegion sceptical_bf_region(double z_o, double c, Level gamma) {
  SuccessRegion out{Method::sceptical_bf, {}};
  const auto gg = normal::sufficiently_sceptical_g(z_o, gamma);
  if (!gg) return out;
  const double g = gg->g;
  const double ic = 1.0 / c;
  const double zo2 = z_o * z_o;
  const double alpha = zo2 / (ic + g);
  const double beta = zo2 / (ic + 1.0);
  const double L = std::log((ic + 1.0) / ((ic + g) * (1.0 + g))) +
                   zo2 * g / (1.0 + g);
  const double a2 = alpha - beta, a1 = 2.0 * beta, a0 = -beta - L;
  if (std::abs(g - 1.0) < 1e-9) {
    out.intervals.push_back({(L + beta) / (2.0 * beta), num::inf});
    return out;
  }
  const double disc = a1 * a1 - 4.0 * a2 * a0;
  if (a2 > 0.0) {  // g < 1: success outside the roots
    if (disc <= 0.0) {
      out.intervals.push_back({-num::inf, num::inf});
      return out;
    }
    const double q = -0.5 * (a1 + std::copysign(std::sqrt(disc), a1));
    const double r1 = q / a2, r2 = a0 / q;
    const double lo = std::min(r1, r2), hi = std::max(r1, r2);
    out.intervals.push_back({-num::inf, lo});
    out.intervals.push_back({hi, num::inf});
  } else {  // g > 1: success inside the roots
    if (disc <= 0.0) return out;
    const double q = -0.5 * (a1 + std::copysign(std::sqrt(disc), a1));
    const double r1 = q / a2, r2 = a0 / q;
    out.intervals.push_back({std::min(r1, r2), std::max(r1, r2)});
  }
  return out;
}

}  // namespace detail

/// Exact success region of the given method at level gamma, as intervals in
/// the relative effect estimate d. Empty regions are values, not errors.
inline SuccessRegion success_region(Method method, double z_o, double c,
                                    Level gamma) {
  if (!(c > 0.0)) throw std::domain_error("success_region: c must be > 0");
  const double zo2 = z_o * z_o;
  switch (method) {
    case Method::sceptical_bf:
      return detail::sceptical_bf_region(z_o, c, gamma);
    case Method::two_trials: {
      SuccessRegion out{Method::two_trials, {}};
      if (normal::log_min_bf(z_o) >= std::log(gamma.gamma)) return out;
      const double z_g = normal::invert_min_bf(gamma.gamma);
      out.intervals.push_back({z_g / (std::abs(z_o) * std::sqrt(c)), num::inf});
      return out;
    }
    case Method::replication_bf: {
      SuccessRegion out{Method::replication_bf, {}};
      // d outside (-sqrt(K) - H, sqrt(K) - H)
      const double K = (1.0 + (std::log1p(c) - 2.0 * std::log(gamma.gamma)) / zo2) *
                       (1.0 / c + 1.0) / c;
      const double H = (1.0 / c + 1.0) / (1.0 + c);  // equals 1/c
      out.intervals.push_back({-num::inf, -std::sqrt(K) - H});
      out.intervals.push_back({std::sqrt(K) - H, num::inf});
      return out;
    }
    case Method::sceptical_p: {
      SuccessRegion out{Method::sceptical_p, {}};
      const double z_thr = sceptical_p_threshold_z(gamma);
      if (zo2 <= z_thr * z_thr) return out;
      const double dmin =
          sceptical_p_d_min(std::abs(z_o), c, num::gaussian_cdf(-z_thr));
      out.intervals.push_back({dmin, num::inf});
      return out;
    }
  }
  throw std::logic_error("success_region: unknown method");
}

/// Most negative success-region endpoints of the two Bayes factor methods:
/// the onset of the replication paradox (success with an opposite-direction
/// replication estimate).
struct ParadoxThresholds {
  std::optional<double> sceptical_bf;
  std::optional<double> replication_bf;
};

inline ParadoxThresholds paradox_thresholds(double z_o, double c, Level gamma) {
  ParadoxThresholds out;
  const auto rs = success_region(Method::sceptical_bf, z_o, c, gamma);
  if (!rs.empty() && std::isinf(rs.intervals.front().first) &&
      rs.intervals.front().second < 0.0)
    out.sceptical_bf = rs.intervals.front().second;
  const auto rr = success_region(Method::replication_bf, z_o, c, gamma);
  if (!rr.empty() && std::isinf(rr.intervals.front().first) &&
      rr.intervals.front().second < 0.0)
    out.replication_bf = rr.intervals.front().second;
  return out;
}

// ---------------------------------------------------------------------------
// Shrinkage-paradox limits of d_min
// ---------------------------------------------------------------------------

enum class LimitKind { c_to_infinity, zo2_to_infinity };

/// Closed-form limits of the minimum relative effect estimate. A limit of
/// zero means the method suffers from the corresponding shrinkage paradox.
inline double d_min_limit(Method method, LimitKind kind, double z_o, double c,
                          Level gamma) {
  switch (method) {
    case Method::two_trials:
      return 0.0;
    case Method::replication_bf:
      if (kind == LimitKind::c_to_infinity) return 0.0;
      return std::sqrt((1.0 / c + 1.0) / c) - (1.0 / c + 1.0) / (1.0 + c);
    case Method::sceptical_bf: {
      if (kind == LimitKind::zo2_to_infinity)
        return std::sqrt((1.0 / c + 1.0) / c) - 1.0 / c;
      const auto gg = normal::sufficiently_sceptical_g(z_o, gamma);
      if (!gg)
        throw std::domain_error("d_min_limit: sceptical prior does not exist");
      const double g = gg->g;
      if (std::abs(g - 1.0) < 1e-9)
        return 0.75 - std::log(2.0) / (2.0 * z_o * z_o);
      const double zo2 = z_o * z_o;
      const double num_term = std::log(1.0 / (g * (1.0 + g))) / zo2 +
                              g / (1.0 + g) + 1.0 / (1.0 - g);
      const double root = std::sqrt(num_term * g / (1.0 - g));
      // For g < 1 the positive-side boundary is the upper root, for g > 1
      // the lower one.
      return g < 1.0 ? g / (g - 1.0) + root : g / (g - 1.0) - root;
    }
    case Method::sceptical_p: {
      if (kind == LimitKind::zo2_to_infinity) return 0.0;
      const double z_thr = sceptical_p_threshold_z(gamma);
      const double zo2 = z_o * z_o;
      const double K = zo2 / (z_thr * z_thr);
      if (K <= 1.0)
        throw std::domain_error("d_min_limit: z_o below the sceptical-p cutoff");
      return std::sqrt(z_thr * z_thr / (zo2 * (K - 1.0)));
    }
  }
  throw std::logic_error("d_min_limit: unknown method");
}

// ---------------------------------------------------------------------------
// Probability of replication success
// ---------------------------------------------------------------------------

/// Normal sampling law of the replication z-value.
struct SamplingHypothesis {
  double mu_zr;
  double var_zr;
  enum class Kind { null, conditional, predictive } kind;

  static SamplingHypothesis null() {
    return {0.0, 1.0, Kind::null};
  }
  /// True effect equal to the original estimate.
  static SamplingHypothesis conditional(double z_o, double c) {
    return {z_o * std::sqrt(c), 1.0, Kind::conditional};
  }
  /// Predictive law of z_r under the advocacy prior.
  static SamplingHypothesis predictive(double z_o, double c) {
    return {z_o * std::sqrt(c), 1.0 + c, Kind::predictive};
  }
};

struct RateResult {
  double probability;
  Method method;
  double gamma;
  std::optional<double> mc_std_error;  // only for Monte Carlo results
};

namespace detail {

inline double prob_sceptical_bf(double z_o, double c, Level gamma,
                                const SamplingHypothesis& hyp) {
  const auto gg = normal::sufficiently_sceptical_g(z_o, gamma);
  if (!gg) return 0.0;  // no sufficiently sceptical prior at this level
  const double g = gg->g;
  const double zo2 = z_o * z_o;
  const double ic = 1.0 / c;
  const double s = (z_o > 0.0) ? 1.0 : -1.0;
  const double sigma = std::sqrt(hyp.var_zr);
  if (std::abs(g - 1.0) <= 1e-5) {
    const double D = (zo2 * (0.5 + 1.0 / (ic + 1.0)) - std::log(2.0)) *
                     (1.0 + c) / (2.0 * z_o * std::sqrt(c));
    return num::gaussian_cdf(s * (hyp.mu_zr - D) / sigma);
  }
  const double A = std::log((ic + 1.0) / ((ic + g) * (1.0 + g))) +
                   zo2 * (g / (1.0 + g) + 1.0 / (1.0 - g));
  const double B = (1.0 - g) / ((1.0 + c * g) * (ic + 1.0));
  const double M = z_o * (1.0 + c * g) / (std::sqrt(c) * (g - 1.0));
  const double lambda = (hyp.mu_zr - M) * (hyp.mu_zr - M) / hyp.var_zr;
  const double x = A / (B * hyp.var_zr);
  if (g < 1.0) return (x <= 0.0) ? 1.0 : 1.0 - num::noncentral_chisq_cdf(x, lambda);
  return (x <= 0.0) ? 0.0 : num::noncentral_chisq_cdf(x, lambda);
}

inline double prob_replication_bf(double z_o, double c, Level gamma,
                                  const SamplingHypothesis& hyp) {
  const double zo2 = z_o * z_o;
  const double x = (zo2 + std::log1p(c) - 2.0 * std::log(gamma.gamma)) *
                   (1.0 + 1.0 / c) / hyp.var_zr;
  const double shift = hyp.mu_zr + z_o / std::sqrt(c);
  const double lambda = shift * shift / hyp.var_zr;
  return 1.0 - num::noncentral_chisq_cdf(x, lambda);
}

inline double prob_two_trials(double z_o, Level gamma,
                              const SamplingHypothesis& hyp) {
  if (z_o == 0.0 || normal::log_min_bf(z_o) >= std::log(gamma.gamma)) return 0.0;
  const double z_g = normal::invert_min_bf(gamma.gamma);
  const double s = (z_o > 0.0) ? 1.0 : -1.0;
  return 1.0 - num::gaussian_cdf((z_g - s * hyp.mu_zr) / std::sqrt(hyp.var_zr));
}

inline double prob_sceptical_p(double z_o, double c, Level gamma,
                               const SamplingHypothesis& hyp) {
  const auto region = success_region(Method::sceptical_p, z_o, c, gamma);
  if (region.empty()) return 0.0;
  const double dmin = region.intervals.front().first;
  const double s = (z_o > 0.0) ? 1.0 : -1.0;
  const double thr = dmin * std::abs(z_o) * std::sqrt(c);
  return 1.0 - num::gaussian_cdf((thr - s * hyp.mu_zr) / std::sqrt(hyp.var_zr));
}

}  // namespace detail

/// Probability of replication success at level gamma conditional on z_o and
/// c, with z_r drawn from the given sampling hypothesis.
inline RateResult prob_success(Method method, double z_o, double c, Level gamma,
                               const SamplingHypothesis& hyp) {
  if (!(c > 0.0)) throw std::domain_error("prob_success: c must be > 0");
  double p = 0.0;
  switch (method) {
    case Method::sceptical_bf: p = detail::prob_sceptical_bf(z_o, c, gamma, hyp); break;
    case Method::two_trials: p = detail::prob_two_trials(z_o, gamma, hyp); break;
    case Method::replication_bf: p = detail::prob_replication_bf(z_o, c, gamma, hyp); break;
    case Method::sceptical_p: p = detail::prob_sceptical_p(z_o, c, gamma, hyp); break;
  }
  return RateResult{std::clamp(p, 0.0, 1.0), method, gamma.gamma, std::nullopt};
}

// ---------------------------------------------------------------------------
// Global type I error
// ---------------------------------------------------------------------------

/// Global two-sided type I error rate at level gamma:
/// 2 * integral over z_o of P(success | z_o, c) phi(z_o), taken from the
/// method's own existence cutoff upward. The two-trials rule bypasses the
/// quadrature: T1E = 2 (1 - Phi(z_gamma))^2.
inline RateResult type1_error(Method method, Level gamma, double c) {
  if (!(c > 0.0)) throw std::domain_error("type1_error: c must be > 0");
  const double z_g = normal::invert_min_bf(gamma.gamma);
  if (method == Method::two_trials) {
    const double tail = num::gaussian_cdf(-z_g);
    return RateResult{2.0 * tail * tail, method, gamma.gamma, std::nullopt};
  }
  double lower = 0.0;
  if (method == Method::sceptical_bf) lower = z_g;
  if (method == Method::sceptical_p) lower = sceptical_p_threshold_z(gamma);
  const auto hyp = SamplingHypothesis::null();
  auto integrand = [&](double z) {
    return prob_success(method, z, c, gamma, hyp).probability *
           num::gaussian_pdf(z);
  };
  const auto r = num::integrate(integrand, num::Interval{lower, num::inf},
                                1e-6, 1e-12);
  return RateResult{std::clamp(2.0 * r.value, 0.0, 1.0), method, gamma.gamma,
                    std::nullopt};
}

// ---------------------------------------------------------------------------
// Monte Carlo oracle
// ---------------------------------------------------------------------------

/// Sampling truth for the Monte Carlo check. null draws both z-values from
/// the null; the other two condition on a fixed original z_o.
struct McTruth {
  enum class Kind { null, fixed_effect, predictive } kind;
  double z_o = 0.0;
  static McTruth null() { return {Kind::null, 0.0}; }
  static McTruth fixed_effect(double z_o) { return {Kind::fixed_effect, z_o}; }
  static McTruth predictive(double z_o) { return {Kind::predictive, z_o}; }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Counter-based uniform: fully determined by (seed, draw index, stream), so
// the draw range can be split across workers without changing the result.
inline double counter_u01(std::uint64_t seed, std::uint64_t idx,
                          std::uint64_t stream) {
  const std::uint64_t h =
      splitmix64(seed ^ splitmix64(idx + 0x632BE59BD9B4E019ULL * (stream + 1)));
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

inline double counter_normal(std::uint64_t seed, std::uint64_t idx,
                             std::uint64_t stream) {
  return num::gaussian_quantile(counter_u01(seed, idx, stream));
}

// Success criterion evaluated directly from the z-values; cheap enough for
// millions of draws.
inline bool success_at_level(Method method, double z_o, double z_r, double c,
                             Level gamma, double z_g) {
  const double lg = std::log(gamma.gamma);
  switch (method) {
    case Method::two_trials:
      return normal::log_min_bf(z_o) < lg && normal::log_min_bf(z_r) < lg &&
             z_o * z_r > 0.0;
    case Method::replication_bf: {
      const double shifted = z_r - z_o * std::sqrt(c);
      const double log_bf = 0.5 * std::log1p(c) -
                            0.5 * (z_r * z_r - shifted * shifted / (1.0 + c));
      return log_bf < lg;
    }
    case Method::sceptical_p: {
      if (z_o == 0.0 || z_r == 0.0) return false;
      const auto p = normal::ReplicationPair{z_o, z_r, c,
                                             z_r / (z_o * std::sqrt(c))};
      return normal::sceptical_p(p) < num::gaussian_cdf(-z_g);
    }
    case Method::sceptical_bf: {
      const auto gg = normal::sufficiently_sceptical_g(z_o, gamma);
      if (!gg) return false;
      const auto p = normal::ReplicationPair{z_o, z_r, c,
                                             z_r / (z_o * std::sqrt(c))};
      return normal::log_bf_sa(p, gg->g) <= lg;
    }
  }
  return false;
}

}  // namespace detail

/// Empirical success frequency with binomial standard error. Deterministic
/// for a fixed seed; draws are addressed by index so the result does not
/// depend on how the index range would be split across workers.
inline RateResult monte_carlo_rate(Method method, Level gamma, double c,
                                   const McTruth& truth, std::int64_t n_sims,
                                   std::uint64_t seed) {
  if (n_sims < 1) throw std::domain_error("monte_carlo_rate: n_sims must be >= 1");
  const double z_g = normal::invert_min_bf(gamma.gamma);
  const double sq_c = std::sqrt(c);
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < n_sims; ++i) {
    double z_o, z_r;
    switch (truth.kind) {
      case McTruth::Kind::null:
        z_o = detail::counter_normal(seed, i, 0);
        z_r = detail::counter_normal(seed, i, 1);
        break;
      case McTruth::Kind::fixed_effect:
        z_o = truth.z_o;
        z_r = truth.z_o * sq_c + detail::counter_normal(seed, i, 1);
        break;
      case McTruth::Kind::predictive:
        z_o = truth.z_o;
        z_r = truth.z_o * sq_c +
              std::sqrt(1.0 + c) * detail::counter_normal(seed, i, 1);
        break;
      default:
        throw std::logic_error("monte_carlo_rate: bad truth");
    }
    if (detail::success_at_level(method, z_o, z_r, c, gamma, z_g)) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n_sims);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n_sims));
  return RateResult{p, method, gamma.gamma, se};
}

// ---------------------------------------------------------------------------
// Information consistency
// ---------------------------------------------------------------------------

enum class TrendClassification { diverges_to_zero, bounded_away };

/// Evaluates the sceptical Bayes factor along an ascending z_o grid with
/// z_r = d z_o and c = 1 (both sample sizes growing together) and classifies
/// the tail behaviour.
inline TrendClassification information_consistency_check(
    double d, const std::vector<double>& zo_grid) {
  if (zo_grid.size() < 4)
    throw std::invalid_argument("information_consistency_check: grid too small");
  std::vector<double> logs;
  std::vector<bool> exist;
  for (double z_o : zo_grid) {
    const auto p = normal::pair_from_d(z_o, d, 1.0);
    const auto bf = normal::sceptical_bf(p);
    exist.push_back(bf.exists);
    logs.push_back(bf.exists ? bf.log_bf : std::numeric_limits<double>::quiet_NaN());
  }
  const std::size_t n = zo_grid.size();
  const std::size_t tail_start = n - std::max<std::size_t>(3, n / 4);
  bool decreasing = true;
  for (std::size_t i = tail_start; i < n; ++i) {
    if (!exist[i]) return TrendClassification::bounded_away;
    if (i > tail_start && !(logs[i] < logs[i - 1] + 1e-12)) decreasing = false;
  }
  const bool vanishes = logs.back() < std::log(1e-6);
  return (decreasing && vanishes) ? TrendClassification::diverges_to_zero
                                  : TrendClassification::bounded_away;
}

}  // namespace repbayes::freq

#endif  // REPBAYES_FREQUENTIST_HPP
