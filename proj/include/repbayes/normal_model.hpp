#ifndef REPBAYES_NORMAL_MODEL_HPP
#define REPBAYES_NORMAL_MODEL_HPP

// Replication-success measures under the normal approximation: Bayes factors
// contrasting sceptical, advocacy and point-null priors, the sceptical Bayes
// factor, the replication Bayes factor, the two-trials rule and the sceptical
// p-value.
//
// Conventions. z_o and z_r are the study z-values, c = sigma_o^2/sigma_r^2 is
// the variance ratio, d = theta_r_hat/theta_o_hat the relative effect
// estimate, and g the sceptical prior variance relative to the variance of
// the original estimate. When effect-estimate variances scale as a common
// unit variance over the sample size, c is approximately the replication-to-
// original sample-size ratio; only the ratio is ever stored. Bayes factors
// are oriented so that smaller values mean more evidence against the
// first-named hypothesis.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "repbayes/numerics.hpp"

namespace repbayes::normal {

inline constexpr double golden_ratio = 1.61803398874989484820;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// One study's effect estimate and standard error.
struct StudySummary {
  double estimate;
  double std_error;
  StudySummary(double est, double se) : estimate(est), std_error(se) {
    if (!(se > 0.0) || !std::isfinite(est) || !std::isfinite(se))
      throw std::invalid_argument("StudySummary: need finite estimate and std_error > 0");
  }
  double z() const { return estimate / std_error; }
};

/// Derived quantities linking an original and a replication study.
struct ReplicationPair {
  double z_o;
  double z_r;
  double c;  // sigma_o^2 / sigma_r^2
  double d;  // theta_r / theta_o = z_r / (z_o sqrt(c))
};

/// z_o = theta_o/sigma_o, z_r = theta_r/sigma_r, c = sigma_o^2/sigma_r^2,
/// d = z_r/(z_o sqrt(c)). The original estimate must be nonzero for d.
inline ReplicationPair derive_pair(const StudySummary& original,
                                   const StudySummary& replication) {
  if (original.estimate == 0.0)
    throw std::domain_error("derive_pair: original estimate is zero, d undefined");
  const double c =
      (original.std_error * original.std_error) /
      (replication.std_error * replication.std_error);
  return ReplicationPair{original.z(), replication.z(), c,
                         replication.estimate / original.estimate};
}

inline ReplicationPair pair_from_z(double z_o, double z_r, double c) {
  if (!(c > 0.0)) throw std::domain_error("pair_from_z: c must be > 0");
  if (z_o == 0.0) throw std::domain_error("pair_from_z: z_o is zero, d undefined");
  return ReplicationPair{z_o, z_r, c, z_r / (z_o * std::sqrt(c))};
}

inline ReplicationPair pair_from_d(double z_o, double d, double c) {
  if (!(c > 0.0)) throw std::domain_error("pair_from_d: c must be > 0");
  return ReplicationPair{z_o, d * z_o * std::sqrt(c), c, d};
}

/// Level gamma in (0,1) at which replication success is assessed.
struct Level {
  double gamma;
  explicit Level(double g) : gamma(g) {
    if (!(g > 0.0 && g < 1.0)) throw std::invalid_argument("Level: gamma must be in (0,1)");
  }
};

/// Relative sceptical prior variance g >= 0.
struct ScepticalPrior {
  double g;
};

/// An oriented Bayes factor on the log scale. Nonexistence is a value, not
/// an error: the sceptical Bayes factor legitimately fails to exist when the
/// advocate cannot beat the sceptic at any level.
struct BayesFactorValue {
  double log_bf = std::numeric_limits<double>::quiet_NaN();
  bool exists = false;
  static BayesFactorValue nonexistent() { return {}; }
  static BayesFactorValue from_log(double lb) { return {lb, true}; }
  double value() const { return exists ? std::exp(log_bf) : std::numeric_limits<double>::quiet_NaN(); }
};

// ---------------------------------------------------------------------------
// Bayes factor kernels (log scale)
// ---------------------------------------------------------------------------

/// log BF_{0:S}(theta_o_hat; g) = log[ sqrt(1+g) exp(-g z_o^2 / (2(1+g))) ].
inline double log_bf_0s(double z_o, double g) {
  if (g < 0.0) throw std::domain_error("log_bf_0s: g must be >= 0");
  return 0.5 * std::log1p(g) - 0.5 * (g / (1.0 + g)) * z_o * z_o;
}

inline BayesFactorValue bf_0s(double z_o, double g) {
  return BayesFactorValue::from_log(log_bf_0s(z_o, g));
}

/// Relative prior variance at which BF_{0:S} attains its minimum.
inline double g_at_min_bf(double z) { return std::max(0.0, z * z - 1.0); }

/// log of the minimum Bayes factor |z| exp(-z^2/2) sqrt(e) (1 for |z| <= 1).
inline double log_min_bf(double z) {
  const double az = std::abs(z);
  if (az <= 1.0) return 0.0;
  return std::log(az) - 0.5 * z * z + 0.5;
}

inline BayesFactorValue min_bf(double z) {
  return BayesFactorValue::from_log(log_min_bf(z));
}

/// Inverse of the minimum Bayes factor on the compelling side: the z > 1 with
/// |z| exp(-z^2/2) sqrt(e) = gamma.
inline double invert_min_bf(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::domain_error("invert_min_bf: gamma must be in (0,1)");
  // z^2 e^{-z^2} e = gamma^2  =>  z^2 = -W_{-1}(-gamma^2/e)
  const double log_neg_arg = 2.0 * std::log(gamma) - 1.0;
  const double q = num::detail::lambert_w_neg_from_log(log_neg_arg, num::WBranch::minus_one);
  return std::sqrt(-q);
}

/// Sufficiently sceptical relative prior variance: the g <= g_minBF with
/// BF_{0:S}(z_o; g) = gamma. Does not exist when minBF(z_o) > gamma (an
/// already unconvincing original needs no challenge).
inline std::optional<ScepticalPrior> sufficiently_sceptical_g(double z_o, Level gamma) {
  const double zo2 = z_o * z_o;
  if (zo2 == 0.0) return std::nullopt;
  if (log_min_bf(z_o) > std::log(gamma.gamma)) return std::nullopt;
  // q = W_{-1}(-z_o^2 exp(-z_o^2) / gamma^2), g = -z_o^2/q - 1
  const double log_neg_arg = std::log(zo2) - zo2 - 2.0 * std::log(gamma.gamma);
  if (log_neg_arg > -1.0) return std::nullopt;  // argument below -1/e
  const double q = num::detail::lambert_w_neg_from_log(log_neg_arg, num::WBranch::minus_one);
  const double ratio = -zo2 / q;
  if (ratio < 1.0) return std::nullopt;
  return ScepticalPrior{ratio - 1.0};
}

/// log BF_{S:A}(theta_r_hat; g): replication estimate under the sceptical
/// prior N(0, g sigma_o^2) versus the advocacy prior N(theta_o_hat, sigma_o^2).
inline double log_bf_sa(const ReplicationPair& p, double g) {
  if (g < 0.0) throw std::domain_error("log_bf_sa: g must be >= 0");
  const double ic = 1.0 / p.c;
  const double zo2 = p.z_o * p.z_o;
  return 0.5 * (std::log(ic + 1.0) - std::log(ic + g)) -
         0.5 * zo2 * (p.d * p.d / (ic + g) - (p.d - 1.0) * (p.d - 1.0) / (ic + 1.0));
}

inline BayesFactorValue bf_sa(const ReplicationPair& p, double g) {
  return BayesFactorValue::from_log(log_bf_sa(p, g));
}

/// Correction factor (log scale) for truncating the advocacy prior to the
/// direction of the original estimate: log Phi(|z_o|) - log Phi(sign(z_o)
/// z_o (1 + dc)/sqrt(1+c)). Independent of g.
inline double log_truncation_correction(const ReplicationPair& p) {
  if (p.z_o == 0.0)
    throw std::domain_error("truncation correction: z_o = 0, direction undefined");
  const double s = (p.z_o > 0.0) ? 1.0 : -1.0;
  const double arg = s * p.z_o * (1.0 + p.d * p.c) / std::sqrt(1.0 + p.c);
  return num::gaussian_log_cdf(std::abs(p.z_o)) - num::gaussian_log_cdf(arg);
}

/// BF_{S:A'} with the advocacy prior truncated to sign(theta_o_hat).
inline double log_bf_sa_truncated(const ReplicationPair& p, double g) {
  return log_bf_sa(p, g) + log_truncation_correction(p);
}

inline BayesFactorValue bf_sa_truncated(const ReplicationPair& p, double g) {
  return BayesFactorValue::from_log(log_bf_sa_truncated(p, g));
}

/// log of the replication Bayes factor BF_R = BF_{0:A}(theta_r_hat):
/// sqrt(1+c) exp{-z_o^2/2 (d^2 c - (1-d)^2/(1/c+1))}.
inline double log_replication_bf(const ReplicationPair& p, bool truncate = false) {
  const double ic = 1.0 / p.c;
  const double zo2 = p.z_o * p.z_o;
  double lb = 0.5 * std::log1p(p.c) -
              0.5 * zo2 * (p.d * p.d * p.c -
                           (1.0 - p.d) * (1.0 - p.d) / (ic + 1.0));
  if (truncate) lb += log_truncation_correction(p);
  return lb;
}

inline BayesFactorValue replication_bf(const ReplicationPair& p, bool truncate = false) {
  return BayesFactorValue::from_log(log_replication_bf(p, truncate));
}

// ---------------------------------------------------------------------------
// Sceptical Bayes factor
// ---------------------------------------------------------------------------

enum class ScepticalBfCase { nonexistent, at_min_bf, intersection };

struct ScepticalBfResult {
  BayesFactorValue bf;
  ScepticalBfCase which_case = ScepticalBfCase::nonexistent;
  double g_star = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// Success-condition residual log BF_{S:A}(g) - log BF_{0:S}(g). Replication
// success at the level gamma = BF_{0:S}(g) holds iff this is <= 0.
inline double success_residual(const ReplicationPair& p, double g, bool truncate) {
  const double lsa = truncate ? log_bf_sa_truncated(p, g) : log_bf_sa(p, g);
  return lsa - log_bf_0s(p.z_o, g);
}

// Lowest intersection of the two Bayes factor curves by scanning a
// log-spaced grid for sign changes of the residual and refining each bracket.
// The curves may cross several times; the height of the crossing at the
// largest g is the smallest level, which is the one wanted.
inline std::optional<double> scan_intersection(const ReplicationPair& p,
                                               double g_mb, bool truncate) {
  constexpr int grid_points = 400;
  const double g_lo = g_mb * 1e-12;
  const double log_lo = std::log(g_lo), log_hi = std::log(g_mb);
  auto res = [&](double g) { return success_residual(p, g, truncate); };

  double best_root = std::numeric_limits<double>::quiet_NaN();
  double prev_g = g_lo, prev_r = res(g_lo);
  double min_r = prev_r, min_g = g_lo;
  for (int i = 1; i <= grid_points; ++i) {
    const double g = std::exp(log_lo + (log_hi - log_lo) * i / grid_points);
    const double r = res(g);
    if (r < min_r) { min_r = r; min_g = g; }
    if ((prev_r <= 0.0) != (r <= 0.0)) {
      best_root = num::find_root(res, prev_g, g, 1e-13 * std::max(1.0, g));
    }
    prev_g = g;
    prev_r = r;
  }
  if (std::isnan(best_root)) {
    // The residual at g -> 0 tends to log BF_R; a crossing may sit below the
    // grid floor.
    const double r0 = res(0.0);
    if ((r0 <= 0.0) != (res(g_lo) <= 0.0))
      best_root = num::find_root(res, 0.0, g_lo, 1e-15);
  }
  if (std::isnan(best_root)) {
    // Tangential touch counts as an intersection.
    if (min_r > 0.0 && min_r <= 1e-12) return min_g;
    return std::nullopt;
  }
  return best_root;
}

// Closed form for c = 1 (untruncated): both Lambert W branches of the
// intersection equation, validity-filtered; largest valid g wins.
inline std::optional<double> closed_form_intersection_c1(const ReplicationPair& p,
                                                         double g_mb) {
  const double zo2 = p.z_o * p.z_o;
  const double d2 = p.d * p.d;
  const double half_1pd2 = 0.5 * (1.0 + d2);
  const double log_neg_arg = std::log(zo2 * half_1pd2) - 0.5 * std::log(2.0) -
                             0.5 * zo2 * (1.0 + 0.5 * (1.0 - p.d) * (1.0 - p.d));
  if (log_neg_arg > -1.0) return std::nullopt;  // no real intersection
  double best = -1.0;
  for (auto branch : {num::WBranch::minus_one, num::WBranch::principal}) {
    // |d| <= 1 admits only the W_{-1} solution
    if (branch == num::WBranch::principal && std::abs(p.d) <= 1.0) continue;
    const double k = num::detail::lambert_w_neg_from_log(log_neg_arg, branch);
    if (branch == num::WBranch::principal && !(-k >= half_1pd2)) continue;
    const double ratio = -zo2 * half_1pd2 / k;
    if (ratio < 1.0) continue;
    const double g = ratio - 1.0;
    if (g > g_mb * (1.0 + 1e-9)) continue;
    best = std::max(best, std::min(g, g_mb));
  }
  if (best < 0.0) return std::nullopt;
  return best;
}

}  // namespace detail

/// The sceptical Bayes factor: the smallest level gamma at which the
/// replication data favour the advocate over the sceptic at least as strongly
/// as the sceptic's objection to the original study. Appendix-style case
/// analysis: nonexistent / equal to minBF_o / height of the lowest
/// intersection. With truncate set, the truncated advocacy prior is used in
/// the success condition.
inline ScepticalBfResult sceptical_bf_detail(const ReplicationPair& p,
                                             bool truncate = false) {
  const double g_mb = g_at_min_bf(p.z_o);
  const double log_minbf = log_min_bf(p.z_o);
  ScepticalBfResult out;

  if (g_mb == 0.0) {
    // |z_o| <= 1: the only admissible sceptic is the null itself; success is
    // possible only at level 1.
    if (detail::success_residual(p, 0.0, truncate) <= 0.0) {
      out.bf = BayesFactorValue::from_log(0.0);
      out.which_case = ScepticalBfCase::at_min_bf;
      out.g_star = 0.0;
    }
    return out;
  }

  // Lower-bound case: the S:A curve is still below the 0:S curve at g_minBF.
  if (detail::success_residual(p, g_mb, truncate) < 1e-12) {
    out.bf = BayesFactorValue::from_log(log_minbf);
    out.which_case = ScepticalBfCase::at_min_bf;
    out.g_star = g_mb;
    return out;
  }

  std::optional<double> g_star;
  if (!truncate && std::abs(p.c - 1.0) < 1e-9) {
    g_star = detail::closed_form_intersection_c1(p, g_mb);
    if (!g_star) g_star = detail::scan_intersection(p, g_mb, truncate);
  } else {
    g_star = detail::scan_intersection(p, g_mb, truncate);
  }
  if (!g_star) return out;  // nonexistent
  out.bf = BayesFactorValue::from_log(log_bf_0s(p.z_o, *g_star));
  out.which_case = ScepticalBfCase::intersection;
  out.g_star = *g_star;
  return out;
}

inline BayesFactorValue sceptical_bf(const ReplicationPair& p, bool truncate = false) {
  return sceptical_bf_detail(p, truncate).bf;
}

/// Success at a fixed level: BF_{S:A}(g_gamma) <= gamma with g_gamma the
/// sufficiently sceptical prior variance. Equivalent to sceptical_bf <= gamma.
inline bool sceptical_bf_success(const ReplicationPair& p, Level gamma,
                                 bool truncate = false) {
  const auto g = sufficiently_sceptical_g(p.z_o, gamma);
  if (!g) return false;
  const double lsa = truncate ? log_bf_sa_truncated(p, g->g) : log_bf_sa(p, g->g);
  return lsa <= std::log(gamma.gamma);
}

// ---------------------------------------------------------------------------
// Two-trials rule, sceptical p-value, Q statistic
// ---------------------------------------------------------------------------

/// Both minimum Bayes factors below gamma and agreeing estimate signs.
inline bool two_trials(const ReplicationPair& p, Level gamma) {
  const double lg = std::log(gamma.gamma);
  return log_min_bf(p.z_o) < lg && log_min_bf(p.z_r) < lg &&
         p.z_o * p.z_r > 0.0;
}

/// Sceptical p-value from the harmonic/arithmetic mean form; recalibrated
/// variant multiplies z_S by sqrt(golden ratio) so it can be read on the
/// ordinary p-value scale.
inline double sceptical_p(const ReplicationPair& p, bool recalibrate = true) {
  if (p.z_o == 0.0 || p.z_r == 0.0)
    throw std::domain_error("sceptical_p: needs z_o != 0 and z_r != 0");
  const double zo2 = p.z_o * p.z_o, zr2 = p.z_r * p.z_r;
  const double zh2 = 2.0 / (1.0 / zo2 + 1.0 / zr2);
  double zs2;
  if (std::abs(p.c - 1.0) < 1e-9) {
    zs2 = 0.5 * zh2;
  } else {
    const double za2 = 0.5 * (zo2 + zr2);
    zs2 = (std::sqrt(za2 * (za2 + (p.c - 1.0) * zh2)) - za2) / (p.c - 1.0);
  }
  double zs = std::sqrt(zs2);
  if (recalibrate) zs *= std::sqrt(golden_ratio);
  const bool same_sign = p.z_o * p.z_r > 0.0;
  return same_sign ? num::gaussian_cdf(-zs) : num::gaussian_cdf(zs);
}

/// Q = (theta_o_hat - theta_r_hat)^2/(sigma_o^2 + sigma_r^2), an
/// incompatibility measure of the two estimates.
inline double q_statistic(const ReplicationPair& p) {
  const double dm1 = p.d - 1.0;
  return p.z_o * p.z_o * dm1 * dm1 / (1.0 / p.c + 1.0);
}

}  // namespace repbayes::normal

#endif  // REPBAYES_NORMAL_MODEL_HPP
