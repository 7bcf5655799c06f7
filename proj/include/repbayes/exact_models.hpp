#ifndef REPBAYES_EXACT_MODELS_HPP
#define REPBAYES_EXACT_MODELS_HPP

// Exact-likelihood replacements for the normal-approximation Bayes factors:
// standardised mean differences via the noncentral t likelihood and log odds
// ratios via two binomial samples with a Jeffreys nuisance prior. The
// integrals have no closed forms, so everything runs through the adaptive
// quadrature in log space.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <variant>

#include "repbayes/normal_model.hpp"
#include "repbayes/numerics.hpp"

namespace repbayes::exact {

using normal::BayesFactorValue;

// ---------------------------------------------------------------------------
// Data types
// ---------------------------------------------------------------------------

/// t statistic with its design: two-sample (nu = n1+n2-2, n* = n1 n2/(n1+n2))
/// or paired (nu = n-1, n* = n).
struct SmdData {
  double t_stat;
  int n1;
  int n2;      // ignored for paired designs
  bool paired;

  static SmdData two_sample(double t, int n1, int n2) {
    if (n1 < 2 || n2 < 2)
      throw std::invalid_argument("SmdData: two-sample groups need n >= 2");
    return SmdData{t, n1, n2, false};
  }
  static SmdData paired_design(double t, int n) {
    if (n < 2) throw std::invalid_argument("SmdData: paired design needs n >= 2");
    return SmdData{t, n, 0, true};
  }
  double nu() const { return paired ? n1 - 1.0 : n1 + n2 - 2.0; }
  double n_star() const {
    return paired ? static_cast<double>(n1)
                  : static_cast<double>(n1) * n2 / (static_cast<double>(n1) + n2);
  }
};

/// Two independent binomial samples.
struct BinomialData {
  int x1;
  int n1;
  int x2;
  int n2;
  BinomialData(int x1_, int n1_, int x2_, int n2_)
      : x1(x1_), n1(n1_), x2(x2_), n2(n2_) {
    if (n1 < 1 || n2 < 1 || x1 < 0 || x2 < 0 || x1 > n1 || x2 > n2)
      throw std::invalid_argument("BinomialData: need 0 <= x_k <= n_k, n_k >= 1");
  }
};

using ExactData = std::variant<SmdData, BinomialData>;

/// Sceptical prior variance on the theta scale.
struct PriorVariance {
  double tau2;
  explicit PriorVariance(double t2) : tau2(t2) {
    if (!(t2 >= 0.0)) throw std::invalid_argument("PriorVariance: tau2 must be >= 0");
  }
};

namespace detail {

inline double log1pexp(double x) {
  if (x > 35.0) return x;
  if (x < -35.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

inline double log_sigmoid(double x) { return -log1pexp(-x); }

inline double lbeta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

inline double lchoose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Marginal likelihoods given theta
// ---------------------------------------------------------------------------

/// log likelihood of the SMD data: NCT_nu(t; theta sqrt(n*)).
inline double smd_marglik(const SmdData& d, double theta) {
  return num::noncentral_t_logpdf(d.t_stat, d.nu(), theta * std::sqrt(d.n_star()));
}

/// log marginal likelihood of the binomial data given the log odds ratio:
/// the success probability of sample 2 is integrated out against its
/// Jeffreys prior Be(1/2, 1/2). Substituting v = logit(pi_2) removes the
/// endpoint singularities.
inline double logor_marglik(const BinomialData& d, double theta) {
  const double consts = detail::lchoose(d.n1, d.x1) + detail::lchoose(d.n2, d.x2) -
                        std::log(num::pi);
  auto log_integrand = [&](double v) {
    return d.x1 * detail::log_sigmoid(theta + v) +
           (d.n1 - d.x1) * detail::log_sigmoid(-theta - v) +
           (d.x2 + 0.5) * detail::log_sigmoid(v) +
           (d.n2 - d.x2 + 0.5) * detail::log_sigmoid(-v) + consts;
  };
  return num::integrate_log(log_integrand, num::Interval{-num::inf, num::inf}, 1e-9);
}

inline double marglik(const ExactData& data, double theta) {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SmdData>)
          return smd_marglik(d, theta);
        else
          return logor_marglik(d, theta);
      },
      data);
}

// ---------------------------------------------------------------------------
// Normal approximation (integration ranges and large-sample comparisons)
// ---------------------------------------------------------------------------

struct NormalApprox {
  double estimate;
  double std_error;
};

inline NormalApprox normal_approx(const SmdData& d) {
  const double ns = d.n_star();
  return {d.t_stat / std::sqrt(ns), 1.0 / std::sqrt(ns)};
}

/// Woolf logOR approximation; 0.5 is added to every cell when any is empty.
inline NormalApprox normal_approx(const BinomialData& d) {
  double x1 = d.x1, y1 = d.n1 - d.x1, x2 = d.x2, y2 = d.n2 - d.x2;
  if (x1 == 0.0 || y1 == 0.0 || x2 == 0.0 || y2 == 0.0) {
    x1 += 0.5; y1 += 0.5; x2 += 0.5; y2 += 0.5;
  }
  const double est = std::log(x1 / y1) - std::log(x2 / y2);
  const double se = std::sqrt(1.0 / x1 + 1.0 / y1 + 1.0 / x2 + 1.0 / y2);
  return {est, se};
}

inline NormalApprox normal_approx(const ExactData& data) {
  return std::visit([](const auto& d) { return normal_approx(d); }, data);
}

// ---------------------------------------------------------------------------
// Advocacy densities (posterior of theta given the original data and a
// reference prior)
// ---------------------------------------------------------------------------

/// SMD advocacy density at theta: the noncentral t mixture
/// f(theta | t_o) = int N(theta; t_o/sqrt(n* s2), 1/n*) IG(s2; (nu+1)/2, nu/2) ds2.
inline double smd_advocacy_logpdf(double theta, const SmdData& orig) {
  const double ns = orig.n_star();
  const double nu = orig.nu();
  const double a = 0.5 * (nu + 1.0);
  const double b = 0.5 * nu;
  const double log_ig_norm = a * std::log(b) - std::lgamma(a);
  const double log_n_norm = 0.5 * std::log(ns) - 0.5 * num::log_2pi;
  auto log_integrand = [&](double s2) {
    if (s2 <= 0.0) return -num::inf;
    const double mean = orig.t_stat / std::sqrt(ns * s2);
    const double resid = theta - mean;
    return -0.5 * ns * resid * resid + log_n_norm + log_ig_norm -
           (a + 1.0) * std::log(s2) - b / s2;
  };
  return num::integrate_log(log_integrand, num::Interval{0.0, num::inf}, 1e-9);
}

namespace detail {

/// Gauss hypergeometric 2F1(a,b;c;z) on the log scale for positive
/// parameters and z in [0,1). All series terms are positive. Euler's
/// transformation is applied when it reduces the term growth. Returns
/// nullopt when the series fails to converge in the iteration budget.
inline std::optional<double> log_hyp2f1(double a, double b, double c, double z) {
  if (z < 0.0 || z >= 1.0 || a <= 0.0 || b <= 0.0 || c <= 0.0) return std::nullopt;
  double pre = 0.0;
  if (a + b > c) {  // Euler: (1-z)^{c-a-b} 2F1(c-a, c-b; c; z)
    pre = (c - a - b) * std::log1p(-z);
    const double na = c - a, nb = c - b;
    if (na <= 0.0 || nb <= 0.0) return std::nullopt;
    a = na;
    b = nb;
  }
  if (z > 0.95) return std::nullopt;
  double term = 1.0, sum = 1.0, scale = 0.0;
  for (long k = 0; k < 200000; ++k) {
    term *= (a + k) * (b + k) * z / ((c + k) * (k + 1.0));
    sum += term;
    if (sum > 1e280) {
      sum *= 1e-280;
      term *= 1e-280;
      scale += std::log(1e280);
    }
    if (term < sum * 1e-16) return pre + scale + std::log(sum);
  }
  return std::nullopt;
}

/// logOR advocacy density through the hypergeometric closed form.
inline std::optional<double> logor_posterior_logpdf_hyp(double theta,
                                                        const BinomialData& orig) {
  const double e = orig.x1 + 0.5, f = orig.n1 - orig.x1 + 0.5;
  const double g = orig.x2 + 0.5, h = orig.n2 - orig.x2 + 0.5;
  const double log_c =
      lbeta(e + g, f + h) - lbeta(e, f) - lbeta(g, h);
  if (theta == 0.0) return log_c;
  std::optional<double> log_f;
  if (theta < 0.0)
    log_f = log_hyp2f1(e + f, e + g, e + f + g + h, -std::expm1(theta));
  else
    log_f = log_hyp2f1(e + f, f + h, e + f + g + h, -std::expm1(-theta));
  if (!log_f) return std::nullopt;
  const double lin = (theta < 0.0) ? e * theta : -f * theta;
  return log_c + lin + *log_f;
}

/// Same density by direct quadrature of the change-of-variables integral
/// over v = logit(pi_2): the integrand is the product of the two beta
/// posteriors with the Jacobians absorbed into the exponents.
inline double logor_posterior_logpdf_quad(double theta, const BinomialData& orig) {
  const double e = orig.x1 + 0.5, f = orig.n1 - orig.x1 + 0.5;
  const double g = orig.x2 + 0.5, h = orig.n2 - orig.x2 + 0.5;
  const double consts = -lbeta(e, f) - lbeta(g, h);
  auto log_integrand = [&](double v) {
    return e * log_sigmoid(theta + v) + f * log_sigmoid(-theta - v) +
           g * log_sigmoid(v) + h * log_sigmoid(-v) + consts;
  };
  return num::integrate_log(log_integrand, num::Interval{-num::inf, num::inf}, 1e-9);
}

}  // namespace detail

/// Exact posterior density of the log odds ratio given the original data and
/// Jeffreys priors on both success probabilities. The hypergeometric series
/// is used where it converges; quadrature otherwise.
inline double logor_posterior_logpdf(double theta, const BinomialData& orig) {
  const auto hyp = detail::logor_posterior_logpdf_hyp(theta, orig);
  if (hyp) return *hyp;
  return detail::logor_posterior_logpdf_quad(theta, orig);
}

inline double advocacy_logpdf(double theta, const ExactData& orig) {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SmdData>)
          return smd_advocacy_logpdf(theta, d);
        else
          return logor_posterior_logpdf(theta, d);
      },
      orig);
}

// ---------------------------------------------------------------------------
// Exact Bayes factors
// ---------------------------------------------------------------------------

namespace detail {

// Integration windows: mean +- 10 posterior standard deviations from the
// normal approximation, hulled over the densities involved.
struct Window {
  double lo, hi;
};

inline Window posterior_window(const NormalApprox& lik, double prior_mean,
                               double prior_var) {
  const double lv = lik.std_error * lik.std_error;
  const double v = (prior_var <= 0.0) ? lv : prior_var * lv / (prior_var + lv);
  const double m = (prior_var <= 0.0)
                       ? prior_mean
                       : (lik.estimate * prior_var + prior_mean * lv) /
                             (prior_var + lv);
  const double s = std::sqrt(v);
  return {m - 10.0 * s, m + 10.0 * s};
}

inline Window hull(const Window& a, const Window& b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

// log of int lik(theta) N(theta; 0, tau2) dtheta.
inline double log_prior_predictive(const ExactData& data, double tau2) {
  if (tau2 == 0.0) return marglik(data, 0.0);
  const auto approx = normal_approx(data);
  const Window w = posterior_window(approx, 0.0, tau2);
  const double log_norm = -0.5 * std::log(tau2) - 0.5 * num::log_2pi;
  auto log_integrand = [&](double th) {
    return marglik(data, th) - 0.5 * th * th / tau2 + log_norm;
  };
  return num::integrate_log(log_integrand, num::Interval{w.lo, w.hi}, 1e-9);
}

// log of int lik_rep(theta) advocacy(theta | orig) dtheta.
inline double log_advocacy_predictive(const ExactData& replication,
                                      const ExactData& original) {
  const auto ar = normal_approx(replication);
  const auto ao = normal_approx(original);
  const Window w =
      hull(posterior_window(ar, ao.estimate, ao.std_error * ao.std_error),
           Window{ao.estimate - 10.0 * ao.std_error, ao.estimate + 10.0 * ao.std_error});
  auto log_integrand = [&](double th) {
    return marglik(replication, th) + advocacy_logpdf(th, original);
  };
  return num::integrate_log(log_integrand, num::Interval{w.lo, w.hi}, 1e-9);
}

}  // namespace detail

/// Exact BF_{0:S}: marginal likelihood at theta = 0 against the N(0, tau2)
/// prior-averaged marginal likelihood. tau2 = 0 gives exactly 1.
inline BayesFactorValue exact_bf0s(const ExactData& original, PriorVariance tau2) {
  if (tau2.tau2 == 0.0) return BayesFactorValue::from_log(0.0);
  const double log_num = marglik(original, 0.0);
  const double log_den = detail::log_prior_predictive(original, tau2.tau2);
  return BayesFactorValue::from_log(log_num - log_den);
}

/// Exact BF_{S:A}: sceptical prior-averaged replication marginal likelihood
/// against the advocacy-averaged one.
inline BayesFactorValue exact_bfsa(const ExactData& replication,
                                   const ExactData& original, PriorVariance tau2) {
  const double log_num = detail::log_prior_predictive(replication, tau2.tau2);
  const double log_den = detail::log_advocacy_predictive(replication, original);
  return BayesFactorValue::from_log(log_num - log_den);
}

/// Exact replication Bayes factor BF_{0:A} for the replication data.
inline BayesFactorValue exact_replication_bf(const ExactData& original,
                                             const ExactData& replication) {
  const double log_num = marglik(replication, 0.0);
  const double log_den = detail::log_advocacy_predictive(replication, original);
  return BayesFactorValue::from_log(log_num - log_den);
}

enum class ExactBfCase { nonexistent, at_min_bf, intersection };

struct ExactScepticalBfResult {
  BayesFactorValue bf;
  ExactBfCase which_case = ExactBfCase::nonexistent;
  double tau2_star = std::numeric_limits<double>::quiet_NaN();
  double tau2_min_bf = std::numeric_limits<double>::quiet_NaN();
};

/// Exact sceptical Bayes factor by the reverse-Bayes level search: for a
/// candidate level gamma the sufficiently sceptical tau2 solves
/// exact_bf0s(tau2) = gamma on [0, tau2_minBF]; the smallest gamma whose
/// success condition exact_bfsa(tau2_gamma) <= gamma holds is the result.
/// Bisection on log gamma; the success condition is monotone in gamma in all
/// tested regimes.
inline ExactScepticalBfResult exact_sceptical_bf(const ExactData& original,
                                                 const ExactData& replication) {
  ExactScepticalBfResult out;
  const auto approx = normal_approx(original);
  const double scale2 = approx.std_error * approx.std_error;
  const double lo = std::min(1e-8, 1e-8 * scale2);
  const double hi = 1e3 * scale2;

  auto log_bf0s_at = [&](double tau2) {
    return exact_bf0s(original, PriorVariance{tau2}).log_bf;
  };
  const double log_tau2_mb = num::golden_minimize(
      [&](double u) { return log_bf0s_at(std::exp(u)); }, std::log(lo),
      std::log(hi), 1e-7);
  const double tau2_mb = std::exp(log_tau2_mb);
  const double log_min = log_bf0s_at(tau2_mb);
  out.tau2_min_bf = tau2_mb;

  auto log_bfsa_at = [&](double tau2) {
    return exact_bfsa(replication, original, PriorVariance{tau2}).log_bf;
  };

  if (log_min >= -1e-10) {
    // Original carries no evidence: only the degenerate sceptic remains.
    if (exact_replication_bf(original, replication).log_bf <= 0.0) {
      out.bf = BayesFactorValue::from_log(0.0);
      out.which_case = ExactBfCase::at_min_bf;
      out.tau2_star = 0.0;
    }
    return out;
  }

  // Lower-bound case.
  if (log_bfsa_at(tau2_mb) < log_min + 1e-10) {
    out.bf = BayesFactorValue::from_log(log_min);
    out.which_case = ExactBfCase::at_min_bf;
    out.tau2_star = tau2_mb;
    return out;
  }

  // Level at the weakest admissible sceptic; anchors the bisection bracket
  // so the root finder always straddles a sign change.
  const double top = log_bf0s_at(lo);
  auto tau2_for_level = [&](double log_gamma) {
    if (log_gamma >= top) return std::log(lo);
    return num::find_root(
        [&](double u) { return log_bf0s_at(std::exp(u)) - log_gamma; },
        std::log(lo), log_tau2_mb, 1e-9);
  };
  auto success = [&](double log_gamma) {
    const double tau2 = std::exp(tau2_for_level(log_gamma));
    return log_bfsa_at(tau2) <= log_gamma;
  };

  if (!success(top)) {
    // No success even with the weakest sceptic; the level can only be 1,
    // reached when the advocate beats the point null outright.
    if (exact_replication_bf(original, replication).log_bf <= 0.0) {
      out.bf = BayesFactorValue::from_log(0.0);
      out.which_case = ExactBfCase::intersection;
      out.tau2_star = 0.0;
    }
    return out;
  }

  double bad = log_min, good = top;  // success fails at the minimum here
  while (good - bad > 1e-4) {
    const double mid = 0.5 * (good + bad);
    (success(mid) ? good : bad) = mid;
  }
  out.bf = BayesFactorValue::from_log(good);
  out.which_case = ExactBfCase::intersection;
  out.tau2_star = std::exp(tau2_for_level(good));
  return out;
}

}  // namespace repbayes::exact

#endif  // REPBAYES_EXACT_MODELS_HPP
