#ifndef REPBAYES_NUMERICS_HPP
#define REPBAYES_NUMERICS_HPP

// Self-contained special functions, quadrature and root finding used by the
// rest of the library. Everything here is pure and reentrant.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace repbayes::num {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double inf = std::numeric_limits<double>::infinity();
inline constexpr double log_2pi = 1.8378770664093454836;  // log(2*pi)
inline constexpr double inv_sqrt2 = 0.70710678118654752440;
inline constexpr double neg_inv_e = -0.36787944117144232160;  // -1/e

// ---------------------------------------------------------------------------
// Error types
// ---------------------------------------------------------------------------

/// Thrown by integrate() when the error target cannot be met within the
/// interval budget. Carries the best estimate found so far.
struct quadrature_error : std::runtime_error {
  double estimate;
  double error_bound;
  quadrature_error(const std::string& msg, double est, double err)
      : std::runtime_error(msg), estimate(est), error_bound(err) {}
};

/// Thrown by find_root() when the bracket does not straddle a sign change.
struct bracket_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Lambert W
// ---------------------------------------------------------------------------

enum class WBranch { principal, minus_one };

namespace detail {

// Solves w + log(-w) = L, which is w*exp(w) = -exp(L) for w < 0. Works from
// the log of the (negative) argument so that arguments that underflow in
// double precision (L << -745) remain representable. Requires L <= -1.
inline double lambert_w_neg_from_log(double log_neg_arg, WBranch branch) {
  const double L = log_neg_arg;
  if (L > -1.0) {
    if (L > -1.0 + 1e-9)
      throw std::domain_error("lambert_w: argument below -1/e");
    return -1.0;  // branch point within rounding
  }
  double w;
  const bool near_branch_point = L > -1.7;
  // sqrt expansion around the branch point w = -1: p = sqrt(2(1 + e*y))
  const double p = near_branch_point ? std::sqrt(-2.0 * std::expm1(L + 1.0)) : 0.0;
  if (branch == WBranch::minus_one) {
    if (near_branch_point)
      w = -1.0 - p - p * p / 3.0 - 11.0 * p * p * p / 72.0;
    else
      w = L - std::log(-L);  // W_{-1}(y) ~ log(-y) - log(-log(-y))
  } else {
    // Principal branch with a negative argument lives in (-1, 0).
    if (near_branch_point)
      w = std::min(-1e-300, -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0);
    else
      w = -std::exp(L);  // w ~ y when y -> 0-
  }
  // Newton on h(w) = w + log(-w) - L; h'(w) = 1 + 1/w. Monotone on each
  // branch, quadratic convergence near the root.
  for (int it = 0; it < 100; ++it) {
    const double h = w + std::log(-w) - L;
    const double hp = 1.0 + 1.0 / w;
    if (h == 0.0 || hp == 0.0) break;
    double step = h / hp;
    double wn = w - step;
    if (branch == WBranch::minus_one) {
      if (wn > -1.0) wn = 0.5 * (w - 1.0);  // keep w <= -1
    } else {
      if (wn < -1.0) wn = 0.5 * (w - 1.0 + 1e-30);  // keep -1 <= w < 0
      if (wn >= 0.0) wn = 0.5 * w;
    }
    const double dw = std::abs(wn - w);
    w = wn;
    if (dw <= 1e-15 * std::abs(w) + 1e-300) break;
  }
  return w;
}

inline double lambert_w0_positive(double y) {
  // Initial guess per Corless et al.; Halley refinement.
  double w;
  if (y < 1.0) {
    w = y * (1.0 - y + 1.5 * y * y) / (1.0 + 0.5 * y);
  } else {
    const double l1 = std::log(y);
    const double l2 = std::log(l1 > 1.0 ? l1 : 1.0 + l1);
    w = l1 - (l1 > 1.0 ? l2 : 0.0);
  }
  for (int it = 0; it < 100; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - y;
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 1e-15 * (std::abs(w) + 1e-300)) break;
  }
  return w;
}

}  // namespace detail

/// Lambert W function: returns w with w*exp(w) = y.
/// principal: y >= -1/e, result >= -1. minus_one: y in [-1/e, 0), result <= -1.
inline double lambert_w(double y, WBranch branch) {
  if (branch == WBranch::minus_one) {
    if (y >= 0.0 || y < neg_inv_e * (1.0 + 1e-12))
      throw std::domain_error("lambert_w: minus_one branch needs y in [-1/e, 0)");
    return detail::lambert_w_neg_from_log(std::log(-y), branch);
  }
  if (y < neg_inv_e * (1.0 + 1e-12))
    throw std::domain_error("lambert_w: principal branch needs y >= -1/e");
  if (y == 0.0) return 0.0;
  if (y < 0.0) return detail::lambert_w_neg_from_log(std::log(-y), branch);
  return detail::lambert_w0_positive(y);
}

// ---------------------------------------------------------------------------
// Gaussian distribution
// ---------------------------------------------------------------------------

inline double gaussian_pdf(double x) {
  return std::exp(-0.5 * x * x - 0.5 * log_2pi);
}

inline double gaussian_log_pdf(double x) { return -0.5 * x * x - 0.5 * log_2pi; }

inline double gaussian_cdf(double x) {
  return 0.5 * std::erfc(-x * inv_sqrt2);
}

/// log Phi(x), stable far into the left tail (x ~ -1e3).
inline double gaussian_log_cdf(double x) {
  if (x > -26.0) {
    const double c = gaussian_cdf(x);
    if (c > 1e-300) return std::log(c);
  }
  // Asymptotic series for the Mills ratio: Phi(x) = phi(x)/(-x) * S,
  // S = 1 - 1/x^2 + 3/x^4 - 15/x^6 + ...
  const double x2 = x * x;
  double s = 1.0, term = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double mag = std::abs(term) * (2.0 * k - 1.0) / x2;
    if (mag >= std::abs(term)) break;  // divergence point of the series
    term = (term > 0.0) ? -mag : mag;
    s += term;
    if (mag < 1e-17 * s) break;
  }
  return gaussian_log_pdf(x) - std::log(-x) + std::log(s);
}

namespace detail {

// Wichura's AS 241 (PPND16): inverse standard normal to ~1e-16.
inline double ppnd16(double p) {
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -val : val;
}

}  // namespace detail

/// Inverse of gaussian_cdf on (0,1).
inline double gaussian_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("gaussian_quantile: p must be in (0,1)");
  double x = detail::ppnd16(p);
  // One Newton polish with the erfc-based CDF.
  const double e = gaussian_cdf(x) - p;
  const double d = gaussian_pdf(x);
  if (d > 0.0) x -= e / d;
  return x;
}

// ---------------------------------------------------------------------------
// Incomplete gamma (regularized lower), used by the noncentral chi-squared
// ---------------------------------------------------------------------------

namespace detail {

inline double gamma_p_series(double a, double x) {
  double ap = a, sum = 1.0 / a, del = sum;
  for (int n = 0; n < 1000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

}  // namespace detail

/// CDF of the noncentral chi-squared with one degree of freedom.
/// Poisson mixture of central chi-squared CDFs; reduces to the central
/// distribution at ncp = 0.
inline double noncentral_chisq_cdf(double x, double ncp) {
  if (x < 0.0) throw std::domain_error("noncentral_chisq_cdf: x must be >= 0");
  if (ncp < 0.0) throw std::domain_error("noncentral_chisq_cdf: ncp must be >= 0");
  if (x == 0.0) return 0.0;
  if (ncp == 0.0) return detail::gamma_p(0.5, 0.5 * x);
  if (ncp > 1e7) {
    // For one degree of freedom the distribution is that of (Z + sqrt(ncp))^2,
    // which is numerically preferable to the mixture at extreme ncp.
    const double sx = std::sqrt(x), sl = std::sqrt(ncp);
    return gaussian_cdf(sx - sl) - gaussian_cdf(-sx - sl);
  }
  const double half = 0.5 * ncp;
  const long k0 = static_cast<long>(half);
  const double log_half = std::log(half);
  double sum = 0.0;
  auto weight = [&](long k) {
    return std::exp(-half + k * log_half - std::lgamma(k + 1.0));
  };
  // Expand outward from the Poisson mode until weights are negligible.
  for (long k = k0; k >= 0; --k) {
    const double w = weight(k);
    sum += w * detail::gamma_p(k + 0.5, 0.5 * x);
    if (w < 1e-18 && k < k0) break;
  }
  for (long k = k0 + 1;; ++k) {
    const double w = weight(k);
    sum += w * detail::gamma_p(k + 0.5, 0.5 * x);
    if (w < 1e-18) break;
    if (k > k0 + 10000) break;
  }
  return std::min(1.0, sum);
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Integration domain; endpoints may be +-infinity.
struct Interval {
  double lo;
  double hi;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  int evaluations = 0;
};

namespace detail {

// 15-point Kronrod / 7-point Gauss pair (QUADPACK dqk15 nodes).
inline constexpr double gk_x[8] = {
    0.991455371120812639207, 0.949107912342758524526, 0.864864423359769072790,
    0.741531185599394439864, 0.586087235467691130294, 0.405845151377397166907,
    0.207784955007898467601, 0.0};
inline constexpr double gk_wk[8] = {
    0.022935322010529224964, 0.063092092629978553291, 0.104790010322250183840,
    0.140653259715525918745, 0.169004726639267902827, 0.190350578064785409913,
    0.204432940075298892414, 0.209482141084727828013};
inline constexpr double gk_wg[4] = {
    0.129484966168869693271, 0.279705391489276667901, 0.381830050505118944950,
    0.417959183673469387755};

template <class F>
inline void gk15(F&& f, double a, double b, double& result, double& err,
                 int& evals) {
  const double mid = 0.5 * (a + b);
  const double hl = 0.5 * (b - a);
  // Non-finite values at isolated points (integrable endpoint singularities
  // pushed to zero-width neighbourhoods by subdivision) count as zero.
  auto safe = [&](double x) {
    const double v = f(x);
    return std::isfinite(v) ? v : 0.0;
  };
  const double fc = safe(mid);
  double resk = gk_wk[7] * fc;
  double resg = gk_wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = hl * gk_x[i];
    const double fv = safe(mid - dx) + safe(mid + dx);
    resk += gk_wk[i] * fv;
    if (i % 2 == 1) resg += gk_wg[i / 2] * fv;
  }
  evals += 15;
  result = resk * hl;
  err = std::abs((resk - resg) * hl);
}

struct Segment {
  double a, b, val, err;
  bool operator<(const Segment& o) const { return err < o.err; }
};

template <class F>
inline QuadratureResult adaptive_gk(F&& f, double a, double b, double rel_tol,
                                    double abs_tol, int max_segments) {
  QuadratureResult out;
  std::priority_queue<Segment> heap;
  Segment s{a, b, 0.0, 0.0};
  gk15(f, a, b, s.val, s.err, out.evaluations);
  double total = s.val, toterr = s.err;
  heap.push(s);
  int n = 1;
  while (toterr > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (n >= max_segments)
      throw quadrature_error("integrate: interval budget exhausted", total,
                             toterr);
    const Segment worst = heap.top();
    heap.pop();
    const double m = 0.5 * (worst.a + worst.b);
    if (!(m > worst.a && m < worst.b))
      throw quadrature_error("integrate: interval too small to bisect", total,
                             toterr);
    Segment left{worst.a, m, 0.0, 0.0}, right{m, worst.b, 0.0, 0.0};
    gk15(f, left.a, left.b, left.val, left.err, out.evaluations);
    gk15(f, right.a, right.b, right.val, right.err, out.evaluations);
    total += left.val + right.val - worst.val;
    toterr += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
    ++n;
  }
  out.value = total;
  out.abs_error_estimate = toterr;
  return out;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over the given interval.
/// Infinite endpoints are handled by rational variable transformations; the
/// quadrature nodes never touch the endpoints, so integrable endpoint
/// behaviour is fine. Throws quadrature_error on non-convergence.
template <class F>
inline QuadratureResult integrate(F&& f, Interval dom, double rel_tol = 1e-8,
                                  double abs_tol = 1e-12,
                                  int max_segments = 4000) {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw std::domain_error("integrate: tolerances must be positive");
  if (!(dom.lo <= dom.hi)) throw std::domain_error("integrate: lo > hi");
  const bool lo_inf = std::isinf(dom.lo), hi_inf = std::isinf(dom.hi);
  if (lo_inf && hi_inf) {
    auto g = [&](double t) {
      const double u = 1.0 - t * t;
      const double x = t / u;
      return f(x) * (1.0 + t * t) / (u * u);
    };
    return detail::adaptive_gk(g, -1.0, 1.0, rel_tol, abs_tol, max_segments);
  }
  if (hi_inf) {
    const double a = dom.lo;
    auto g = [&](double t) {
      const double u = 1.0 - t;
      return f(a + t / u) / (u * u);
    };
    return detail::adaptive_gk(g, 0.0, 1.0, rel_tol, abs_tol, max_segments);
  }
  if (lo_inf) {
    const double b = dom.hi;
    auto g = [&](double t) {
      const double u = 1.0 - t;
      return f(b - t / u) / (u * u);
    };
    return detail::adaptive_gk(g, 0.0, 1.0, rel_tol, abs_tol, max_segments);
  }
  if (dom.lo == dom.hi) return QuadratureResult{0.0, 0.0, 0};
  return detail::adaptive_gk(f, dom.lo, dom.hi, rel_tol, abs_tol, max_segments);
}

/// Golden-section minimizer on [lo, hi]; returns the argmin.
template <class F>
inline double golden_minimize(F&& f, double lo, double hi, double tol = 1e-8,
                              int max_iter = 400) {
  const double gr = 0.61803398874989484820;
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b));
       ++it) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - gr * (b - a); f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + gr * (b - a); f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

/// log of the integral of exp(log_f) over dom. A coarse probe followed by a
/// golden-section refinement locates the peak of the log-integrand, which is
/// subtracted before exponentiating so narrow peaks neither overflow nor
/// vanish to zero. Assumes the log-integrand is unimodal at probe resolution.
template <class F>
inline double integrate_log(F&& log_f, Interval dom, double rel_tol = 1e-8,
                            int probe_points = 64) {
  const bool lo_inf = std::isinf(dom.lo), hi_inf = std::isinf(dom.hi);
  // Probe in the same transformed coordinates used by integrate().
  auto x_of_t = [&](double t) {
    if (lo_inf && hi_inf) {
      const double s = 2.0 * t - 1.0;
      return s / (1.0 - s * s);
    }
    if (hi_inf) return dom.lo + t / (1.0 - t);
    if (lo_inf) return dom.hi - t / (1.0 - t);
    return dom.lo + t * (dom.hi - dom.lo);
  };
  double shift = -inf;
  int best = 1;
  for (int i = 1; i < probe_points; ++i) {
    const double v = log_f(x_of_t(static_cast<double>(i) / probe_points));
    if (std::isfinite(v) && v > shift) {
      shift = v;
      best = i;
    }
  }
  if (!std::isfinite(shift)) return -inf;
  const double t_lo = static_cast<double>(best - 1) / probe_points;
  const double t_hi = static_cast<double>(best + 1) / probe_points;
  const double t_star = golden_minimize(
      [&](double t) {
        const double v = log_f(x_of_t(t));
        return std::isfinite(v) ? -v : inf;
      },
      t_lo, t_hi, 1e-12);
  const double refined = log_f(x_of_t(t_star));
  double x_peak = x_of_t(t_star);
  if (std::isfinite(refined) && refined > shift) {
    shift = refined;
  } else {
    x_peak = x_of_t(static_cast<double>(best) / probe_points);
  }
  const double s = shift;
  auto f = [&](double x) {
    const double v = log_f(x);
    return std::isfinite(v) ? std::exp(v - s) : 0.0;
  };
  // Peak half-widths (where the log-integrand drops ~2 below the peak),
  // found by doubling in x space from far below any resolvable width. The
  // quadrature is seeded with windows a few widths around the peak so that a
  // spike much narrower than the probe grid cannot slip between the initial
  // quadrature nodes.
  auto halfwidth = [&](double dir) {
    double w = 1e-13 * (1.0 + std::abs(x_peak));
    for (int k = 0; k < 120; ++k) {
      const double x = x_peak + dir * w;
      if (x <= dom.lo || x >= dom.hi) break;
      const double v = log_f(x);
      if (!std::isfinite(v) || v < s - 2.0) break;
      w *= 2.0;
    }
    return w;
  };
  const double cut_lo = std::max(dom.lo, x_peak - 8.0 * halfwidth(-1.0));
  const double cut_hi = std::min(dom.hi, x_peak + 8.0 * halfwidth(1.0));
  double value = 0.0;
  if (cut_lo < x_peak)
    value += integrate(f, Interval{cut_lo, x_peak}, rel_tol, 1e-300).value;
  if (x_peak < cut_hi)
    value += integrate(f, Interval{x_peak, cut_hi}, rel_tol, 1e-300).value;
  const double tail_abs = std::max(1e-300, 0.1 * rel_tol * value);
  if (dom.lo < cut_lo)
    value += integrate(f, Interval{dom.lo, cut_lo}, rel_tol, tail_abs).value;
  if (dom.hi > cut_hi)
    value += integrate(f, Interval{cut_hi, dom.hi}, rel_tol, tail_abs).value;
  return s + std::log(value);
}

// ---------------------------------------------------------------------------
// Noncentral t log density
// ---------------------------------------------------------------------------

namespace detail {

// Direct quadrature over the normal/inverse-gamma scale mixture. Used when
// the series representation cancels badly (t and ncp of opposite sign and
// large); all mixture terms are positive so this route is always stable.
inline double nct_logpdf_mixture(double t, double df, double ncp) {
  const double a = 0.5 * df;  // IG shape and rate are both df/2
  const double lognorm = a * std::log(a) - std::lgamma(a);
  auto log_integrand = [&](double y) {
    if (y <= 0.0) return -inf;
    const double resid = t - ncp * std::sqrt(y);
    return -0.5 * resid * resid / y - 0.5 * std::log(y) - 0.5 * log_2pi +
           lognorm - (a + 1.0) * std::log(y) - a / y;
  };
  return integrate_log(log_integrand, Interval{0.0, inf}, 1e-10, 128);
}

}  // namespace detail

/// log density of the noncentral t distribution with df degrees of freedom
/// and noncentrality ncp, evaluated at t.
inline double noncentral_t_logpdf(double t, double df, double ncp) {
  if (!(df > 0.0)) throw std::domain_error("noncentral_t_logpdf: df must be > 0");
  const double nu = df;
  const double x = t * ncp * std::sqrt(2.0 / (nu + t * t));
  if (x < -8.0) return detail::nct_logpdf_mixture(t, nu, ncp);
  // Series in even/odd halves; within each half all terms are positive.
  //   f(t) = C * Gamma((nu+1)/2) * (Se + So),
  //   Se = sum Gamma((nu+1)/2+m)/Gamma((nu+1)/2) x^{2m} / (2m)!,
  //   So = sum Gamma(nu/2+1+m)/Gamma((nu+1)/2) x^{2m+1} / (2m+1)!.
  const double x2 = x * x;
  double se_term = 1.0, se = 1.0;
  double so_term = std::abs(x) * std::exp(std::lgamma(0.5 * nu + 1.0) -
                                          std::lgamma(0.5 * (nu + 1.0)));
  double so = so_term;
  double scale = 0.0;  // both sums share one exponent offset
  for (int m = 0; m < 100000; ++m) {
    se_term *= (0.5 * (nu + 1.0) + m) * x2 / ((2.0 * m + 1.0) * (2.0 * m + 2.0));
    so_term *= (0.5 * nu + 1.0 + m) * x2 / ((2.0 * m + 2.0) * (2.0 * m + 3.0));
    se += se_term;
    so += so_term;
    if (se > 1e280 || so > 1e280) {
      se *= 1e-280; se_term *= 1e-280;
      so *= 1e-280; so_term *= 1e-280;
      scale += std::log(1e280);
    }
    if (se_term < se * 1e-17 && so_term < so * 1e-17) break;
  }
  const double total = (x >= 0.0) ? se + so : se - so;
  if (!(total > (se + so) * 1e-12))
    return detail::nct_logpdf_mixture(t, nu, ncp);  // cancellation
  const double log_c = -0.5 * ncp * ncp +
                       0.5 * (nu + 1.0) * (std::log(2.0 * nu) - std::log(nu + t * t)) -
                       0.5 * std::log(2.0 * pi * nu) - 0.5 * nu * std::log(2.0) -
                       std::lgamma(0.5 * nu) + std::lgamma(0.5 * (nu + 1.0));
  return log_c + scale + std::log(total);
}

// ---------------------------------------------------------------------------
// Root finding and 1-d minimization
// ---------------------------------------------------------------------------

/// Brent's method on [lo, hi]; requires a sign change (throws bracket_error
/// otherwise). Converges to |interval| <= tol, deterministic.
template <class F>
inline double find_root(F&& f, double lo, double hi, double tol = 1e-10,
                        int max_iter = 200) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw bracket_error("find_root: no sign change over the bracket");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a; fc = fa; d = b - a; e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                        0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc; r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d; d = p / q;
      } else {
        d = xm; e = d;
      }
    } else {
      d = xm; e = d;
    }
    a = b; fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  return b;
}


}  // namespace repbayes::num

#endif  // REPBAYES_NUMERICS_HPP
