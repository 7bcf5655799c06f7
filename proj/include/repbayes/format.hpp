#ifndef REPBAYES_FORMAT_HPP
#define REPBAYES_FORMAT_HPP

// Display conventions for results tables: Bayes factors as 1/x with one
// decimal below ten and integers above, saturation sentinels beyond 1000,
// p-values to two significant digits with a < 0.0001 sentinel.

#include <cmath>
#include <cstdio>
#include <string>

#include "repbayes/normal_model.hpp"

namespace repbayes::fmt {

namespace detail {

inline std::string trim_zeros(std::string s) {
  if (s.find('.') == std::string::npos) return s;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

// One decimal below 10, nearest integer from 10 up.
inline std::string bf_magnitude(double x) {
  char buf[64];
  if (x < 10.0) {
    const double r = std::round(x * 10.0) / 10.0;
    if (r < 10.0) {
      std::snprintf(buf, sizeof buf, "%.1f", r);
      return trim_zeros(buf);
    }
  }
  std::snprintf(buf, sizeof buf, "%.0f", x);
  return buf;
}

}  // namespace detail

/// Two significant digits of p with fixed-point display and the conventional
/// saturation sentinel.
inline std::string format_p(double p) {
  if (std::isnan(p)) return "";
  if (p <= 0.0) return "< 0.0001";
  // two significant digits, but the decimal resolution saturates: three
  // decimals from 0.001 up, four below, sentinel under half of 1e-4
  if (std::round(p * 1e4) / 1e4 < 0.0001) return "< 0.0001";
  const int dec_2sf = 1 - static_cast<int>(std::floor(std::log10(p)));
  const int cap = (p >= 0.001) ? 3 : 4;
  const int dec = std::min(dec_2sf, cap);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", dec, p);
  return detail::trim_zeros(buf);
}

/// Oriented Bayes factor display: "1/x" when below one, plain value when
/// at least one, "" for nonexistent, saturated outside [1/1000, 1000].
inline std::string format_bf(const normal::BayesFactorValue& bf) {
  if (!bf.exists) return "";
  if (bf.log_bf >= 0.0) {
    const double v = std::exp(bf.log_bf);
    if (!(v < 1000.0) || std::round(v) >= 1000.0) return "> 1000";
    return detail::bf_magnitude(v);
  }
  const double x = std::exp(-bf.log_bf);
  if (!(x < 1000.0) || std::round(x) >= 1000.0) return "< 1/1000";
  const std::string m = detail::bf_magnitude(x);
  if (m == "1") return "1";
  return "1/" + m;
}

inline std::string format_fixed(double v, int decimals) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

/// Full-precision round-trippable number for emitted curve data.
inline std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace repbayes::fmt

#endif  // REPBAYES_FORMAT_HPP
