#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "repbayes/numerics.hpp"

using namespace repbayes;
using Catch::Approx;

namespace {

// Independent fixed-step Simpson integrator, used as an oracle against the
// adaptive Gauss-Kronrod implementation.
template <class F>
double simpson(F&& f, double a, double b, int n) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
  return s * h / 3.0;
}

double central_t_logpdf(double t, double nu) {
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
         0.5 * std::log(nu * num::pi) -
         0.5 * (nu + 1.0) * std::log1p(t * t / nu);
}

}  // namespace

TEST_CASE("lambert_w basics") {
  CHECK(num::lambert_w(0.0, num::WBranch::principal) == 0.0);
  CHECK(num::lambert_w(num::neg_inv_e, num::WBranch::minus_one) ==
        Approx(-1.0).margin(2e-7));
  const double w = num::lambert_w(-0.1, num::WBranch::minus_one);
  CHECK(std::abs(w * std::exp(w) + 0.1) <= 1e-12);
  CHECK(w <= -1.0);
  CHECK_THROWS_AS(num::lambert_w(-0.5, num::WBranch::principal), std::domain_error);
  CHECK_THROWS_AS(num::lambert_w(0.1, num::WBranch::minus_one), std::domain_error);
  const double wp = num::lambert_w(-0.2, num::WBranch::principal);
  CHECK(wp >= -1.0);
  CHECK(std::abs(wp * std::exp(wp) + 0.2) <= 1e-12);
}

TEST_CASE("lambert_w round trip and branch separation") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    // y spread over (-1/e, 0): log scale towards zero plus a uniform sample
    const double y = -std::exp(-1.0001 - 40.0 * u(rng));
    const double y2 = num::neg_inv_e * u(rng);
    for (double yy : {y, y2}) {
      if (!(yy > num::neg_inv_e && yy < 0.0)) continue;
      const double wm = num::lambert_w(yy, num::WBranch::minus_one);
      const double wp = num::lambert_w(yy, num::WBranch::principal);
      CHECK(wm <= -1.0);
      CHECK(wp >= -1.0);
      CHECK(std::abs(wm * std::exp(wm) - yy) <= 1e-12 * std::max(1.0, std::abs(yy)));
      CHECK(std::abs(wp * std::exp(wp) - yy) <= 1e-12 * std::max(1.0, std::abs(yy)));
    }
    const double yp = std::exp(u(rng) * 12.0 - 4.0);  // positive arguments
    const double w0 = num::lambert_w(yp, num::WBranch::principal);
    CHECK(std::abs(w0 * std::exp(w0) - yp) <= 1e-12 * std::max(1.0, yp));
  }
}

TEST_CASE("gaussian cdf") {
  CHECK(num::gaussian_cdf(0.0) == 0.5);
  CHECK(num::gaussian_cdf(1.96) == Approx(0.975).margin(5e-5));
  CHECK(num::gaussian_cdf(1.96) == Approx(0.9750021048517795).epsilon(1e-14));
  for (double x : {0.1, 0.7, 1.3, 2.9, 4.5, 7.0}) {
    CHECK(num::gaussian_cdf(-x) == Approx(1.0 - num::gaussian_cdf(x)).margin(1e-14));
  }
}

TEST_CASE("gaussian log cdf far tail") {
  // against log(Phi) computed directly where erfc still has precision
  for (double x : {-5.0, -10.0, -20.0, -25.9}) {
    CHECK(num::gaussian_log_cdf(x) ==
          Approx(std::log(num::gaussian_cdf(x))).epsilon(1e-12));
  }
  // deep tail: leading asymptotics log phi(x) - log(-x) bounds it
  const double lx = num::gaussian_log_cdf(-40.0);
  CHECK(lx < num::gaussian_log_pdf(-40.0) - std::log(40.0) + 1e-10);
  CHECK(lx > num::gaussian_log_pdf(-40.0) - std::log(40.0) - 1e-3);
}

TEST_CASE("gaussian quantile") {
  CHECK(num::gaussian_quantile(0.5) == Approx(0.0).margin(1e-14));
  CHECK(num::gaussian_quantile(0.975) == Approx(1.959963984540054).epsilon(1e-12));
  CHECK_THROWS_AS(num::gaussian_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(num::gaussian_quantile(1.0), std::domain_error);
  for (double p = 1e-8; p < 1.0 - 1e-8; p += 0.0099) {
    const double x = num::gaussian_quantile(p);
    CHECK(num::gaussian_cdf(x) == Approx(p).margin(1e-10));
  }
  for (double p : {1e-8, 1e-6, 1.0 - 1e-6, 1.0 - 1e-8}) {
    CHECK(num::gaussian_cdf(num::gaussian_quantile(p)) == Approx(p).epsilon(1e-10));
  }
}

TEST_CASE("noncentral chi-squared df=1") {
  CHECK(num::noncentral_chisq_cdf(0.0, 3.0) == 0.0);
  // central case identity P(Z^2 <= x) = 2 Phi(sqrt(x)) - 1
  for (double x : {0.01, 0.5, 1.0, 3.84, 10.0}) {
    CHECK(num::noncentral_chisq_cdf(x, 0.0) ==
          Approx(2.0 * num::gaussian_cdf(std::sqrt(x)) - 1.0).margin(1e-13));
  }
  // df=1 closed-form oracle: P((Z + sqrt(l))^2 <= x)
  for (double lam = 0.0; lam <= 100.0; lam += 7.3) {
    for (double x = 0.5; x <= 200.0; x *= 1.9) {
      const double oracle = num::gaussian_cdf(std::sqrt(x) - std::sqrt(lam)) -
                            num::gaussian_cdf(-std::sqrt(x) - std::sqrt(lam));
      CHECK(num::noncentral_chisq_cdf(x, lam) == Approx(oracle).margin(1e-10));
    }
  }
  // monotone in x
  double prev = 0.0;
  for (double x = 0.0; x < 30.0; x += 0.5) {
    const double v = num::noncentral_chisq_cdf(x, 4.0);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK_THROWS_AS(num::noncentral_chisq_cdf(-1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(num::noncentral_chisq_cdf(1.0, -1.0), std::domain_error);
}

TEST_CASE("noncentral t log density") {
  // zero noncentrality reduces to the central Student t
  for (double t : {-3.0, -0.5, 0.0, 1.0, 4.0}) {
    for (double nu : {1.0, 4.0, 17.0, 250.0}) {
      CHECK(num::noncentral_t_logpdf(t, nu, 0.0) ==
            Approx(central_t_logpdf(t, nu)).margin(1e-12));
    }
  }
  CHECK_THROWS_AS(num::noncentral_t_logpdf(1.0, 0.0, 1.0), std::domain_error);

  // quadrature oracle over the normal/inverse-gamma mixture representation
  const double nu = 5.0, delta = 2.0;
  auto mixture_pdf = [&](double t) {
    const double a = 0.5 * nu;
    // log substitution y = exp(u) handles both the y->0 spike and the
    // polynomial tail of the inverse-gamma mixing density
    auto integrand = [&](double u) {
      const double y = std::exp(u);
      const double resid = t - delta * std::sqrt(y);
      const double lg = -0.5 * resid * resid / y - 0.5 * std::log(y) -
                        0.5 * num::log_2pi + a * std::log(a) - std::lgamma(a) -
                        (a + 1.0) * std::log(y) - a / y + u;
      return std::exp(lg);
    };
    return simpson(integrand, -30.0, 25.0, 200000);
  };
  for (double t : {-2.0, -0.3, 0.9, 2.1, 5.5}) {
    CHECK(num::noncentral_t_logpdf(t, nu, delta) ==
          Approx(std::log(mixture_pdf(t))).margin(1e-7));
  }

  // density integrates to one
  auto dens = [&](double t) { return std::exp(num::noncentral_t_logpdf(t, nu, delta)); };
  const auto norm = num::integrate(dens, num::Interval{-num::inf, num::inf}, 1e-10);
  CHECK(norm.value == Approx(1.0).margin(1e-6));

  // opposite-sign tail (series would cancel; mixture fallback path)
  const double far = num::noncentral_t_logpdf(-8.0, 10.0, 12.0);
  CHECK(std::isfinite(far));
  CHECK(far < -80.0);
}

TEST_CASE("integrate basics") {
  auto one_third = num::integrate([](double x) { return x * x; },
                                  num::Interval{0.0, 1.0});
  CHECK(one_third.value == Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(one_third.abs_error_estimate >= 0.0);
  CHECK(one_third.evaluations > 0);

  auto normal = num::integrate([](double x) { return num::gaussian_pdf(x); },
                               num::Interval{-num::inf, num::inf}, 1e-10, 1e-14);
  CHECK(normal.value == Approx(1.0).margin(1e-10));

  // Jeffreys Be(1/2,1/2) density with endpoint singularities
  auto jeffreys = num::integrate(
      [](double p) { return 1.0 / (num::pi * std::sqrt(p * (1.0 - p))); },
      num::Interval{0.0, 1.0}, 1e-8, 1e-12);
  CHECK(jeffreys.value == Approx(1.0).margin(1e-8));

  // half-infinite case against an independent Simpson oracle
  auto expdec = num::integrate([](double x) { return std::exp(-1.7 * x); },
                               num::Interval{0.5, num::inf});
  CHECK(expdec.value == Approx(std::exp(-0.85) / 1.7).epsilon(1e-10));

  CHECK_THROWS_AS(num::integrate([](double x) { return 1.0 / x; },
                                 num::Interval{0.0, 1.0}, 1e-10, 1e-14, 50),
                  num::quadrature_error);
  CHECK_THROWS_AS(num::integrate([](double x) { return x; },
                                 num::Interval{0.0, 1.0}, -1.0, 1e-12),
                  std::domain_error);
}

TEST_CASE("integrate_log tracks peaked integrands") {
  // N(40, 0.01) density: naive exponentiation underflows away from the peak
  auto lf = [](double x) {
    const double z = (x - 40.0) / 0.1;
    return -0.5 * z * z - 0.5 * num::log_2pi - std::log(0.1);
  };
  CHECK(num::integrate_log(lf, num::Interval{-num::inf, num::inf}) ==
        Approx(0.0).margin(1e-7));
}

TEST_CASE("find_root") {
  const double r = num::find_root([](double x) { return x * x - 2.0; }, 1.0, 2.0,
                                  1e-13);
  CHECK(r == Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(num::find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0),
                  num::bracket_error);
  // endpoint root
  CHECK(num::find_root([](double x) { return x - 1.0; }, 1.0, 2.0) == 1.0);
}

TEST_CASE("golden_minimize") {
  const double x = num::golden_minimize(
      [](double u) { return (u - 0.7) * (u - 0.7) + 3.0; }, -4.0, 5.0, 1e-10);
  CHECK(x == Approx(0.7).margin(1e-7));
}
