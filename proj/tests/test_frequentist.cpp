#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "repbayes/frequentist.hpp"

using namespace repbayes;
using Catch::Approx;
using freq::LimitKind;
using freq::McTruth;
using freq::Method;
using freq::SamplingHypothesis;
using normal::Level;

namespace {

// Direct evaluation of each method's success criterion, the pointwise oracle
// for the region algebra.
bool criterion_holds(Method m, double z_o, double d, double c, Level gamma) {
  const auto p = normal::pair_from_d(z_o, d, c);
  switch (m) {
    case Method::sceptical_bf:
      return normal::sceptical_bf_success(p, gamma);
    case Method::two_trials:
      return normal::two_trials(p, gamma);
    case Method::replication_bf:
      return normal::log_replication_bf(p) < std::log(gamma.gamma);
    case Method::sceptical_p: {
      if (p.z_r == 0.0) return false;
      const double z_g = normal::invert_min_bf(gamma.gamma);
      return normal::sceptical_p(p) < num::gaussian_cdf(-z_g);
    }
  }
  return false;
}

double region_boundary_distance(const freq::SuccessRegion& r, double d) {
  double dist = num::inf;
  for (const auto& iv : r.intervals) {
    if (std::isfinite(iv.first)) dist = std::min(dist, std::abs(d - iv.first));
    if (std::isfinite(iv.second)) dist = std::min(dist, std::abs(d - iv.second));
  }
  return dist;
}

}  // namespace

TEST_CASE("success regions match the pointwise criteria") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Method methods[] = {Method::sceptical_bf, Method::two_trials,
                            Method::replication_bf, Method::sceptical_p};
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const double z_o = 1.1 + 4.0 * u(rng);
    const double c = std::exp(-1.5 + 3.5 * u(rng));
    const Level gamma{0.05 + 0.6 * u(rng)};
    const double d = -10.0 + 20.0 * u(rng);
    for (Method m : methods) {
      const auto region = freq::success_region(m, z_o, c, gamma);
      if (region_boundary_distance(region, d) < 1e-6) continue;
      CHECK(region.contains(d) == criterion_holds(m, z_o, d, c, gamma));
      ++checked;
    }
  }
  CHECK(checked > 3500);

  // sign symmetry: regions in d are driven by |z_o| and the sign flows
  // through d itself
  for (int i = 0; i < 100; ++i) {
    const double z_o = -(1.2 + 3.0 * u(rng));
    const double c = std::exp(-1.0 + 2.0 * u(rng));
    const Level gamma{0.08 + 0.5 * u(rng)};
    const double d = -6.0 + 12.0 * u(rng);
    for (Method m : methods) {
      const auto region = freq::success_region(m, z_o, c, gamma);
      if (region_boundary_distance(region, d) < 1e-6) continue;
      CHECK(region.contains(d) == criterion_holds(m, z_o, d, c, gamma));
      const auto mirrored = freq::success_region(m, -z_o, c, gamma);
      CHECK(region.contains(d) == mirrored.contains(d));
    }
  }
}

TEST_CASE("sceptical-p region example") {
  // z_o = 2, one-sided alpha 0.025, c = 2 requires d of roughly 4.87
  CHECK(freq::sceptical_p_d_min(2.0, 2.0, 0.025) == Approx(4.87).margin(0.01));
  // cutoff: no region when z_o is below the threshold z
  const auto r = freq::success_region(Method::sceptical_p, 1.0, 2.0, Level{1.0 / 3.0});
  CHECK(r.empty());
}

TEST_CASE("region trichotomy for the sceptical BF") {
  // g > 1 (moderately compelling original): bounded interval
  const double z1 = normal::invert_min_bf(1.0 / 4.0);
  const auto r1 = freq::success_region(Method::sceptical_bf, z1, 1.0, Level{1.0 / 3.0});
  REQUIRE(r1.intervals.size() == 1);
  CHECK(std::isfinite(r1.intervals[0].first));
  CHECK(std::isfinite(r1.intervals[0].second));

  // g < 1 (strong original): two unbounded pieces
  const double z2 = normal::invert_min_bf(1.0 / 10.0);
  const auto r2 = freq::success_region(Method::sceptical_bf, z2, 1.0, Level{1.0 / 3.0});
  REQUIRE(r2.intervals.size() == 2);
  CHECK(std::isinf(r2.intervals[0].first));
  CHECK(std::isinf(r2.intervals[1].second));

  // empty when the original is not compelling at the level
  const auto r3 = freq::success_region(Method::sceptical_bf, 1.5, 1.0, Level{1.0 / 3.0});
  CHECK(r3.empty());
}

TEST_CASE("paradox thresholds") {
  const double z_o = normal::invert_min_bf(0.1);
  const auto thr = freq::paradox_thresholds(z_o, 1.0, Level{1.0 / 3.0});
  REQUIRE(thr.sceptical_bf.has_value());
  REQUIRE(thr.replication_bf.has_value());
  CHECK(*thr.sceptical_bf == Approx(-7.09).margin(0.01));
  CHECK(*thr.replication_bf == Approx(-2.66).margin(0.01));

  // truncation removes negative-d success
  for (double d = -20.0; d < 0.0; d += 0.37) {
    const auto p = normal::pair_from_d(z_o, d, 1.0);
    CHECK_FALSE(normal::sceptical_bf_success(p, Level{1.0 / 3.0}, true));
    CHECK(normal::log_replication_bf(p, true) >= std::log(1.0 / 3.0));
  }
}

TEST_CASE("shrinkage paradox limits") {
  const Level gamma{1.0 / 3.0};

  CHECK(freq::d_min_limit(Method::two_trials, LimitKind::c_to_infinity, 3.0, 1.0, gamma) == 0.0);
  CHECK(freq::d_min_limit(Method::two_trials, LimitKind::zo2_to_infinity, 3.0, 1.0, gamma) == 0.0);
  CHECK(freq::d_min_limit(Method::replication_bf, LimitKind::c_to_infinity, 3.0, 1.0, gamma) == 0.0);
  CHECK(freq::d_min_limit(Method::sceptical_p, LimitKind::zo2_to_infinity, 3.0, 1.0, gamma) == 0.0);

  // numeric d_min at extreme c against the closed-form c-limit
  for (double z_o : {normal::invert_min_bf(0.1), normal::invert_min_bf(1.0 / 4.0)}) {
    const auto region = freq::success_region(Method::sceptical_bf, z_o, 1e6, gamma);
    const auto dmin = region.d_min();
    REQUIRE(dmin.has_value());
    const double lim =
        freq::d_min_limit(Method::sceptical_bf, LimitKind::c_to_infinity, z_o, 1.0, gamma);
    CHECK(*dmin == Approx(lim).margin(1e-3));
    CHECK(lim > 0.0);
  }
  {
    const double z_o = 3.0;
    const auto region = freq::success_region(Method::sceptical_p, z_o, 1e6, gamma);
    const auto dmin = region.d_min();
    REQUIRE(dmin.has_value());
    const double lim =
        freq::d_min_limit(Method::sceptical_p, LimitKind::c_to_infinity, z_o, 1.0, gamma);
    CHECK(*dmin == Approx(lim).margin(1e-3));
    CHECK(lim > 0.0);
  }
  // numeric d_min at extreme z_o against the z_o^2 limits
  for (double c : {0.5, 1.0, 3.0}) {
    const double z_big = 100.0;
    const auto rs = freq::success_region(Method::sceptical_bf, z_big, c, gamma);
    const double lim_s =
        freq::d_min_limit(Method::sceptical_bf, LimitKind::zo2_to_infinity, z_big, c, gamma);
    REQUIRE(rs.d_min().has_value());
    CHECK(*rs.d_min() == Approx(lim_s).margin(1e-3));
    CHECK(lim_s > 0.0);

    const auto rr = freq::success_region(Method::replication_bf, z_big, c, gamma);
    const double lim_r =
        freq::d_min_limit(Method::replication_bf, LimitKind::zo2_to_infinity, z_big, c, gamma);
    REQUIRE(rr.d_min().has_value());
    CHECK(*rr.d_min() == Approx(lim_r).margin(1e-3));
    CHECK(lim_r > 0.0);
  }
}

TEST_CASE("probability of success: basic shapes") {
  const Level gamma{1.0 / 3.0};
  // zero when no sufficiently sceptical prior exists
  CHECK(freq::prob_success(Method::sceptical_bf, 1.2, 2.0, gamma,
                           SamplingHypothesis::conditional(1.2, 2.0))
            .probability == 0.0);

  // conditional power at z_o = 3 increases with c
  double prev = 0.0;
  const double at_c1 = freq::prob_success(Method::sceptical_bf, 3.0, 1.0, gamma,
                                          SamplingHypothesis::conditional(3.0, 1.0))
                           .probability;
  for (double c : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    const double p = freq::prob_success(Method::sceptical_bf, 3.0, c, gamma,
                                        SamplingHypothesis::conditional(3.0, c))
                         .probability;
    CHECK(p >= prev - 1e-12);
    CHECK(p >= at_c1 - 1e-12);
    CHECK((p >= 0.0 && p <= 1.0));
    prev = p;
  }
}

TEST_CASE("power comparison shapes") {
  const Level gamma{1.0 / 3.0};
  // at z_o = 2.5 and c = 1 the sceptical BF outpowers the two-trials rule
  const double zo = 2.5;
  auto cond = [&](Method m, double c) {
    return freq::prob_success(m, zo, c, gamma,
                              SamplingHypothesis::conditional(zo, c))
        .probability;
  };
  CHECK(cond(Method::sceptical_bf, 1.0) > cond(Method::two_trials, 1.0));
  // with growing c the two-trials power climbs towards the replication BF's
  CHECK(cond(Method::replication_bf, 16.0) - cond(Method::two_trials, 16.0) <
        cond(Method::replication_bf, 1.0) - cond(Method::two_trials, 1.0));
  // predictive power sits closer to one half than conditional power
  for (Method m : {Method::sceptical_bf, Method::two_trials}) {
    const double pc = cond(m, 2.0);
    const double pp = freq::prob_success(m, zo, 2.0, gamma,
                                         SamplingHypothesis::predictive(zo, 2.0))
                          .probability;
    CHECK(std::abs(pp - 0.5) < std::abs(pc - 0.5) + 0.05);
  }
  // uncompelling originals cannot succeed under the cutoff methods
  for (Method m : {Method::sceptical_bf, Method::two_trials}) {
    CHECK(freq::prob_success(m, 1.5, 8.0, gamma,
                             SamplingHypothesis::conditional(1.5, 8.0))
              .probability == 0.0);
  }
  CHECK(freq::prob_success(Method::replication_bf, 1.5, 8.0, gamma,
                           SamplingHypothesis::conditional(1.5, 8.0))
            .probability > 0.5);
}

TEST_CASE("replication BF type I error runs far above the others") {
  const Level gamma{1.0 / 3.0};
  for (double c : {0.5, 1.0, 4.0}) {
    const double t_bfr = freq::type1_error(Method::replication_bf, gamma, c).probability;
    CHECK(t_bfr > freq::type1_error(Method::sceptical_bf, gamma, c).probability);
    CHECK(t_bfr > freq::type1_error(Method::two_trials, gamma, c).probability);
  }
}

TEST_CASE("trichotomy continuity at g = 1") {
  // choose gamma so that the sufficiently sceptical variance sits just on
  // either side of one
  const double z_o = 2.4, c = 1.7;
  for (double eps : {1e-6, -1e-6}) {
    const double g = 1.0 + eps;
    const Level gamma{normal::bf_0s(z_o, g).value()};
    const auto check = normal::sufficiently_sceptical_g(z_o, gamma);
    REQUIRE(check.has_value());
    CHECK(check->g == Approx(g).margin(1e-9));
  }
  const Level gm{normal::bf_0s(z_o, 1.0 - 1e-6).value()};
  const Level gp{normal::bf_0s(z_o, 1.0 + 1e-6).value()};
  for (auto hyp : {SamplingHypothesis::null(), SamplingHypothesis::conditional(z_o, c),
                   SamplingHypothesis::predictive(z_o, c)}) {
    const double a = freq::prob_success(Method::sceptical_bf, z_o, c, gm, hyp).probability;
    const double b = freq::prob_success(Method::sceptical_bf, z_o, c, gp, hyp).probability;
    CHECK(a == Approx(b).margin(1e-4));
  }
}

TEST_CASE("power formulas equal the region tail sums") {
  // independent route: map the d-region to z_r bounds and sum normal tails
  std::mt19937_64 rng(271);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    const double z_o = (u(rng) < 0.5 ? 1.0 : -1.0) * (1.2 + 3.5 * u(rng));
    const double c = std::exp(-1.5 + 3.0 * u(rng));
    const Level gamma{0.05 + 0.55 * u(rng)};
    const auto gg = normal::sufficiently_sceptical_g(z_o, gamma);
    if (gg && std::abs(gg->g - 1.0) < 1e-4) continue;  // branch window
    for (auto hyp :
         {SamplingHypothesis::null(), SamplingHypothesis::conditional(z_o, c),
          SamplingHypothesis::predictive(z_o, c)}) {
      for (Method m : {Method::sceptical_bf, Method::two_trials,
                       Method::replication_bf, Method::sceptical_p}) {
        const auto region = freq::success_region(m, z_o, c, gamma);
        const double s = z_o * std::sqrt(c);
        const double sd = std::sqrt(hyp.var_zr);
        double p_region = 0.0;
        for (auto iv : region.intervals) {
          double a = iv.first * s, b = iv.second * s;
          if (a > b) std::swap(a, b);
          p_region += num::gaussian_cdf((b - hyp.mu_zr) / sd) -
                      num::gaussian_cdf((a - hyp.mu_zr) / sd);
        }
        const double p_formula = freq::prob_success(m, z_o, c, gamma, hyp).probability;
        CHECK(p_formula == Approx(p_region).margin(1e-9));
        ++checked;
      }
    }
  }
  CHECK(checked > 3000);
}

TEST_CASE("analytic rates agree with Monte Carlo (spot checks)") {
  const std::int64_t n = 200000;
  const std::uint64_t seed = 20240710;
  for (Method m : {Method::sceptical_bf, Method::two_trials, Method::replication_bf,
                   Method::sceptical_p}) {
    for (double c : {0.5, 2.0}) {
      const Level gamma{1.0 / 3.0};
      // conditional
      const auto mc_c = freq::monte_carlo_rate(m, gamma, c, McTruth::fixed_effect(2.5), n, seed);
      const auto an_c = freq::prob_success(m, 2.5, c, gamma,
                                           SamplingHypothesis::conditional(2.5, c));
      CHECK(an_c.probability ==
            Approx(mc_c.probability).margin(4.0 * *mc_c.mc_std_error + 1e-9));
      // predictive
      const auto mc_p = freq::monte_carlo_rate(m, gamma, c, McTruth::predictive(2.5), n, seed + 1);
      const auto an_p = freq::prob_success(m, 2.5, c, gamma,
                                           SamplingHypothesis::predictive(2.5, c));
      CHECK(an_p.probability ==
            Approx(mc_p.probability).margin(4.0 * *mc_p.mc_std_error + 1e-9));
      // global null
      const auto mc_n = freq::monte_carlo_rate(m, gamma, c, McTruth::null(), n, seed + 2);
      const auto an_n = freq::type1_error(m, gamma, c);
      CHECK(an_n.probability ==
            Approx(mc_n.probability).margin(4.0 * *mc_n.mc_std_error + 1e-6));
    }
  }
}

TEST_CASE("monte carlo determinism") {
  const auto a = freq::monte_carlo_rate(Method::two_trials, Level{1.0 / 3.0}, 2.0,
                                        McTruth::null(), 50000, 99);
  const auto b = freq::monte_carlo_rate(Method::two_trials, Level{1.0 / 3.0}, 2.0,
                                        McTruth::null(), 50000, 99);
  CHECK(a.probability == b.probability);
  REQUIRE(a.mc_std_error.has_value());
}

TEST_CASE("type I error") {
  // two-trials closed form at the conventional level
  const Level g21{normal::min_bf(1.96).value()};
  const auto t = freq::type1_error(Method::two_trials, g21, 1.0);
  const double tail = 1.0 - num::gaussian_cdf(1.96);
  CHECK(t.probability == Approx(2.0 * tail * tail).epsilon(1e-12));
  CHECK(t.probability == Approx(0.05 * 0.025).epsilon(0.002));

  // independent of c
  for (double c : {0.5, 1.0, 2.0, 4.0}) {
    CHECK(freq::type1_error(Method::two_trials, g21, c).probability ==
          Approx(t.probability).epsilon(1e-12));
  }

  // sceptical BF / sceptical p decrease with c
  for (Method m : {Method::sceptical_bf, Method::sceptical_p}) {
    double prev = num::inf;
    for (double c : {0.5, 1.0, 2.0, 4.0}) {
      const double v = freq::type1_error(m, Level{1.0 / 3.0}, c).probability;
      CHECK(v < prev);
      CHECK((v > 0.0 && v < 1.0));
      prev = v;
    }
  }

  // quadrature identity: independent Simpson integration of the null success
  // probability reproduces type1_error
  const Level gamma{1.0 / 3.0};
  const double z_g = normal::invert_min_bf(gamma.gamma);
  auto integrand = [&](double z) {
    return freq::prob_success(Method::sceptical_bf, z, 2.0, gamma,
                              SamplingHypothesis::null())
               .probability *
           num::gaussian_pdf(z);
  };
  double sum = 0.0;
  const int steps = 4000;
  const double hi = 10.0, h = (hi - z_g) / steps;
  for (int i = 0; i <= steps; ++i) {
    const double w = (i == 0 || i == steps) ? 1.0 : ((i % 2) ? 4.0 : 2.0);
    sum += w * integrand(z_g + i * h);
  }
  sum *= 2.0 * h / 3.0;
  CHECK(freq::type1_error(Method::sceptical_bf, gamma, 2.0).probability ==
        Approx(sum).margin(1e-6));
}

TEST_CASE("information consistency") {
  std::vector<double> grid;
  for (double z = 2.0; z <= 40.0; z += 0.5) grid.push_back(z);
  CHECK(freq::information_consistency_check(1.0, grid) ==
        freq::TrendClassification::diverges_to_zero);
  CHECK(freq::information_consistency_check(0.5, grid) ==
        freq::TrendClassification::diverges_to_zero);
  CHECK(freq::information_consistency_check(0.3, grid) ==
        freq::TrendClassification::bounded_away);
}
