#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <random>

#include "oracle.hpp"
#include "zpower/ztest.hpp"

using Catch::Approx;
using namespace zpower;

namespace {

const ZTestConfig kFigure1{0.0, 1.0, 10, 0.05};

}  // namespace

TEST_CASE("config validation", "[ztest]") {
  CHECK_NOTHROW(kFigure1.validate());
  CHECK_THROWS_AS((ZTestConfig{0.0, 0.0, 10, 0.05}.validate()), InvalidArgument);
  CHECK_THROWS_AS((ZTestConfig{0.0, 1.0, 0, 0.05}.validate()), InvalidArgument);
  CHECK_THROWS_AS((ZTestConfig{0.0, 1.0, 10, 1.0}.validate()), InvalidArgument);
  CHECK_THROWS_AS(power_one_sided(ZTestConfig{0.0, -1.0, 10, 0.05}, 1.0), InvalidArgument);
}

TEST_CASE("one-sided decision", "[ztest]") {
  // Oracle threshold: z_0.05 / sqrt(10) from long double bisection.
  const double threshold =
      static_cast<double>(oracle::tail_quantile(0.05L) / std::sqrt(10.0L));
  CHECK(threshold == Approx(0.5201483879).margin(1e-9));

  const auto hit = decide_one_sided(kFigure1, {0.6, 10});
  CHECK(hit.reject);
  CHECK(hit.p_value < 0.05);
  CHECK(hit.sidedness == Sidedness::kOneSided);

  const auto null = decide_one_sided(kFigure1, {0.0, 10});
  CHECK_FALSE(null.reject);
  CHECK(null.p_value == 0.5);
  CHECK(null.statistic == 0.0);

  const auto edge = decide_one_sided(kFigure1, {one_sided_threshold(kFigure1), 10});
  CHECK_FALSE(edge.reject);
  CHECK(decide_one_sided(kFigure1, {std::nextafter(one_sided_threshold(kFigure1), 1.0), 10})
            .reject);
}

TEST_CASE("two-sided decision", "[ztest]") {
  const double half_width =
      static_cast<double>(oracle::tail_quantile(0.025L) / std::sqrt(10.0L));
  CHECK(half_width == Approx(0.6197950323).margin(1e-9));
  CHECK(two_sided_half_width(kFigure1) == Approx(half_width).margin(1e-14));

  const auto miss = decide_two_sided(kFigure1, {0.6, 10});
  CHECK_FALSE(miss.reject);
  CHECK(miss.p_value > 0.05);

  const auto null = decide_two_sided(kFigure1, {0.0, 10});
  CHECK_FALSE(null.reject);
  CHECK(null.p_value == 1.0);

  CHECK_FALSE(decide_two_sided(kFigure1, {-two_sided_half_width(kFigure1), 10}).reject);
  CHECK(decide_two_sided(kFigure1, {-0.7, 10}).reject);

  for (double xbar : {0.1, 0.45, 0.6, 1.3}) {
    const double p1 = decide_one_sided(kFigure1, {xbar, 10}).p_value;
    const double p2 = decide_two_sided(kFigure1, {xbar, 10}).p_value;
    CHECK(p1 == Approx(p2 / 2).epsilon(1e-15));
  }
}

TEST_CASE("decision errors", "[ztest]") {
  CHECK_THROWS_AS(decide_one_sided(kFigure1, {0.5, 9}), InvalidArgument);
  CHECK_THROWS_AS(decide_two_sided(kFigure1, {0.5, 11}), InvalidArgument);
  CHECK_THROWS_AS(decide_one_sided(ZTestConfig{0.0, 1.0, 10, 0.0}, {0.5, 10}),
                  InvalidArgument);
}

TEST_CASE("reject iff p < alpha away from the boundary", "[ztest][property]") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> mean(-2.0, 2.0), alpha(0.001, 0.999);
  for (int i = 0; i < 5000; ++i) {
    const ZTestConfig cfg{0.3, 1.7, 1 + static_cast<std::int64_t>(gen() % 40), alpha(gen)};
    const SampleSummary s{mean(gen), cfg.n};
    for (auto side : {Sidedness::kOneSided, Sidedness::kTwoSided}) {
      const auto out = decide(cfg, s, side);
      const double crit = normal_tail_quantile(side == Sidedness::kOneSided ? cfg.alpha
                                                                            : cfg.alpha / 2)
                              .value;
      const double stat = side == Sidedness::kOneSided ? out.statistic : std::abs(out.statistic);
      if (std::abs(stat - crit) < 1e-9) continue;
      CHECK(out.reject == (out.p_value < cfg.alpha));
    }
  }
}

TEST_CASE("power functions at the Figure 1 configuration", "[ztest]") {
  // oracle: long double series CDF at sqrt(10) -/+ oracle quantiles
  const oracle::real d = std::sqrt(10.0L);
  const oracle::real z1 = oracle::tail_quantile(0.05L), z2 = oracle::tail_quantile(0.025L);
  const double p1 = static_cast<double>(oracle::cdf_series(d - z1));
  const double p0 =
      static_cast<double>(1 - oracle::cdf_series(d + z2) + oracle::cdf_series(d - z2));
  CHECK(p1 == Approx(0.9354201700).margin(1e-9));
  CHECK(p0 == Approx(0.8853791408).margin(1e-9));
  CHECK(power_one_sided(kFigure1, 1.0) == Approx(p1).margin(1e-14));
  CHECK(power_two_sided(kFigure1, 1.0) == Approx(p0).margin(1e-14));

  CHECK(power_one_sided(kFigure1, -40.0) < 1e-300);
  CHECK(power_one_sided(kFigure1, 40.0) == 1.0);
  CHECK(power_two_sided(kFigure1, 40.0) == 1.0);
}

TEST_CASE("size, symmetry, unbiasedness and dominance", "[ztest][property]") {
  for (double a = 0.001; a < 0.999; a += 0.002) {
    const ZTestConfig cfg{1.5, 2.0, 7, a};
    INFO("alpha = " << a);
    CHECK(std::abs(power_one_sided(cfg, cfg.mu0) - a) <= 1e-12);
    CHECK(std::abs(power_two_sided(cfg, cfg.mu0) - a) <= 1e-12);
  }
  const ZTestConfig cfg{1.5, 2.0, 7, 0.05};
  double prev = 0.0;
  for (double d = -3.0; d <= 3.0; d += 0.01) {
    const double mu = cfg.mu0 + d;
    CHECK(std::abs(power_two_sided(cfg, cfg.mu0 + d) - power_two_sided(cfg, cfg.mu0 - d)) <=
          1e-15);
    const double p1 = power_one_sided(cfg, mu);
    CHECK(p1 > prev);
    prev = p1;
    if (std::abs(d) > 1e-9) CHECK(power_two_sided(cfg, mu) > cfg.alpha);
    if (d > 1e-9) CHECK(p1 > power_two_sided(cfg, mu));
  }
}

TEST_CASE("power curve", "[ztest]") {
  const auto curve = power_curve(kFigure1, -2.0, 2.0, 401);
  REQUIRE(curve.rows.size() == 401);
  CHECK(curve.rows.front().mu == -2.0);
  CHECK(curve.rows.back().mu == 2.0);
  const auto& mid = curve.rows[200];
  CHECK(mid.mu == 0.0);
  CHECK(std::abs(mid.power_one_sided - 0.05) <= 1e-12);
  CHECK(std::abs(mid.power_two_sided - 0.05) <= 1e-12);
  for (std::size_t i = 1; i < curve.rows.size(); ++i) {
    const auto& r = curve.rows[i];
    CHECK(r.mu > curve.rows[i - 1].mu);
    CHECK((r.power_one_sided >= 0.0 && r.power_one_sided <= 1.0));
    CHECK((r.power_two_sided >= 0.0 && r.power_two_sided <= 1.0));
    if (r.mu > 0.0) CHECK(r.power_one_sided > r.power_two_sided);
  }

  const auto two = power_curve(kFigure1, -1.0, 3.0, 2);
  REQUIRE(two.rows.size() == 2);
  CHECK(two.rows[0].mu == -1.0);
  CHECK(two.rows[1].mu == 3.0);

  CHECK_THROWS_AS(power_curve(kFigure1, 1.0, 1.0, 10), InvalidArgument);
  CHECK_THROWS_AS(power_curve(kFigure1, 0.0, 1.0, 1), InvalidArgument);
  CHECK_THROWS_AS(power_curve(kFigure1, 1.0, std::nextafter(1.0, 2.0), 5), InvalidArgument);
}

namespace {

// Brute force: first n from 1 upward with oracle power >= target.
std::int64_t brute_force_n(double mu_alt, double alpha, double target, bool two_sided) {
  const oracle::real z = oracle::tail_quantile(two_sided ? alpha / 2.0L : alpha);
  for (std::int64_t n = 1;; ++n) {
    const oracle::real d = std::sqrt(static_cast<oracle::real>(n)) * mu_alt;
    const oracle::real p = two_sided ? 1 - oracle::cdf_series(d + z) + oracle::cdf_series(d - z)
                                     : oracle::cdf_series(d - z);
    if (p >= target) return n;
  }
}

}  // namespace

TEST_CASE("required sample size", "[ztest]") {
  SampleSizeQuery q{0.0, 1.0, 0.05, 0.5, 0.8, Sidedness::kOneSided};
  const auto n1 = required_sample_size(q);
  CHECK(n1 == brute_force_n(0.5, 0.05, 0.8, false));
  CHECK(n1 == 25);  // seed ((1.645 + 0.8416) / 0.5)^2 = 24.7

  ZTestConfig cfg{0.0, 1.0, n1, 0.05};
  CHECK(power_one_sided(cfg, 0.5) >= 0.8);
  cfg.n = n1 - 1;
  CHECK(power_one_sided(cfg, 0.5) < 0.8);

  q.sidedness = Sidedness::kTwoSided;
  const auto n2 = required_sample_size(q);
  CHECK(n2 == brute_force_n(0.5, 0.05, 0.8, true));
  CHECK(n2 == 32);
  CHECK(n2 >= n1);

  q.mu_alt = -0.5;
  CHECK(required_sample_size(q) == n2);
}

TEST_CASE("required sample size minimality sweep", "[ztest][property]") {
  for (double mu : {0.05, 0.2, 0.7, 1.5, 3.0})
    for (double target : {0.06, 0.5, 0.9, 0.99}) {
      for (auto side : {Sidedness::kOneSided, Sidedness::kTwoSided}) {
        const SampleSizeQuery q{0.0, 1.0, 0.05, mu, target, side};
        const auto n = required_sample_size(q);
        INFO("mu=" << mu << " target=" << target << " " << to_string(side));
        ZTestConfig cfg{0.0, 1.0, n, 0.05};
        CHECK(power(cfg, mu, side) >= target);
        if (n > 1) {
          cfg.n = n - 1;
          CHECK(power(cfg, mu, side) < target);
        }
      }
      const auto one = required_sample_size({0.0, 1.0, 0.05, mu, target, Sidedness::kOneSided});
      const auto two = required_sample_size({0.0, 1.0, 0.05, mu, target, Sidedness::kTwoSided});
      CHECK(two >= one);
    }
}

TEST_CASE("required sample size errors", "[ztest]") {
  using S = Sidedness;
  CHECK_THROWS_AS(required_sample_size({0.0, 1.0, 0.05, 0.5, 1.0, S::kOneSided}),
                  InvalidArgument);
  CHECK_THROWS_AS(required_sample_size({0.0, 1.0, 0.05, 0.5, 0.05, S::kOneSided}),
                  InvalidArgument);
  CHECK_THROWS_AS(required_sample_size({0.0, 1.0, 0.05, -0.5, 0.8, S::kOneSided}),
                  InvalidArgument);
  CHECK_THROWS_AS(required_sample_size({0.0, 1.0, 0.05, 0.0, 0.8, S::kTwoSided}),
                  InvalidArgument);
  CHECK_THROWS_AS(required_sample_size({0.0, 1.0, 0.05, 1e-9, 0.999, S::kOneSided}),
                  NumericalError);
}
