#pragma once

// One- and two-sided Z tests for the mean of a normal population with known
// sigma: decision rules, p-values, closed-form power and sample size.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <vector>

#include "zpower/error.hpp"
#include "zpower/specfun.hpp"

namespace zpower {

enum class Sidedness { kOneSided, kTwoSided };

inline const char* to_string(Sidedness s) {
  return s == Sidedness::kOneSided ? "one-sided" : "two-sided";
}

struct ZTestConfig {
  double mu0 = 0.0;
  double sigma = 1.0;
  std::int64_t n = 1;
  double alpha = 0.05;  // size of the test

  void validate() const {
    detail::require(std::isfinite(mu0), "ZTestConfig: mu0 must be finite");
    detail::require(std::isfinite(sigma) && sigma > 0.0, "ZTestConfig: sigma must be > 0");
    detail::require(n >= 1, "ZTestConfig: n must be >= 1");
    detail::require(alpha > 0.0 && alpha < 1.0, "ZTestConfig: alpha must lie in (0, 1)");
  }
};

struct SampleSummary {
  double mean = 0.0;
  std::int64_t n = 1;
};

struct TestOutcome {
  bool reject = false;
  double statistic = 0.0;  // sqrt(n) (xbar - mu0) / sigma
  double p_value = 1.0;
  Sidedness sidedness = Sidedness::kOneSided;
};

struct PowerRow {
  double mu = 0.0;
  double power_one_sided = 0.0;
  double power_two_sided = 0.0;
};

struct PowerCurve {
  std::vector<PowerRow> rows;
};

/// Standardized shift sqrt(n)(mu - mu0)/sigma. Both power functions and the
/// reduced dominance margin take this exact value as their argument.
inline double standardized_shift(const ZTestConfig& cfg, double mu) {
  return std::sqrt(static_cast<double>(cfg.n)) * (mu - cfg.mu0) / cfg.sigma;
}

/// Rejection boundary for xbar: mu0 + z_alpha sigma / sqrt(n).
inline double one_sided_threshold(const ZTestConfig& cfg) {
  cfg.validate();
  return cfg.mu0 +
         normal_tail_quantile(cfg.alpha).value * cfg.sigma / std::sqrt(static_cast<double>(cfg.n));
}

/// Half-width of the two-sided acceptance region: z_{alpha/2} sigma / sqrt(n).
inline double two_sided_half_width(const ZTestConfig& cfg) {
  cfg.validate();
  return normal_tail_quantile(0.5 * cfg.alpha).value * cfg.sigma /
         std::sqrt(static_cast<double>(cfg.n));
}

namespace detail {

inline void check_sample(const ZTestConfig& cfg, const SampleSummary& s) {
  cfg.validate();
  require(std::isfinite(s.mean), "SampleSummary: mean must be finite");
  if (s.n != cfg.n) {
    std::ostringstream msg;
    msg << "sample size " << s.n << " does not match configured n = " << cfg.n;
    throw InvalidArgument(msg.str());
  }
}

}  // namespace detail

// The decisions compare xbar against the rejection boundary directly, so a
// sample sitting exactly on the boundary never rejects. The p-value is
// reported alongside; away from the boundary reject <=> p < alpha.

inline TestOutcome decide_one_sided(const ZTestConfig& cfg, const SampleSummary& s) {
  detail::check_sample(cfg, s);
  TestOutcome out;
  out.sidedness = Sidedness::kOneSided;
  out.statistic = standardized_shift(cfg, s.mean);
  out.p_value = normal_sf(out.statistic);
  out.reject = s.mean > one_sided_threshold(cfg);
  return out;
}

inline TestOutcome decide_two_sided(const ZTestConfig& cfg, const SampleSummary& s) {
  detail::check_sample(cfg, s);
  TestOutcome out;
  out.sidedness = Sidedness::kTwoSided;
  out.statistic = standardized_shift(cfg, s.mean);
  out.p_value = std::min(1.0, 2.0 * normal_sf(std::abs(out.statistic)));
  out.reject = std::abs(s.mean - cfg.mu0) > two_sided_half_width(cfg);
  return out;
}

inline TestOutcome decide(const ZTestConfig& cfg, const SampleSummary& s, Sidedness side) {
  return side == Sidedness::kOneSided ? decide_one_sided(cfg, s) : decide_two_sided(cfg, s);
}

/// Power of the one-sided test at shift d = sqrt(n)(mu - mu0)/sigma, size alpha.
inline double power_one_sided_at_shift(double d, double alpha) {
  return normal_cdf(d - normal_tail_quantile(alpha).value);
}

/// Power of the two-sided test at shift d, size alpha.
inline double power_two_sided_at_shift(double d, double alpha) {
  const double z = normal_tail_quantile(0.5 * alpha).value;
  // 1 - Phi(d + z) + Phi(d - z), written as two tails so both stay accurate.
  return normal_sf(d + z) + normal_cdf(d - z);
}

inline double power_one_sided(const ZTestConfig& cfg, double mu) {
  cfg.validate();
  return power_one_sided_at_shift(standardized_shift(cfg, mu), cfg.alpha);
}

inline double power_two_sided(const ZTestConfig& cfg, double mu) {
  cfg.validate();
  return power_two_sided_at_shift(standardized_shift(cfg, mu), cfg.alpha);
}

inline double power(const ZTestConfig& cfg, double mu, Sidedness side) {
  return side == Sidedness::kOneSided ? power_one_sided(cfg, mu) : power_two_sided(cfg, mu);
}

/// Evenly spaced mu grid over [mu_min, mu_max], endpoints included exactly.
inline PowerCurve power_curve(const ZTestConfig& cfg, double mu_min, double mu_max, int steps) {
  cfg.validate();
  detail::require(std::isfinite(mu_min) && std::isfinite(mu_max) && mu_min < mu_max,
                  "power_curve: need finite mu_min < mu_max");
  detail::require(steps >= 2, "power_curve: steps must be >= 2");

  PowerCurve curve;
  curve.rows.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(steps - 1);
    const double mu = std::lerp(mu_min, mu_max, t);
    if (!curve.rows.empty() && !(mu > curve.rows.back().mu))
      throw InvalidArgument("power_curve: range too narrow for the requested steps");
    const double d = standardized_shift(cfg, mu);
    curve.rows.push_back({mu, power_one_sided_at_shift(d, cfg.alpha),
                          power_two_sided_at_shift(d, cfg.alpha)});
  }
  return curve;
}

struct SampleSizeQuery {
  double mu0 = 0.0;
  double sigma = 1.0;
  double alpha = 0.05;
  double mu_alt = 0.0;
  double target_power = 0.8;
  Sidedness sidedness = Sidedness::kOneSided;
};

inline constexpr std::int64_t kMaxSampleSize = std::int64_t{1} << 40;

/// Smallest n whose exact power at mu_alt reaches target_power. The normal
/// approximation n ~ ((z_a + z_b) sigma / |mu_alt - mu0|)^2 (with z_{a/2}
/// for two-sided) seeds an integer scan against the exact power.
inline std::int64_t required_sample_size(const SampleSizeQuery& q) {
  ZTestConfig cfg{q.mu0, q.sigma, 1, q.alpha};
  cfg.validate();
  detail::require(std::isfinite(q.mu_alt), "required_sample_size: mu_alt must be finite");
  detail::require(q.target_power < 1.0, "required_sample_size: target power 1 is unattainable");
  detail::require(q.target_power > q.alpha,
                  "required_sample_size: target power must exceed alpha");
  if (q.sidedness == Sidedness::kOneSided)
    detail::require(q.mu_alt > q.mu0, "required_sample_size: one-sided needs mu_alt > mu0");
  else
    detail::require(q.mu_alt != q.mu0, "required_sample_size: two-sided needs mu_alt != mu0");

  auto power_at = [&](std::int64_t n) {
    cfg.n = n;
    return power(cfg, q.mu_alt, q.sidedness);
  };

  const double z_a = normal_tail_quantile(q.sidedness == Sidedness::kOneSided ? q.alpha
                                                                              : 0.5 * q.alpha)
                         .value;
  const double z_b = normal_tail_quantile(1.0 - q.target_power).value;
  const double effect = std::abs(q.mu_alt - q.mu0) / q.sigma;
  const double seed = std::ceil(std::pow((z_a + z_b) / effect, 2.0));
  if (!(seed <= static_cast<double>(kMaxSampleSize)))
    throw NumericalError("required_sample_size: required n exceeds 2^40");

  std::int64_t n = std::max<std::int64_t>(1, static_cast<std::int64_t>(seed));
  if (power_at(n) >= q.target_power) {
    while (n > 1 && power_at(n - 1) >= q.target_power) --n;
  } else {
    while (power_at(n) < q.target_power) {
      if (++n > kMaxSampleSize)
        throw NumericalError("required_sample_size: required n exceeds 2^40");
    }
  }
  return n;
}

}  // namespace zpower
