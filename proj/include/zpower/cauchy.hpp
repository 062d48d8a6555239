#pragma once

// Location test for a single observation X = m + Y, Y standard Cauchy.
// One-sided: reject m <= 0 when X > c_a. Two-sided: reject m = 0 when
// |X| > c_{a/2}. Here c_a = cot(pi a) is the upper-tail critical value.

#include <cmath>
#include <numbers>

#include "zpower/error.hpp"

namespace zpower {

struct CauchyTestConfig {
  double alpha = 0.05;
  double c_alpha = 0.0;
  double c_half_alpha = 0.0;

  static CauchyTestConfig make(double alpha);
};

inline double cauchy_density(double x) {
  detail::require(std::isfinite(x), "cauchy_density: argument must be finite");
  return std::numbers::inv_pi / (1.0 + x * x);
}

/// cot(pi alpha). For alpha >= 1/4 this is evaluated as tan(pi (1/2 - alpha)),
/// where 1/2 - alpha is exact, so c stays accurate as it passes through 0.
inline double cauchy_critical(double alpha) {
  detail::require(alpha > 0.0 && alpha < 1.0, "cauchy_critical: alpha must lie in (0, 1)");
  if (alpha == 0.5) return 0.0;
  if (alpha < 0.25) {
    const double a = std::numbers::pi * alpha;
    return std::cos(a) / std::sin(a);
  }
  return std::tan(std::numbers::pi * (0.5 - alpha));
}

/// P(Y > c) for standard Cauchy Y.
inline double cauchy_sf(double c) { return 0.5 - std::atan(c) * std::numbers::inv_pi; }

inline CauchyTestConfig CauchyTestConfig::make(double alpha) {
  return {alpha, cauchy_critical(alpha), cauchy_critical(0.5 * alpha)};
}

inline double cauchy_power_one_sided(const CauchyTestConfig& cfg, double m) {
  detail::require(std::isfinite(m), "cauchy_power_one_sided: m must be finite");
  return 0.5 + std::atan(m - cfg.c_alpha) * std::numbers::inv_pi;
}

inline double cauchy_power_two_sided(const CauchyTestConfig& cfg, double m) {
  detail::require(std::isfinite(m), "cauchy_power_two_sided: m must be finite");
  return 1.0 -
         (std::atan(m + cfg.c_half_alpha) - std::atan(m - cfg.c_half_alpha)) *
             std::numbers::inv_pi;
}

inline double cauchy_power_one_sided(double alpha, double m) {
  return cauchy_power_one_sided(CauchyTestConfig::make(alpha), m);
}

inline double cauchy_power_two_sided(double alpha, double m) {
  return cauchy_power_two_sided(CauchyTestConfig::make(alpha), m);
}

inline bool cauchy_reject_one_sided(const CauchyTestConfig& cfg, double x) {
  return x > cfg.c_alpha;
}

inline bool cauchy_reject_two_sided(const CauchyTestConfig& cfg, double x) {
  return std::abs(x) > cfg.c_half_alpha;
}

/// atan(m - c_a) + atan(m + c_{a/2}) - pi/2 - atan(m - c_{a/2}), which is
/// pi times (one-sided power - two-sided power). Its sign is not fixed.
inline double cauchy_analog_margin(double alpha, double m) {
  detail::require(std::isfinite(m) && m > 0.0, "cauchy_analog_margin: m must be > 0");
  const CauchyTestConfig cfg = CauchyTestConfig::make(alpha);
  return std::atan(m - cfg.c_alpha) + std::atan(m + cfg.c_half_alpha) -
         0.5 * std::numbers::pi - std::atan(m - cfg.c_half_alpha);
}

}  // namespace zpower
