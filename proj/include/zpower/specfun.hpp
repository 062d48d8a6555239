#pragma once

// Standard normal special functions: density, CDF, upper tail, upper-tail
// quantile and the Mills-ratio tail bound.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "zpower/error.hpp"

namespace zpower {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;
inline constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056176;

// Upper-tail quantile z with 1 - Phi(z) = tail_prob.
struct Quantile {
  double value = 0.0;
  double tail_prob = 0.5;
};

inline double normal_pdf(double x) {
  detail::require(std::isfinite(x), "normal_pdf: argument must be finite");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

/// log phi(x); stays finite where phi(x) underflows.
inline double normal_log_pdf(double x) {
  detail::require(std::isfinite(x), "normal_log_pdf: argument must be finite");
  return -0.5 * x * x - kLogSqrt2Pi;
}

/// Upper tail 1 - Phi(x), evaluated directly from erfc so it keeps full
/// relative accuracy for large positive x.
inline double normal_sf(double x) {
  detail::require(std::isfinite(x), "normal_sf: argument must be finite");
  return 0.5 * std::erfc(x * std::numbers::sqrt2 * 0.5);
}

inline double normal_cdf(double x) {
  detail::require(std::isfinite(x), "normal_cdf: argument must be finite");
  // Lower tail from erfc(-x/sqrt2) is accurate for x <= 0; for x > 0 go
  // through the complementary tail.
  if (x > 0.0) return 1.0 - normal_sf(x);
  return 0.5 * std::erfc(-x * std::numbers::sqrt2 * 0.5);
}

/// Phi(b) - Phi(a) for a <= b, using upper tails when both arguments are
/// positive so differences of numbers near 1 never cancel.
inline double normal_interval(double a, double b) {
  if (a >= 0.0) return normal_sf(a) - normal_sf(b);
  if (b <= 0.0) return normal_cdf(b) - normal_cdf(a);
  return 1.0 - normal_cdf(a) - normal_sf(b);
}

namespace detail {

// Acklam's rational approximation to the lower-tail quantile, ~1.15e-9
// relative error. Used only as a Newton seed.
inline double acklam_lower_quantile(double p) {
  constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                          -2.759285104469687e+02, 1.383577518672690e+02,
                          -3.066479806614716e+01, 2.506628277459239e+00};
  constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                          -1.556989798598866e+02, 6.680131188771972e+01,
                          -1.328068155288572e+01};
  constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                          -2.400758277161838e+00, -2.549732539343734e+00,
                          4.374664141464968e+00,  2.938163982698783e+00};
  constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                          2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

/// Upper-tail quantile z_alpha, i.e. 1 - Phi(z_alpha) = alpha.
///
/// Seeded by Acklam's approximation, then polished with Newton steps on the
/// tail function that is small at the solution (the upper tail when
/// alpha <= 1/2, the lower tail otherwise). Two steps are always taken; a
/// third is taken while the correction is still above a few ulps.
inline Quantile normal_tail_quantile(double alpha) {
  detail::require(alpha > 0.0 && alpha < 1.0,
                  "normal_tail_quantile: alpha must lie in (0, 1)");
  if (alpha == 0.5) return {0.0, alpha};

  const bool upper = alpha < 0.5;
  // Work with the small tail probability p and its quantile u > 0, then
  // restore the sign: z = u for alpha < 1/2, z = -u otherwise.
  const double p = upper ? alpha : 1.0 - alpha;
  double u = -detail::acklam_lower_quantile(p);

  for (int step = 0; step < 6; ++step) {
    const double density = std::exp(normal_log_pdf(u));
    if (density == 0.0) break;
    const double delta = (normal_sf(u) - p) / density;
    u += delta;
    if (step >= 1 && std::abs(delta) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                             std::max(1.0, std::abs(u)))
      break;
  }
  return {upper ? u : -u, alpha};
}

/// Mills-ratio bound phi(u)/u, which strictly exceeds 1 - Phi(u) for u > 0.
inline double gaussian_tail_upper_bound(double u) {
  detail::require(std::isfinite(u) && u > 0.0,
                  "gaussian_tail_upper_bound: argument must be positive");
  return normal_pdf(u) / u;
}

}  // namespace zpower
