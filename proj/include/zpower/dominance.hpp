#pragma once

// The reduced dominance inequality
//
//   Phi(x - z_{2a}) > Phi(x - z_a) + Phi(-x - z_a),   x > 0, 0 < a < 1/2,
//
// which is the one-sided vs two-sided power comparison at size 2a with
// x = sqrt(n)(mu - mu0)/sigma. Two evaluation routes are provided: the
// closed-form margin, and an integral over (z_{2a}, z_a] of a shifted
// Gaussian series. The bounding functions of the monotonicity / mean value
// argument, and the sufficient condition it reduces to, are also exposed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "zpower/error.hpp"
#include "zpower/quadrature.hpp"
#include "zpower/specfun.hpp"

namespace zpower {

/// Reduced parameters. alpha here is half the test size.
struct ReducedParams {
  double x = 0.0;
  double alpha = 0.025;
  double z_alpha = 0.0;    // z_a
  double z_2alpha = 0.0;   // z_{2a}
  double delta = 0.0;      // z_a - z_{2a} > 0

  /// Builds the quantiles for reduced alpha in (0, 1/2) and x >= 0.
  static ReducedParams make(double x, double alpha) {
    detail::require(std::isfinite(x) && x >= 0.0, "ReducedParams: x must be finite and >= 0");
    detail::require(alpha > 0.0 && alpha < 0.5, "ReducedParams: alpha must lie in (0, 1/2)");
    ReducedParams p;
    p.x = x;
    p.alpha = alpha;
    p.z_alpha = normal_tail_quantile(alpha).value;
    p.z_2alpha = normal_tail_quantile(2.0 * alpha).value;
    p.delta = p.z_alpha - p.z_2alpha;
    if (!(p.delta > 0.0)) throw NumericalError("ReducedParams: quantiles not separated");
    return p;
  }

  ReducedParams at(double new_x) const {
    detail::require(std::isfinite(new_x) && new_x >= 0.0,
                    "ReducedParams: x must be finite and >= 0");
    ReducedParams p = *this;
    p.x = new_x;
    return p;
  }
};

/// f(x) = Phi(x - z_{2a}) - Phi(x - z_a).
inline double f_gap(double x, const ReducedParams& p) {
  return normal_interval(x - p.z_alpha, x - p.z_2alpha);
}

/// g(x) = 1 - Phi(x + z_a).
inline double g_tail(double x, const ReducedParams& p) { return normal_sf(x + p.z_alpha); }

/// margin = f(x) - g(x) = Phi(x - z_{2a}) - Phi(x - z_a) - Phi(-x - z_a).
/// Zero at x = 0 and positive for x > 0.
inline double margin(const ReducedParams& p) { return f_gap(p.x, p) - g_tail(p.x, p); }

/// Peak of f: (z_{2a} + z_a) / 2.
inline double f_peak(const ReducedParams& p) { return 0.5 * (p.z_2alpha + p.z_alpha); }

/// delta * phi(x - z_{2a}), a strict lower bound for f(x) when
/// x > max(0, z_{2a} + z_a). Then x - z_{2a} is the endpoint of
/// [x - z_a, x - z_{2a}] farthest from 0, so phi is smallest there.
inline double mvt_lower_bound_f(double x, const ReducedParams& p) {
  detail::require(std::isfinite(x) && x > p.z_2alpha + p.z_alpha && x > 0.0,
                  "mvt_lower_bound_f: x must exceed max(0, z_2a + z_a)");
  return p.delta * normal_pdf(x - p.z_2alpha);
}

/// phi(x + z_a) / (z_{2a} + 2 z_a), the tail-bound ceiling on g(x) for
/// x > z_{2a} + z_a.
inline double tail_upper_bound_g(double x, const ReducedParams& p) {
  detail::require(std::isfinite(x) && x > p.z_2alpha + p.z_alpha,
                  "tail_upper_bound_g: x must exceed z_2a + z_a");
  const double floor = p.z_2alpha + 2.0 * p.z_alpha;
  detail::require(floor > 0.0, "tail_upper_bound_g: needs z_2a + 2 z_a > 0");
  return normal_pdf(x + p.z_alpha) / floor;
}

struct SufficientCondition {
  bool holds = false;
  bool applicable = false;  // z_2a + 2 z_a > 0 and z_2a + z_a > 0
  double lhs = 0.0;         // exp((z_2a^2 - z_a^2)/2) / ((z_a - z_2a)(z_2a + 2 z_a))
  double rhs = 0.0;         // exp((z_2a + z_a)^2)
};

/// Evaluates the closed-form condition that makes the bounds
/// delta phi(x - z_2a) > phi(x + z_a)/(z_2a + 2 z_a) hold on the whole range
/// x > z_2a + z_a, with x set to its lower end. Where the tail bound does not
/// apply (z_2a + 2 z_a <= 0) or the right side is not increasing in x
/// (z_2a + z_a <= 0) the condition is reported as not holding.
inline SufficientCondition proof1_condition(double alpha) {
  const ReducedParams p = ReducedParams::make(0.0, alpha);
  const double z1 = p.z_alpha;
  const double z2 = p.z_2alpha;
  SufficientCondition c;
  c.applicable = (z2 + 2.0 * z1 > 0.0) && (z2 + z1 > 0.0);
  if (!c.applicable) return c;
  c.lhs = std::exp(0.5 * (z2 * z2 - z1 * z1)) / ((z1 - z2) * (z2 + 2.0 * z1));
  c.rhs = std::exp((z2 + z1) * (z2 + z1));
  c.holds = c.lhs < c.rhs;
  return c;
}

inline bool proof1_sufficient_condition(double alpha) { return proof1_condition(alpha).holds; }

/// Bisects for the reduced alpha where the sufficient condition switches
/// from holding to failing, starting from a bracket [lo, hi] with the
/// condition true at lo and false at hi.
inline double proof1_threshold(double lo = 0.025, double hi = 0.49, double tol = 1e-12) {
  detail::require(proof1_sufficient_condition(lo), "proof1_threshold: condition false at lo");
  detail::require(!proof1_sufficient_condition(hi), "proof1_threshold: condition true at hi");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (proof1_sufficient_condition(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline constexpr double kSeriesTolerance = 1e-17;
inline constexpr std::size_t kSeriesMaxTerms = 1'000'000;

/// The bracketed series
///   exp(-t^2/2 + x t) - sum_{j>=1} exp(-(t + j delta)^2/2 - x (t + j delta)),
/// so that the series integrand equals phi(x) times this value. Summation
/// stops at the first term below tol * (|partial sum| + tol).
inline double series_bracket(double t, double x, const ReducedParams& p,
                             double tol = kSeriesTolerance) {
  detail::require(std::isfinite(x) && x >= 0.0, "series_bracket: x must be >= 0");
  detail::require(tol > 0.0, "series_bracket: tol must be positive");
  detail::require(t > p.z_2alpha && t <= p.z_alpha,
                  "series_bracket: t must lie in (z_2a, z_a]");

  const double lead = std::exp(-0.5 * t * t + x * t);
  double sum = 0.0;
  std::size_t j = 1;
  for (; j <= kSeriesMaxTerms; ++j) {
    const double s = t + static_cast<double>(j) * p.delta;
    const double term = std::exp(-0.5 * s * s - x * s);
    sum += term;
    if (term < tol * (std::abs(sum) + tol)) break;
  }
  if (j > kSeriesMaxTerms) throw NumericalError("series_bracket: series did not converge");
  const double value = lead - sum;
  if (!std::isfinite(value)) throw NumericalError("series_bracket: overflow (x too large)");
  return value;
}

/// phi(x - t) - sum_{j>=1} phi(x + t + j delta), computed as phi(x) times
/// the bracketed series.
inline double series_integrand(double t, double x, const ReducedParams& p,
                               double tol = kSeriesTolerance) {
  return normal_pdf(x) * series_bracket(t, x, p, tol);
}

struct SeriesMargin {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t panels = 0;
};

/// Integral of the series integrand over (z_{2a}, z_a]. The bracketed series
/// is integrated first and phi(x) < 1/2 applied afterwards, to absolute
/// tolerance quad_tol or relative tolerance 1e-12, whichever is looser. The
/// bracket grows like exp(x z_a), so the relative test is what terminates at
/// large x, and there the tiny margin keeps its leading digits.
inline constexpr double kSeriesRelTolerance = 1e-12;

inline SeriesMargin series_margin_detailed(const ReducedParams& p, double quad_tol) {
  detail::require(quad_tol > 0.0, "series_margin: quad_tol must be positive");
  auto bracket = [&](double t) {
    // Gauss-Kronrod nodes are interior, but guard the open left end anyway.
    return series_bracket(std::max(t, std::nextafter(p.z_2alpha, p.z_alpha)), p.x, p);
  };
  const double scale = normal_pdf(p.x);
  QuadratureOptions opt;
  opt.abs_tol = quad_tol;
  opt.rel_tol = kSeriesRelTolerance;
  const QuadratureResult r = integrate_adaptive(bracket, p.z_2alpha, p.z_alpha, opt);
  return {scale * r.value, scale * r.error_estimate, r.panels};
}

inline double series_margin(const ReducedParams& p, double quad_tol) {
  return series_margin_detailed(p, quad_tol).value;
}

/// (Phi(z_a) - Phi(z_{2a})) - (1 - Phi(z_a)); both pieces equal alpha.
inline double identity_check(double alpha) {
  const ReducedParams p = ReducedParams::make(0.0, alpha);
  return normal_interval(p.z_2alpha, p.z_alpha) - normal_sf(p.z_alpha);
}

struct DominancePoint {
  double x = 0.0;
  double alpha = 0.0;
  double margin = 0.0;
  double series_margin = 0.0;
  bool proof1_sufficient = false;
};

struct DominanceReport {
  std::vector<DominancePoint> grid;
  double min_margin = std::numeric_limits<double>::infinity();
  std::size_t min_index = 0;
  double min_series_margin = std::numeric_limits<double>::infinity();
  double max_route_discrepancy = 0.0;
  bool all_positive = false;          // every margin > 0
  bool series_all_positive = false;   // every series margin > 0
};

/// x grid: per_decade log-spaced points on [x_min, min(1, x_max)), then a
/// linear grid from 1 to x_max with the given step. The defaults give 600
/// points on [1e-3, 10].
inline std::vector<double> mixed_x_grid(double x_min = 1e-3, double x_max = 10.0,
                                        int per_decade = 50, double linear_step = 0.02) {
  detail::require(x_min > 0.0 && x_min < x_max && std::isfinite(x_max),
                  "mixed_x_grid: need 0 < x_min < x_max");
  detail::require(per_decade >= 1 && linear_step > 0.0, "mixed_x_grid: bad spacing");
  std::vector<double> xs;
  const double log_end = std::min(1.0, x_max);
  for (int k = 0;; ++k) {
    const double x = x_min * std::pow(10.0, static_cast<double>(k) / per_decade);
    if (x >= log_end) break;
    xs.push_back(x);
  }
  if (x_max >= 1.0) {
    const double start = std::max(1.0, x_min);
    const auto steps = static_cast<long>(std::floor((x_max - start) / linear_step + 1e-9));
    for (long k = 0; k <= steps; ++k)
      xs.push_back(std::min(x_max, start + linear_step * static_cast<double>(k)));
  }
  return xs;
}

inline std::vector<double> default_x_grid() { return mixed_x_grid(); }

/// Reduced alpha grid lo, lo + step, ..., up to hi (inclusive within
/// rounding). Defaults: 0.005, 0.010, ..., 0.495.
inline std::vector<double> alpha_grid(double lo = 0.005, double hi = 0.495, double step = 0.005) {
  detail::require(lo > 0.0 && hi < 0.5 && lo <= hi && step > 0.0,
                  "alpha_grid: need 0 < lo <= hi < 1/2 and step > 0");
  std::vector<double> as;
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= count; ++k) as.push_back(lo + step * static_cast<double>(k));
  return as;
}

inline std::vector<double> default_alpha_grid() { return alpha_grid(); }

/// Evaluates both routes at every (x, alpha) grid point. Rows (one per
/// alpha) are farmed out to worker threads; the report is assembled in grid
/// order so it does not depend on the thread count.
inline DominanceReport verify_grid(const std::vector<double>& x_grid,
                                   const std::vector<double>& alpha_grid, double quad_tol,
                                   unsigned threads = 0) {
  for (double x : x_grid)
    detail::require(std::isfinite(x) && x > 0.0, "verify_grid: x values must be > 0");
  for (double a : alpha_grid)
    detail::require(a > 0.0 && a < 0.5, "verify_grid: alpha values must lie in (0, 1/2)");
  detail::require(quad_tol > 0.0, "verify_grid: quad_tol must be positive");

  const std::size_t nx = x_grid.size();
  DominanceReport report;
  report.grid.resize(nx * alpha_grid.size());

  std::vector<std::string> errors(alpha_grid.size());
  auto run_row = [&](std::size_t ia) {
    const double a = alpha_grid[ia];
    double x = 0.0;
    try {
      const ReducedParams base = ReducedParams::make(0.0, a);
      const bool sufficient = proof1_sufficient_condition(a);
      for (std::size_t ix = 0; ix < nx; ++ix) {
        x = x_grid[ix];
        const ReducedParams p = base.at(x);
        report.grid[ia * nx + ix] = {p.x, a, margin(p), series_margin(p, quad_tol), sufficient};
      }
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "at x=" << x << " alpha=" << a << ": " << e.what();
      errors[ia] = msg.str();
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(alpha_grid.size()));
  if (threads <= 1) {
    for (std::size_t ia = 0; ia < alpha_grid.size(); ++ia) run_row(ia);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t ia = w; ia < alpha_grid.size(); ia += threads) run_row(ia);
      });
  }
  for (const auto& e : errors)
    if (!e.empty()) throw NumericalError("verify_grid: " + e);

  report.all_positive = !report.grid.empty();
  report.series_all_positive = !report.grid.empty();
  for (std::size_t i = 0; i < report.grid.size(); ++i) {
    const DominancePoint& pt = report.grid[i];
    if (pt.margin < report.min_margin) {
      report.min_margin = pt.margin;
      report.min_index = i;
    }
    report.min_series_margin = std::min(report.min_series_margin, pt.series_margin);
    report.max_route_discrepancy =
        std::max(report.max_route_discrepancy, std::abs(pt.margin - pt.series_margin));
    report.all_positive = report.all_positive && pt.margin > 0.0;
    report.series_all_positive = report.series_all_positive && pt.series_margin > 0.0;
  }
  return report;
}

}  // namespace zpower
