#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>
#include <vector>

#include "zpower/error.hpp"

namespace zpower {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t panels = 0;
  std::size_t evaluations = 0;
};

namespace detail {

// QUADPACK qk15 abscissae and weights. Index 7 is the centre node.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the 7-point rule, which uses the odd Kronrod nodes
// (indices 1, 3, 5) and the centre.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class Func>
QuadratureResult gauss_kronrod_15(const Func& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double f_centre = f(centre);
  double kronrod = f_centre * kKronrodWeights[7];
  double gauss = f_centre * kGaussWeights[3];
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double pair = f(centre - dx) + f(centre + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  QuadratureResult r;
  r.value = kronrod * half;
  r.error_estimate = std::abs((kronrod - gauss) * half);
  r.panels = 1;
  r.evaluations = 15;
  return r;
}

}  // namespace detail

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 0.0;
  std::size_t max_panels = 1u << 14;
};

/// Globally adaptive bisection: the panel with the largest error estimate is
/// split until the summed estimate drops below max(abs_tol, rel_tol |I|).
/// Throws NumericalError on a non-finite integrand or when max_panels is
/// reached without convergence.
template <class Func>
QuadratureResult integrate_adaptive(const Func& f, double a, double b,
                                    const QuadratureOptions& opt) {
  detail::require(std::isfinite(a) && std::isfinite(b) && a <= b,
                  "integrate_adaptive: need finite a <= b");
  detail::require(opt.abs_tol > 0.0 || opt.rel_tol > 0.0,
                  "integrate_adaptive: a positive tolerance is required");
  detail::require(opt.abs_tol >= 0.0 && opt.rel_tol >= 0.0,
                  "integrate_adaptive: tolerances must be non-negative");

  QuadratureResult total;
  if (a == b) return total;

  struct Panel {
    double lo, hi, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  auto evaluate = [&](double lo, double hi) {
    const QuadratureResult r = detail::gauss_kronrod_15(f, lo, hi);
    total.evaluations += r.evaluations;
    if (!std::isfinite(r.value) || !std::isfinite(r.error_estimate)) {
      std::ostringstream msg;
      msg << "integrate_adaptive: non-finite integrand on [" << lo << ", " << hi << "]";
      throw NumericalError(msg.str());
    }
    return Panel{lo, hi, r.value, r.error_estimate};
  };

  // Max-heap on error; panels too narrow to bisect are retired to `frozen`.
  std::vector<Panel> heap{evaluate(a, b)};
  double frozen_value = 0.0, frozen_error = 0.0;
  std::size_t frozen_panels = 0;
  auto sums = [&] {
    double v = frozen_value, e = frozen_error;
    for (const Panel& p : heap) {
      v += p.value;
      e += p.error;
    }
    return std::pair{v, e};
  };

  for (;;) {
    const auto [value, error] = sums();
    if (error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value)) || heap.empty()) {
      total.value = value;
      total.error_estimate = error;
      total.panels = heap.size() + frozen_panels;
      return total;
    }
    if (heap.size() + frozen_panels >= opt.max_panels) {
      std::ostringstream msg;
      msg << "integrate_adaptive: no convergence on [" << a << ", " << b << "] within "
          << opt.max_panels << " panels (error estimate " << error << ", abs_tol "
          << opt.abs_tol << ", rel_tol " << opt.rel_tol << ")";
      throw NumericalError(msg.str());
    }
    std::pop_heap(heap.begin(), heap.end());
    const Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(worst.lo < mid && mid < worst.hi)) {
      frozen_value += worst.value;
      frozen_error += worst.error;
      ++frozen_panels;
      continue;
    }
    for (const Panel& half : {evaluate(worst.lo, mid), evaluate(mid, worst.hi)}) {
      heap.push_back(half);
      std::push_heap(heap.begin(), heap.end());
    }
  }
}

/// Absolute-tolerance shorthand.
template <class Func>
QuadratureResult integrate_adaptive(const Func& f, double a, double b, double abs_tol,
                                    std::size_t max_panels = 1u << 14) {
  detail::require(abs_tol > 0.0, "integrate_adaptive: tolerance must be positive");
  return integrate_adaptive(f, a, b, QuadratureOptions{abs_tol, 0.0, max_panels});
}

}  // namespace zpower
