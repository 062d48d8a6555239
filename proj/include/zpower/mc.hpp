#pragma once

// Monte Carlo rejection rates for the Z and Cauchy tests, for comparison
// with the closed-form power functions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "zpower/cauchy.hpp"
#include "zpower/error.hpp"
#include "zpower/random.hpp"
#include "zpower/ztest.hpp"

namespace zpower {

struct SimulationSpec {
  std::variant<ZTestConfig, CauchyTestConfig> cfg;
  double true_param = 0.0;  // mu for the Z test, m for Cauchy
  std::int64_t reps = 1;
  std::uint64_t seed = 0;
  Sidedness sidedness = Sidedness::kOneSided;
};

struct SimulationResult {
  std::int64_t rejections = 0;
  std::int64_t reps = 0;
  double rate = 0.0;
  double analytic_power = 0.0;
  double std_error = 0.0;  // sqrt(p (1 - p) / reps) at the analytic power

  /// (rate - analytic) / std_error; 0 when both the error and gap vanish.
  double z_score() const {
    const double gap = rate - analytic_power;
    if (std_error > 0.0) return gap / std_error;
    return gap == 0.0 ? 0.0 : std::copysign(INFINITY, gap);
  }
};

// Replications are split into fixed-size chunks, chunk k drawing from
// substream (seed, k). Counts therefore do not depend on the thread count.
inline constexpr std::int64_t kChunkReps = 1 << 13;
inline constexpr std::int64_t kMaxReps = std::int64_t{1} << 40;

namespace detail {

inline std::int64_t simulate_chunk(const ZTestConfig& cfg, double mu, Sidedness side,
                                   std::uint64_t seed, std::uint64_t chunk, std::int64_t reps) {
  Xoshiro256 rng(seed, chunk);
  NormalSampler normal;
  const double threshold = one_sided_threshold(cfg);
  const double half_width = two_sided_half_width(cfg);
  std::int64_t hits = 0;
  for (std::int64_t r = 0; r < reps; ++r) {
    double sum = 0.0;
    for (std::int64_t i = 0; i < cfg.n; ++i) sum += mu + cfg.sigma * normal(rng);
    const double mean = sum / static_cast<double>(cfg.n);
    // Same comparisons as decide_one_sided / decide_two_sided, with the
    // critical values hoisted out of the loop.
    const bool reject = side == Sidedness::kOneSided ? mean > threshold
                                                     : std::abs(mean - cfg.mu0) > half_width;
    hits += reject ? 1 : 0;
  }
  return hits;
}

inline std::int64_t simulate_chunk(const CauchyTestConfig& cfg, double m, Sidedness side,
                                   std::uint64_t seed, std::uint64_t chunk, std::int64_t reps) {
  Xoshiro256 rng(seed, chunk);
  std::int64_t hits = 0;
  for (std::int64_t r = 0; r < reps; ++r) {
    const double x = m + sample_cauchy(rng);
    const bool reject = side == Sidedness::kOneSided ? cauchy_reject_one_sided(cfg, x)
                                                     : cauchy_reject_two_sided(cfg, x);
    hits += reject ? 1 : 0;
  }
  return hits;
}

}  // namespace detail

inline SimulationResult simulate(const SimulationSpec& spec, unsigned threads = 0) {
  detail::require(spec.reps >= 1, "simulate: reps must be >= 1");
  detail::require(spec.reps <= kMaxReps, "simulate: reps exceeds 2^40");
  detail::require(std::isfinite(spec.true_param), "simulate: true parameter must be finite");

  double analytic = 0.0;
  std::visit(
      [&](const auto& cfg) {
        using T = std::decay_t<decltype(cfg)>;
        if constexpr (std::is_same_v<T, ZTestConfig>) {
          cfg.validate();
          analytic = power(cfg, spec.true_param, spec.sidedness);
        } else {
          detail::require(cfg.alpha > 0.0 && cfg.alpha < 1.0,
                          "simulate: Cauchy alpha must lie in (0, 1)");
          analytic = spec.sidedness == Sidedness::kOneSided
                         ? cauchy_power_one_sided(cfg, spec.true_param)
                         : cauchy_power_two_sided(cfg, spec.true_param);
        }
      },
      spec.cfg);

  const std::int64_t chunks = (spec.reps + kChunkReps - 1) / kChunkReps;
  std::vector<std::int64_t> hits(static_cast<std::size_t>(chunks), 0);
  auto run_chunk = [&](std::int64_t k) {
    const std::int64_t reps = std::min(kChunkReps, spec.reps - k * kChunkReps);
    hits[static_cast<std::size_t>(k)] = std::visit(
        [&](const auto& cfg) {
          return detail::simulate_chunk(cfg, spec.true_param, spec.sidedness, spec.seed,
                                        static_cast<std::uint64_t>(k), reps);
        },
        spec.cfg);
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::int64_t>(threads, chunks));
  if (threads <= 1) {
    for (std::int64_t k = 0; k < chunks; ++k) run_chunk(k);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::int64_t k = w; k < chunks; k += threads) run_chunk(k);
      });
  }

  SimulationResult res;
  res.reps = spec.reps;
  for (std::int64_t h : hits) res.rejections += h;
  res.rate = static_cast<double>(res.rejections) / static_cast<double>(res.reps);
  res.analytic_power = analytic;
  res.std_error = std::sqrt(analytic * (1.0 - analytic) / static_cast<double>(res.reps));
  return res;
}

}  // namespace zpower
