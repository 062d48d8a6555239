#pragma once

// Subcommands of the zpower command-line tool. Kept in a header so the test
// suites can drive them in-process with string streams.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zpower/zpower.hpp"

namespace zpower::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kVerificationFailed = 2, kNumericalFailure = 3 };

/// Numbers in tables use 10 significant digits.
inline std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct OutputTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row) {
    if (row.size() != header.size()) throw InvalidArgument("OutputTable: row width mismatch");
    rows.push_back(std::move(row));
  }

  void write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt_num(row[i]);
      os << '\n';
    }
  }
};

/// Resolves --output: "stdout" (or empty) writes to the given stream,
/// anything else is a file path.
class OutputSink {
 public:
  OutputSink(const std::string& target, std::ostream& fallback) : stream_(&fallback) {
    if (!target.empty() && target != "stdout") {
      file_ = std::make_unique<std::ofstream>(target, std::ios::binary);
      if (!*file_) throw InvalidArgument("cannot open output file: " + target);
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

inline Sidedness parse_sidedness(const std::string& s) {
  if (s == "one" || s == "one-sided") return Sidedness::kOneSided;
  if (s == "two" || s == "two-sided") return Sidedness::kTwoSided;
  throw InvalidArgument("sidedness must be 'one' or 'two', got '" + s + "'");
}

struct Figure1Options {
  double alpha = 0.05, sigma = 1.0, mu0 = 0.0, mu_min = -2.0, mu_max = 2.0;
  std::int64_t n = 10;
  int steps = 401;
  std::string output = "stdout";
};

inline OutputTable figure1_table(const Figure1Options& o) {
  const ZTestConfig cfg{o.mu0, o.sigma, o.n, o.alpha};
  const PowerCurve curve = power_curve(cfg, o.mu_min, o.mu_max, o.steps);
  OutputTable t{{"mu", "power_one_sided", "power_two_sided"}, {}};
  for (const auto& r : curve.rows) t.add_row({r.mu, r.power_one_sided, r.power_two_sided});
  return t;
}

struct VerifyOptions {
  // Test sizes; the reduced alpha of the dominance inequality is half of these.
  double size_min = 0.01, size_max = 0.99, size_step = 0.01;
  double x_min = 1e-3, x_max = 10.0, x_step = 0.02;
  int per_decade = 50;
  double quad_tol = 1e-12;
  unsigned threads = 0;
  std::string output = "stdout";
};

/// Route agreement threshold used by `verify`: 100 quadrature tolerances.
inline double route_threshold(double quad_tol) { return 100.0 * quad_tol; }

inline int run_verify(const VerifyOptions& o, std::ostream& out) {
  const std::vector<double> xs = mixed_x_grid(o.x_min, o.x_max, o.per_decade, o.x_step);
  const std::vector<double> alphas =
      alpha_grid(0.5 * o.size_min, 0.5 * o.size_max, 0.5 * o.size_step);
  const DominanceReport rep = verify_grid(xs, alphas, o.quad_tol, o.threads);
  const DominancePoint& worst = rep.grid[rep.min_index];
  const double threshold = route_threshold(o.quad_tol);
  const bool routes_agree = rep.max_route_discrepancy <= threshold;

  out << "grid_points: " << rep.grid.size() << " (" << xs.size() << " x values, "
      << alphas.size() << " reduced alpha values)\n";
  out << "min_margin: " << fmt_num(rep.min_margin) << " at x=" << fmt_num(worst.x)
      << " reduced_alpha=" << fmt_num(worst.alpha) << " (size " << fmt_num(2.0 * worst.alpha)
      << ")\n";
  out << "min_series_margin: " << fmt_num(rep.min_series_margin) << "\n";
  out << "max_route_discrepancy: " << fmt_num(rep.max_route_discrepancy)
      << " (threshold " << fmt_num(threshold) << ")\n";
  out << "proof1_sufficient reduced_alpha=0.025: "
      << (proof1_sufficient_condition(0.025) ? "yes" : "no") << "\n";
  out << "proof1_sufficient reduced_alpha=0.49: "
      << (proof1_sufficient_condition(0.49) ? "yes" : "no") << "\n";
  out << "proof1_threshold_reduced_alpha: " << fmt_num(proof1_threshold()) << "\n";

  std::size_t sufficient = 0;
  for (double a : alphas) sufficient += proof1_sufficient_condition(a) ? 1 : 0;
  out << "proof1_sufficient_on_grid: " << sufficient << " of " << alphas.size() << "\n";

  const bool ok = rep.all_positive && rep.series_all_positive && routes_agree;
  out << "all_positive: " << (rep.all_positive ? "true" : "false") << "\n";
  out << "series_all_positive: " << (rep.series_all_positive ? "true" : "false") << "\n";
  out << "result: " << (ok ? "VERIFIED" : "FAILED") << "\n";
  return ok ? kOk : kVerificationFailed;
}

struct CauchyOptions {
  std::vector<double> alphas{0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9};
  double m_min = 0.25, m_max = 5.0, m_step = 0.25;
  std::string output = "stdout";
};

inline OutputTable cauchy_table(const CauchyOptions& o) {
  detail::require(o.m_min > 0.0 && o.m_min <= o.m_max && o.m_step > 0.0,
                  "cauchy: need 0 < m-min <= m-max and m-step > 0");
  OutputTable t{{"alpha", "m", "margin", "power1", "power2"}, {}};
  const auto count = static_cast<long>(std::floor((o.m_max - o.m_min) / o.m_step + 1e-9));
  for (double a : o.alphas) {
    const CauchyTestConfig cfg = CauchyTestConfig::make(a);
    for (long k = 0; k <= count; ++k) {
      const double m = o.m_min + o.m_step * static_cast<double>(k);
      t.add_row({a, m, cauchy_analog_margin(a, m), cauchy_power_one_sided(cfg, m),
                 cauchy_power_two_sided(cfg, m)});
    }
  }
  return t;
}

struct SimulateOptions {
  std::string dist = "normal";
  double alpha = 0.05, sigma = 1.0, mu0 = 0.0, mu = 0.0, m = 0.0;
  std::int64_t n = 10, reps = 100000;
  std::uint64_t seed = 20240101;
  std::string sidedness = "one";
  unsigned threads = 0;
  std::string output = "stdout";
};

inline SimulationSpec simulation_spec(const SimulateOptions& o) {
  SimulationSpec spec;
  spec.reps = o.reps;
  spec.seed = o.seed;
  spec.sidedness = parse_sidedness(o.sidedness);
  if (o.dist == "normal") {
    spec.cfg = ZTestConfig{o.mu0, o.sigma, o.n, o.alpha};
    spec.true_param = o.mu;
  } else if (o.dist == "cauchy") {
    spec.cfg = CauchyTestConfig::make(o.alpha);
    spec.true_param = o.m;
  } else {
    throw InvalidArgument("dist must be 'normal' or 'cauchy', got '" + o.dist + "'");
  }
  return spec;
}

inline OutputTable simulate_table(const SimulateOptions& o) {
  const SimulationResult r = simulate(simulation_spec(o), o.threads);
  OutputTable t{{"reps", "rejections", "rate", "analytic_power", "std_error", "z_score"}, {}};
  t.add_row({static_cast<double>(r.reps), static_cast<double>(r.rejections), r.rate,
             r.analytic_power, r.std_error, r.z_score()});
  return t;
}

struct SampleSizeOptions {
  double alpha = 0.05, sigma = 1.0, mu0 = 0.0, mu_alt = 0.5, power = 0.8;
  std::string sidedness = "one";
};

inline std::int64_t sample_size(const SampleSizeOptions& o) {
  return required_sample_size(
      {o.mu0, o.sigma, o.alpha, o.mu_alt, o.power, parse_sidedness(o.sidedness)});
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Power functions and one- vs two-sided dominance checks for the Z test"};
  app.require_subcommand(1);

  Figure1Options fig;
  auto* figure1 = app.add_subcommand("figure1", "Power curves of both tests as CSV");
  figure1->add_option("--alpha", fig.alpha, "Test size")->capture_default_str();
  figure1->add_option("--n", fig.n, "Sample size")->capture_default_str();
  figure1->add_option("--sigma", fig.sigma, "Population standard deviation")->capture_default_str();
  figure1->add_option("--mu0", fig.mu0, "Null mean")->capture_default_str();
  figure1->add_option("--mu-min", fig.mu_min)->capture_default_str();
  figure1->add_option("--mu-max", fig.mu_max)->capture_default_str();
  figure1->add_option("--steps", fig.steps, "Grid points, endpoints included")->capture_default_str();
  figure1->add_option("--output", fig.output, "File path or 'stdout'")->capture_default_str();

  VerifyOptions ver;
  auto* verify = app.add_subcommand(
      "verify",
      "Check one-sided power > two-sided power on a grid. --alpha-* take the test size; "
      "the reduced inequality is evaluated at half of it.");
  verify->add_option("--alpha-min", ver.size_min, "Smallest test size")->capture_default_str();
  verify->add_option("--alpha-max", ver.size_max, "Largest test size")->capture_default_str();
  verify->add_option("--alpha-step", ver.size_step, "Test size step")->capture_default_str();
  verify->add_option("--x-min", ver.x_min, "Smallest standardized shift")->capture_default_str();
  verify->add_option("--x-max", ver.x_max, "Largest standardized shift")->capture_default_str();
  verify->add_option("--x-step", ver.x_step, "Linear step above x = 1")->capture_default_str();
  verify->add_option("--x-per-decade", ver.per_decade, "Log points per decade below x = 1")
      ->capture_default_str();
  verify->add_option("--quad-tol", ver.quad_tol,
                     "Quadrature tolerance; routes must agree within 100x this")
      ->capture_default_str();
  verify->add_option("--threads", ver.threads, "Worker threads (0 = all cores)");
  verify->add_option("--output", ver.output, "File path or 'stdout'")->capture_default_str();

  CauchyOptions cau;
  auto* cauchy = app.add_subcommand("cauchy", "Cauchy one- vs two-sided margin table as CSV");
  cauchy->add_option("--alpha", cau.alphas, "Test sizes")->delimiter(',')->capture_default_str();
  cauchy->add_option("--m-min", cau.m_min)->capture_default_str();
  cauchy->add_option("--m-max", cau.m_max)->capture_default_str();
  cauchy->add_option("--m-step", cau.m_step)->capture_default_str();
  cauchy->add_option("--output", cau.output, "File path or 'stdout'")->capture_default_str();

  SimulateOptions sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo rejection rate vs exact power");
  simulate_cmd->add_option("--dist", sim.dist, "normal | cauchy")->capture_default_str();
  simulate_cmd->add_option("--alpha", sim.alpha, "Test size")->capture_default_str();
  simulate_cmd->add_option("--n", sim.n, "Sample size (normal only)")->capture_default_str();
  simulate_cmd->add_option("--sigma", sim.sigma)->capture_default_str();
  simulate_cmd->add_option("--mu0", sim.mu0)->capture_default_str();
  simulate_cmd->add_option("--mu", sim.mu, "True mean (normal)")->capture_default_str();
  simulate_cmd->add_option("--m", sim.m, "True location (cauchy)")->capture_default_str();
  simulate_cmd->add_option("--reps", sim.reps)->capture_default_str();
  simulate_cmd->add_option("--seed", sim.seed)->capture_default_str();
  simulate_cmd->add_option("--sidedness", sim.sidedness, "one | two")->capture_default_str();
  simulate_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");
  simulate_cmd->add_option("--output", sim.output, "File path or 'stdout'")->capture_default_str();

  SampleSizeOptions ss;
  auto* sample = app.add_subcommand("sample-size", "Smallest n reaching a target power");
  sample->add_option("--alpha", ss.alpha, "Test size")->capture_default_str();
  sample->add_option("--sigma", ss.sigma)->capture_default_str();
  sample->add_option("--mu0", ss.mu0)->capture_default_str();
  sample->add_option("--mu-alt", ss.mu_alt, "Alternative mean")->capture_default_str();
  sample->add_option("--power", ss.power, "Target power")->capture_default_str();
  sample->add_option("--sidedness", ss.sidedness, "one | two")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*figure1) {
      OutputSink sink(fig.output, out);
      figure1_table(fig).write_csv(sink.get());
    } else if (*verify) {
      OutputSink sink(ver.output, out);
      return run_verify(ver, sink.get());
    } else if (*cauchy) {
      OutputSink sink(cau.output, out);
      cauchy_table(cau).write_csv(sink.get());
      for (double a : cau.alphas) {
        if (a != 0.5) continue;
        const double eq = cauchy_analog_margin(0.5, 2.0);
        err << "# equality cell alpha=0.5 m=2: margin=" << fmt_num(eq)
            << (std::abs(eq) <= 1e-12 ? " (equal powers)" : " (NOT equal)") << "\n";
      }
    } else if (*simulate_cmd) {
      OutputSink sink(sim.output, out);
      simulate_table(sim).write_csv(sink.get());
    } else if (*sample) {
      out << sample_size(ss) << "\n";
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kOk;
}

}  // namespace zpower::cli
