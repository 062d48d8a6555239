#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "zpower/quadrature.hpp"

using Catch::Approx;
using namespace zpower;

TEST_CASE("Gauss-Kronrod integrates polynomials exactly", "[quadrature]") {
  // G7K15 is exact through degree 22; one panel suffices.
  auto poly = [](double x) { return 3 * std::pow(x, 10) - x * x + 1; };
  const auto r = integrate_adaptive(poly, -1.0, 2.0, 1e-12);
  const double exact = 3.0 / 11 * (std::pow(2.0, 11) + 1) - (8.0 + 1) / 3 + 3.0;
  CHECK(r.value == Approx(exact).epsilon(1e-14));
  CHECK(r.panels == 1);
}

TEST_CASE("adaptive refinement on a steep integrand", "[quadrature]") {
  auto steep = [](double x) { return std::exp(30.0 * x); };
  const auto r = integrate_adaptive(steep, 0.0, 1.0, 1e-6);
  CHECK(r.value == Approx(std::expm1(30.0) / 30.0).epsilon(1e-12));
  CHECK(r.panels > 1);
}

TEST_CASE("quadrature errors", "[quadrature]") {
  auto one = [](double) { return 1.0; };
  CHECK(integrate_adaptive(one, 1.0, 1.0, 1e-10).value == 0.0);
  CHECK_THROWS_AS(integrate_adaptive(one, 1.0, 0.0, 1e-10), InvalidArgument);
  CHECK_THROWS_AS(integrate_adaptive(one, 0.0, 1.0, 0.0), InvalidArgument);
  auto bad = [](double x) { return 1.0 / (x - 0.5) / 0.0; };
  CHECK_THROWS_AS(integrate_adaptive(bad, 0.0, 1.0, 1e-10), NumericalError);
  auto wild = [](double x) { return std::sin(1e6 * x); };
  CHECK_THROWS_AS(integrate_adaptive(wild, 0.0, 1.0, 1e-14, 64), NumericalError);
}
