#include <doctest.h>

#include <cmath>

#include "qbm/quadrature.hpp"
#include "qbm/types.hpp"

using namespace qbm;

TEST_CASE("gauss-kronrod integrates smooth functions to tolerance") {
  const double pts[] = {0.0, kPi};
  CHECK(quad::integrate([](double x) { return std::sin(x); }, pts) ==
        doctest::Approx(2.0).epsilon(1e-13));
  const double g[] = {-8.0, 0.0, 8.0};
  CHECK(quad::integrate([](double x) { return std::exp(-x * x); }, g) ==
        doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
}

TEST_CASE("vector integrand components converge independently") {
  const double pts[] = {0.0, 1.0, 3.0};
  const auto r = quad::integrate(
      [](double x, Eigen::Ref<Eigen::ArrayXd> out) {
        out(0) = x * x;
        out(1) = std::cos(40.0 * x);
        out(2) = 1e-9 * std::exp(x);
      },
      3, pts);
  CHECK(r.converged);
  CHECK(r.value(0) == doctest::Approx(9.0).epsilon(1e-13));
  CHECK(r.value(1) == doctest::Approx(std::sin(120.0) / 40.0).epsilon(1e-10));
  CHECK(r.value(2) == doctest::Approx(1e-9 * (std::exp(3.0) - 1.0)).epsilon(1e-9));
}

TEST_CASE("threaded panels give identical results") {
  const auto pts = quad::panel_breakpoints(0.0, 50.0, 40);
  auto f = [](double x, Eigen::Ref<Eigen::ArrayXd> out) {
    out(0) = std::cos(3.0 * x) * std::exp(-0.1 * x);
    out(1) = std::sin(x * x / 40.0);
  };
  quad::Options one, four;
  four.threads = 4;
  const auto a = quad::integrate(f, 2, pts, one);
  const auto b = quad::integrate(f, 2, pts, four);
  CHECK(a.value(0) == b.value(0));
  CHECK(a.value(1) == b.value(1));
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("non-convergence is reported") {
  quad::Options opt;
  opt.max_depth = 2;
  opt.relative = 1e-15;
  opt.absolute = 0.0;
  const double pts[] = {0.0, 1.0};
  CHECK_THROWS_AS(
      quad::integrate([](double x) { return std::sin(1.0 / (x + 1e-3)); }, pts, opt),
      NumericError);
}

TEST_CASE("panel breakpoints merge extra points") {
  const double extra[] = {0.25, 0.5, 2.0};
  const auto pts = quad::panel_breakpoints(0.0, 1.0, 2, extra);
  REQUIRE(pts.size() == 4);
  CHECK(pts[0] == 0.0);
  CHECK(pts[1] == 0.25);
  CHECK(pts[2] == 0.5);
  CHECK(pts[3] == 1.0);
  CHECK_THROWS_AS(quad::panel_breakpoints(1.0, 1.0, 2), std::invalid_argument);
}
