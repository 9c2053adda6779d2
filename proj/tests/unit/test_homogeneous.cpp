#include <doctest.h>

#include <cmath>

#include "qbm/propagator.hpp"

using namespace qbm;

namespace {

ModelSpec single(double omega, double gamma, double cutoff) {
  ModelSpec m;
  m.masses = Vector::Ones(1);
  m.frequencies = Vector::Constant(1, omega);
  m.weights = Vector::Ones(1);
  m.density.gamma = gamma;
  m.density.cutoff = cutoff;
  return m;
}

double max_abs_diff(const HomogeneousSolution& a, const HomogeneousSolution& b,
                    double t_end, int samples) {
  double err = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double t = t_end * k / samples;
    err = std::max(err, (a.sample(t).v - b.sample(t).v).cwiseAbs().maxCoeff());
    err = std::max(err, (a.sample(t).vdot - b.sample(t).vdot).cwiseAbs().maxCoeff());
  }
  return err;
}

}  // namespace

TEST_CASE("undamped oscillators follow sin and cos") {
  auto m = two_oscillator_model({0.38, 0.0, 1.0}, 0.0, 10.0);
  const auto sol = solve_homogeneous(m, 30.0);
  auto check = [&](double t, double tol_v, double tol_a) {
    const auto s = sol.sample(t);
    for (int r = 0; r < 2; ++r) {
      const double w = m.frequencies(r);
      CHECK(std::abs(s.v(r, r) - std::sin(w * t) / w) < tol_v);
      CHECK(std::abs(s.vdot(r, r) - std::cos(w * t)) < tol_v);
      CHECK(std::abs(s.vddot(r, r) + w * std::sin(w * t)) < tol_a);
    }
    CHECK(std::abs(s.v(0, 1)) < 1e-14);
  };
  // Nodes come from the exact free step; between nodes v and v' use quintic
  // and v'' cubic Hermite interpolation.
  for (std::size_t k : {std::size_t{0}, std::size_t{1}, sol.nodes() / 2}) check(sol.time(k), 1e-12, 1e-12);
  check(sol.end_time(), 1e-12, 1e-12);
  for (double t : {1.3, 7.7, 21.05}) check(t, 1e-8, 1e-5);
}

TEST_CASE("initial conditions and node access") {
  const auto sol = solve_homogeneous(single(1.0, 0.1, 5.0), 4.0);
  CHECK(sol.v(0).norm() == 0.0);
  CHECK(sol.vdot(0) == Matrix::Identity(1, 1));
  CHECK(sol.end_time() >= 4.0);
  const long k = sol.node_index(sol.time(7));
  CHECK(k == 7);
  CHECK(sol.node_index(0.5 * (sol.time(3) + sol.time(4))) == -1);
  CHECK(sol.sample(sol.time(5)).v == sol.v(5));
}

TEST_CASE("refinement converges") {
  const auto m = two_oscillator_model({0.38, 0.7, 1.0}, 0.05, 10.0);
  HomogeneousOptions loose, tight;
  loose.tolerance = 1e-5;
  tight.tolerance = 1e-10;
  const auto a = solve_homogeneous(m, 20.0, loose);
  const auto b = solve_homogeneous(m, 20.0, tight);
  CHECK(max_abs_diff(a, b, 20.0, 97) < 1e-5);

  HomogeneousOptions starved;
  starved.tolerance = 1e-14;
  starved.max_refinements = 1;
  CHECK_THROWS_AS(solve_homogeneous(m, 20.0, starved), NumericError);
}

TEST_CASE("grid-aligned nodes") {
  const auto m = two_oscillator_model({0.1, 0.5, 1.0}, 0.02, 10.0);
  const auto grid = uniform_grid(5.0, 11);
  const auto sol = solve_homogeneous(m, grid);
  for (double t : grid) CHECK(sol.node_index(t) >= 0);
  const double bad[] = {0.0, 2.0, 1.0};
  CHECK_THROWS_AS(solve_homogeneous(m, bad), std::invalid_argument);
  const double late[] = {0.5, 1.0};
  CHECK_THROWS_AS(solve_homogeneous(m, late), std::invalid_argument);
}

TEST_CASE("damping decays the amplitude at the local rate") {
  // Weak Ohmic damping: |v| envelope ~ e^{-gamma t / 2}.
  const double g = 0.02;
  const auto sol = solve_homogeneous(single(1.0, g, 50.0), 100.0);
  const auto s = sol.sample(100.0);
  const double amp = std::hypot(s.v(0, 0), s.vdot(0, 0));
  CHECK(amp == doctest::Approx(std::exp(-0.5 * g * 100.0)).epsilon(0.02));
}

TEST_CASE("bare model equals a renormalized one with shifted frequency") {
  const double g = 0.05, cut = 4.0;
  auto bare = single(1.2, g, cut);
  bare.renormalized = false;
  const double shift = 2.0 * damping_kernel(bare.density, 0.0);
  auto ren = single(std::sqrt(1.44 - shift), g, cut);
  const auto a = solve_homogeneous(bare, 15.0);
  const auto b = solve_homogeneous(ren, 15.0);
  CHECK(max_abs_diff(a, b, 15.0, 61) < 1e-7);
}

TEST_CASE("local-limit closed form tracks the numeric solution") {
  const auto m = two_oscillator_model({0.38, 0.7, 1.0}, 0.002, 100.0);
  HomogeneousOptions analytic;
  analytic.method = HomogeneousMethod::kAnalytic;
  const auto a = solve_homogeneous(m, 200.0, analytic);
  const auto b = solve_homogeneous(m, 200.0);
  // Differences are first order in gamma.
  CHECK(max_abs_diff(a, b, 200.0, 199) < 5e-3);

  auto three = m;
  three.frequencies = Vector::Ones(3);
  three.masses = Vector::Ones(3);
  three.weights = Vector::Ones(3);
  CHECK_THROWS_AS(solve_homogeneous(three, 1.0, analytic), std::invalid_argument);
}
