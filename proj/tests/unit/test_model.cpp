#include <doctest.h>

#include <cmath>

#include "qbm/model.hpp"

using namespace qbm;

namespace {

SpectralDensity ohmic(double gamma, double cutoff) {
  SpectralDensity d;
  d.gamma = gamma;
  d.cutoff = cutoff;
  return d;
}

// Composite trapezoid on a fine uniform grid, independent of the adaptive
// quadrature used by the library.
template <class F>
double trapezoid(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double sum = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) sum += f(a + i * h);
  return sum * h;
}

}  // namespace

TEST_CASE("spectral density normalization") {
  const auto d = ohmic(0.1, 5.0);
  CHECK(d(2.0) == doctest::Approx(0.1 / kPi * 2.0 * std::exp(-4.0 / 25.0)));
  CHECK(d.over_omega(0.0) == doctest::Approx(0.1 / kPi));
  CHECK(d(-1.0) == 0.0);
  CHECK(d.integration_limit() == 30.0);
  CHECK(damping_kernel(d, d.kernel_support()) / damping_kernel(d, 0.0) < 1e-18);
  auto bad = d;
  bad.gamma = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = d;
  bad.cutoff = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("Ohmic kernels match their closed forms") {
  const double g = 0.05, cut = 40.0;
  const auto d = ohmic(g, cut);
  for (double s : {0.0, 0.01, 0.03, 0.05, 0.1}) {
    const double env = std::exp(-cut * cut * s * s / 4.0);
    const double damping = g * cut / (2.0 * std::sqrt(kPi)) * env;
    const double dissipation =
        -g * cut * cut * cut * s / (4.0 * std::sqrt(kPi)) * env;
    CHECK(damping_kernel(d, s) == doctest::Approx(damping).epsilon(1e-11));
    CHECK(dissipation_kernel(d, s) ==
          doctest::Approx(dissipation).epsilon(1e-10).scale(1e-12));
  }
}

TEST_CASE("dissipation kernel agrees with a brute-force trapezoid") {
  const auto d = ohmic(0.2, 200.0);
  for (double s : {0.002, 0.005, 0.01}) {
    const double top = d.integration_limit();
    const double ref = trapezoid(
        [&](double w) { return -d(w) * std::sin(w * s); }, 0.0, top, 400000);
    CHECK(dissipation_kernel(d, s) == doctest::Approx(ref).epsilon(1e-8));
  }
}

TEST_CASE("kernel symmetries") {
  const auto d = ohmic(0.3, 8.0);
  CHECK(dissipation_kernel(d, 0.0) == 0.0);
  for (double s : {0.05, 0.2, 0.7}) {
    CHECK(dissipation_kernel(d, -s) == doctest::Approx(-dissipation_kernel(d, s)));
    CHECK(noise_kernel(d, 0.4, -s) == doctest::Approx(noise_kernel(d, 0.4, s)));
    // eta = d/ds of the damping kernel
    const double h = 1e-4;
    const double fd = (damping_kernel(d, s + h) - damping_kernel(d, s - h)) / (2 * h);
    CHECK(dissipation_kernel(d, s) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("zero coupling gives zero kernels") {
  ModelSpec m;
  m.masses = Vector::Ones(2);
  m.frequencies = Vector{{1.0, 0.8}};
  m.weights = Vector::Ones(2);
  m.density = ohmic(0.0, 10.0);
  m.temperature = 1.0;
  CHECK(dissipation_kernel(m, 0.3).norm() == 0.0);
  CHECK(noise_kernel(m, 0.3).norm() == 0.0);
}

TEST_CASE("shared bath kernels factor through the weights") {
  const auto m = two_oscillator_model({0.38, 0.7, 1.0}, 0.05, 10.0);
  const Matrix nu = noise_kernel(m, 0.2);
  CHECK(nu(0, 0) == nu(0, 1));
  CHECK(nu(0, 0) == nu(1, 1));
  const Matrix eta = dissipation_kernel(m, 0.2);
  CHECK(eta(0, 0) == eta(1, 0));

  ModelSpec w = m;
  w.weights = Vector{{1.0, -0.5}};
  const Matrix k = noise_kernel(w, 0.1);
  const double scalar = noise_kernel(w.density, w.temperature, 0.1);
  CHECK((k - scalar * w.coupling_matrix()).norm() < 1e-15 * std::abs(scalar));
}

TEST_CASE("noise kernel at zero lag is positive semidefinite") {
  for (double gamma : {0.01, 0.1}) {
    for (double cut : {2.0, 20.0}) {
      for (double temp : {0.0, 0.2, 5.0}) {
        auto m = two_oscillator_model({0.2, 1.0, 1.0}, gamma, cut);
        m.temperature = temp;
        m.weights = Vector{{1.0, 0.3}};
        Eigen::SelfAdjointEigenSolver<Matrix> es(noise_kernel(m, 0.0));
        CHECK(es.eigenvalues().minCoeff() > -1e-14);
      }
    }
  }
}

TEST_CASE("high-temperature noise kernel approaches the classical limit") {
  // coth(w/2T) -> 2T/w, so nu(s) -> 2T G(s).
  const auto d = ohmic(0.05, 10.0);
  const double temp = 50.0;
  for (double s : {0.0, 0.05, 0.1}) {
    const double classical = 2.0 * temp * damping_kernel(d, s);
    CHECK(noise_kernel(d, temp, s) == doctest::Approx(classical).epsilon(0.05));
  }
}

TEST_CASE("zero temperature uses the vacuum noise") {
  const auto d = ohmic(0.1, 3.0);
  CHECK(noise_density(d, 0.0, 1.5) == d(1.5));
  CHECK(noise_density(d, 1e-9, 1.5) == doctest::Approx(d(1.5)));
  CHECK(noise_density(d, 0.5, 0.0) == doctest::Approx(2.0 * 0.5 * d.over_omega(0.0)));
}

TEST_CASE("two-oscillator parameters") {
  const auto e = expand_params({0.38, 0.7, 2.0});
  CHECK(e.omega1 * e.omega1 + e.omega2 * e.omega2 == doctest::Approx(4.0));
  CHECK((e.omega1 * e.omega1 - e.omega2 * e.omega2) / 4.0 == doctest::Approx(0.38));
  CHECK(e.temperature == doctest::Approx(1.4));
  CHECK_THROWS_AS(expand_params({1.0, 0.1, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(expand_params({0.1, -0.1, 1.0}), std::invalid_argument);

  const auto m = two_oscillator_model({0.02, 0.21, 1.0}, 0.05, 20.0);
  CHECK(m.size() == 2);
  CHECK(m.masses == Vector::Ones(2));
  CHECK(m.weights == Vector::Ones(2));
  CHECK(m.temperature == doctest::Approx(0.21));
  CHECK(m.renormalized);
  m.validate();

  auto bad = m;
  bad.frequencies(1) = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = m;
  bad.masses = Vector::Ones(3);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
