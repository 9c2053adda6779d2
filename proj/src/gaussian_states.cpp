#include "qbm/gaussian_states.hpp"

#include <cmath>

namespace qbm {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

Matrix vacuum_covariance(const PhaseSpaceLayout& layout) {
  return 0.5 * Matrix::Identity(layout.dimension(), layout.dimension());
}

Matrix thermal_covariance(const PhaseSpaceLayout& layout, double nu) {
  if (!(nu >= 0.5)) {
    throw std::invalid_argument("thermal covariance needs nu >= 1/2");
  }
  return nu * Matrix::Identity(layout.dimension(), layout.dimension());
}

Matrix two_mode_squeezed_covariance(double r) {
  const PhaseSpaceLayout layout(2);
  const Matrix s = two_mode_squeezer(layout, 0, 1, r);
  return 0.5 * s * s.transpose();
}

Matrix factorized_squeezed_covariance(double r1, double r2) {
  Matrix v = Matrix::Zero(4, 4);
  v(0, 0) = 0.5 * std::exp(-2.0 * r1);
  v(1, 1) = 0.5 * std::exp(2.0 * r1);
  v(2, 2) = 0.5 * std::exp(-2.0 * r2);
  v(3, 3) = 0.5 * std::exp(2.0 * r2);
  return v;
}

namespace {

void check_mode(const PhaseSpaceLayout& layout, int r) {
  if (r < 0 || r >= layout.oscillators()) {
    throw std::invalid_argument("oscillator index out of range");
  }
}

}  // namespace

Matrix rotation(const PhaseSpaceLayout& layout, int r, double phi) {
  check_mode(layout, r);
  Matrix s = Matrix::Identity(layout.dimension(), layout.dimension());
  const int x = 2 * r, p = 2 * r + 1;
  s(x, x) = std::cos(phi);
  s(x, p) = std::sin(phi);
  s(p, x) = -std::sin(phi);
  s(p, p) = std::cos(phi);
  return s;
}

Matrix single_mode_squeezer(const PhaseSpaceLayout& layout, int r, double sq) {
  check_mode(layout, r);
  Matrix s = Matrix::Identity(layout.dimension(), layout.dimension());
  s(2 * r, 2 * r) = std::exp(-sq);
  s(2 * r + 1, 2 * r + 1) = std::exp(sq);
  return s;
}

Matrix beam_splitter(const PhaseSpaceLayout& layout, int r, int q,
                     double theta) {
  check_mode(layout, r);
  check_mode(layout, q);
  if (r == q) throw std::invalid_argument("beam splitter needs two modes");
  Matrix s = Matrix::Identity(layout.dimension(), layout.dimension());
  const double c = std::cos(theta), sn = std::sin(theta);
  for (int k = 0; k < 2; ++k) {
    const int a = 2 * r + k, b = 2 * q + k;
    s(a, a) = c;
    s(a, b) = sn;
    s(b, a) = -sn;
    s(b, b) = c;
  }
  return s;
}

Matrix two_mode_squeezer(const PhaseSpaceLayout& layout, int r, int q,
                         double sq) {
  check_mode(layout, r);
  check_mode(layout, q);
  if (r == q) throw std::invalid_argument("two-mode squeezer needs two modes");
  Matrix s = Matrix::Identity(layout.dimension(), layout.dimension());
  const double c = std::cosh(sq), sh = std::sinh(sq);
  const int xr = 2 * r, pr = 2 * r + 1, xq = 2 * q, pq = 2 * q + 1;
  s(xr, xr) = c;
  s(xr, xq) = sh;
  s(xq, xr) = sh;
  s(xq, xq) = c;
  s(pr, pr) = c;
  s(pr, pq) = -sh;
  s(pq, pr) = -sh;
  s(pq, pq) = c;
  return s;
}

Matrix random_symplectic(const PhaseSpaceLayout& layout, Rng& rng,
                         double max_squeeze) {
  if (!(max_squeeze >= 0.0)) {
    throw std::invalid_argument("max_squeeze must be non-negative");
  }
  const int n = layout.oscillators();
  Matrix s = Matrix::Identity(layout.dimension(), layout.dimension());
  auto rotate_all = [&] {
    for (int r = 0; r < n; ++r) {
      s = rotation(layout, r, rng.uniform(0.0, 2.0 * kPi)) * s;
    }
  };
  rotate_all();
  for (int r = 0; r < n; ++r) {
    s = single_mode_squeezer(layout, r, rng.uniform(0.0, max_squeeze)) * s;
  }
  rotate_all();
  for (int r = 0; r < n; ++r) {
    for (int q = r + 1; q < n; ++q) {
      s = two_mode_squeezer(layout, r, q, rng.uniform(0.0, max_squeeze)) * s;
      s = beam_splitter(layout, r, q, rng.uniform(0.0, 2.0 * kPi)) * s;
    }
  }
  rotate_all();
  return s;
}

Matrix random_pure_covariance(const PhaseSpaceLayout& layout, Rng& rng,
                              double max_squeeze) {
  const Matrix s = random_symplectic(layout, rng, max_squeeze);
  return 0.5 * s * s.transpose();
}

Matrix random_factorized_pure_covariance(const PhaseSpaceLayout& layout,
                                         Rng& rng, double max_squeeze) {
  Matrix s = Matrix::Identity(layout.dimension(), layout.dimension());
  for (int r = 0; r < layout.oscillators(); ++r) {
    s = rotation(layout, r, rng.uniform(0.0, 2.0 * kPi)) * s;
    s = single_mode_squeezer(layout, r, rng.uniform(0.0, max_squeeze)) * s;
    s = rotation(layout, r, rng.uniform(0.0, 2.0 * kPi)) * s;
  }
  return 0.5 * s * s.transpose();
}

}  // namespace qbm
