#pragma once

#include <span>
#include <string>
#include <vector>

#include "qbm/model.hpp"

namespace qbm {

// Finite set of bath oscillators approximating a spectral density.
// Frequencies w_i = (i - 1/2) dw (i = 1..M, dw = w_max / M), the midpoints of
// bins tiling [0, w_max]; couplings are chosen so that c_i^2 / (2 m_i w_i)
// equals the integral of I over the bin.
struct DiscreteBath {
  Vector frequencies;
  Vector couplings;
  Vector masses;
  double spacing = 0.0;
  std::vector<std::string> warnings;

  int size() const { return static_cast<int>(frequencies.size()); }
  double damping_kernel(double s) const;
  double noise_kernel(double temperature, double s) const;
  // Beyond this time the discrete kernels revive and no longer track the
  // continuum.
  double recurrence_time() const { return 2.0 * kPi / spacing; }
};

DiscreteBath discretize_bath(const SpectralDensity& density, int modes,
                             double omega_max);

// System plus discrete bath evolved exactly as one quadratic Hamiltonian.
// Layout: system coordinates first (as in the propagator), then (q_i, p_i).
// With a renormalized model the counterterm uses the continuum G(0), so the
// system frequencies mean the same thing as in the propagator.
class ClosedSystem {
 public:
  ClosedSystem(const ModelSpec& model, DiscreteBath bath);

  int system_dimension() const { return 2 * n_; }
  int dimension() const { return static_cast<int>(generator_.rows()); }
  const Matrix& generator() const { return generator_; }
  const DiscreteBath& bath() const { return bath_; }

  // System covariance joined with the bath's thermal state.
  Matrix initial_covariance(const Matrix& system_covariance) const;

  // Full covariance exp(A t) V exp(A t)^T; throws NumericError beyond the
  // recurrence time.
  Matrix evolve(const Matrix& full_covariance, double t) const;

  // System block of the covariance at each (ascending) time. The transfer
  // matrix is advanced by composing exponentials of the time increments.
  std::vector<Matrix> evolve_system(const Matrix& full_covariance,
                                    std::span<const double> times) const;

 private:
  void check_time(double t) const;

  int n_;
  double temperature_;
  DiscreteBath bath_;
  Matrix generator_;
};

Matrix reduced_covariance(const Matrix& full_covariance, int system_dimension);

}  // namespace qbm
