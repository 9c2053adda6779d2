#pragma once

#include <vector>

#include "qbm/types.hpp"

namespace qbm {

// I(w) = (mass * gamma / pi) * w * (w / ref_frequency)^exponent
//        * exp(-w^2 / cutoff^2),
// normalized as I(w) = sum_i c_i^2 / (2 m_i w_i) delta(w - w_i).
// For exponent 0 the local (Markov) limit of the damping is gamma.
struct SpectralDensity {
  double gamma = 0.0;
  double cutoff = 1.0;
  double ref_frequency = 1.0;
  double exponent = 0.0;
  double mass = 1.0;

  void validate() const;
  double operator()(double omega) const;
  // I(w) / w, finite at w = 0 for exponent >= 0.
  double over_omega(double omega) const;
  // Upper limit of every frequency integral; the Gaussian factor there is
  // exp(-36).
  double integration_limit() const { return 6.0 * cutoff; }
  // Kernels vanish (below 1e-18 relative) beyond this lag when exponent == 0;
  // returns +inf otherwise.
  double kernel_support() const;
};

// I(w) coth(w / 2T); T = 0 means the vacuum.
double noise_density(const SpectralDensity& density, double temperature,
                     double omega);

struct ModelSpec {
  Vector masses;
  Vector frequencies;  // bare system frequencies
  Vector weights;      // coupling of oscillator r to the bath: w_r
  SpectralDensity density;
  double temperature = 0.0;
  // Include the counterterm so that `frequencies` are the renormalized ones.
  bool renormalized = true;

  int size() const { return static_cast<int>(frequencies.size()); }
  void validate() const;
  // w w^T
  Matrix coupling_matrix() const;
};

// Scalar kernels; the matrix kernels are these times w w^T.
//   damping     G(s)   = int I(w)/w cos(w s) dw
//   dissipation eta(s) = -int I(w) sin(w s) dw = G'(s)
//   noise       nu(s)  = int I(w) coth(w/2T) cos(w s) dw
double damping_kernel(const SpectralDensity& density, double s);
double dissipation_kernel(const SpectralDensity& density, double s);
double noise_kernel(const SpectralDensity& density, double temperature,
                    double s);
Matrix dissipation_kernel(const ModelSpec& model, double s);
Matrix noise_kernel(const ModelSpec& model, double s);

// Two oscillators parameterized by detuning delta = (W1^2 - W2^2)/(W1^2 + W2^2)
// and temperature theta = T / scale, with W1^2 + W2^2 = scale^2.
struct TwoOscillatorParams {
  double delta = 0.0;
  double theta = 0.0;
  double scale = 1.0;
};

struct ExpandedParams {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double temperature = 0.0;
};

ExpandedParams expand_params(const TwoOscillatorParams& params);

// Equal unit masses, unit weights, Ohmic Gaussian-cutoff bath.
ModelSpec two_oscillator_model(const TwoOscillatorParams& params, double gamma,
                               double cutoff, bool renormalized = true);

}  // namespace qbm
