#pragma once

#include <span>

#include "qbm/model.hpp"
#include "qbm/propagator.hpp"
#include "qbm/uncertainty.hpp"

namespace qbm {

// Two unit-weight oscillators with equal masses and local Ohmic damping.
struct CaseModel {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double gamma = 0.0;
  double mass = 1.0;

  void validate() const;
  double delta() const;              // (W1^2 - W2^2) / (W1^2 + W2^2)
  double detuning_squared() const;   // |W1^2 - W2^2|
  static CaseModel from(const ModelSpec& model);
};

// Homogeneous solution in the local damping limit, accurate to first order
// in gamma and valid for |delta| >= 1e-3. Matrices are 2x2 in the (X+, X-)
// basis unless stated otherwise.
class LocalLimitSolution {
 public:
  struct Values {
    Matrix v, vdot, vddot, vdddot;
  };

  explicit LocalLimitSolution(const CaseModel& model);

  Values plus_minus(double s) const;
  // Same solution expressed for (X1, X2).
  Values oscillators(double s) const;

  static constexpr double kMinDetuning = 1e-3;

 private:
  struct DampedTrig {
    double sin1 = 0.0, sin2 = 0.0, cos1 = 0.0, cos2 = 0.0;
  };
  double eval(const DampedTrig& f, double s, int derivative) const;

  CaseModel model_;
  DampedTrig pp_, pm_, mm_;
};

// Stationary diffusion in (X+, P+, X-, P-) coordinates for late times.
struct AsymptoticDiffusion {
  double xx_plus = 0.0, pp_plus = 0.0, xx_minus = 0.0, pp_minus = 0.0;
};

// Frequency integrals against the Ohmic Gaussian-cutoff noise density.
AsymptoticDiffusion asymptotic_diffusion(const CaseModel& model,
                                         double temperature, double cutoff);

// Leading order as gamma -> 0: both sectors carry the same thermal occupation.
AsymptoticDiffusion weak_damping_diffusion(const CaseModel& model,
                                           double temperature);

// High-temperature early-time area bounds (closed forms).
AreaSet high_temperature_area_bounds(const CaseModel& model, double temperature,
                                     double t);

struct HighTemperatureFit {
  double t_lo = 0.0, t_hi = 0.0;
  int points = 0;
  bool inconclusive = false;
  // X+ with P- area: log-log slope and coefficient with the slope fixed at 8.
  double mixed_slope = 0.0;
  double mixed_coefficient = 0.0;
  double mixed_reference_coefficient = 0.0;   // 11 (gamma T)^2 D^4 / 256
  double mixed_white_noise_coefficient = 0.0; // (gamma T)^2 D^4 / 240
  // Geometric mean over the window of area(X+,P-) / area(X-,P+).
  double mixed_ratio = 0.0;
  // Log-log slope of the X-,P- diffusion area.
  double relative_slope = 0.0;
};

// Fits the early-time areas of the diffusion part of `pairs` (two
// oscillators) inside [t_lo, t_hi]. Non-positive t_hi means: use every time
// with t > 0.
HighTemperatureFit fit_high_temperature_regime(
    std::span<const PropagatorPair> pairs, const CaseModel& model,
    double temperature, double t_lo = 0.0, double t_hi = 0.0);

}  // namespace qbm
