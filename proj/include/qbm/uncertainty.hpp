#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qbm/phase_space.hpp"
#include "qbm/propagator.hpp"

namespace qbm {

enum class BoundKind {
  kState,                     // -(i/2) R form R^T + S with form = Omega
  kFactorized,                // same with form = partial transpose
  kFactorizabilityNecessary,  // -(i/2)(R inner R^T - outer) + S
  kTripartiteSufficiency,     // -(i/2) R Omega R^T + S + (i/2) outer
};

struct BoundMatrix {
  double t = 0.0;
  BoundKind kind = BoundKind::kState;
  CMatrix matrix;
};

// -(i/2) R form R^T + S.
BoundMatrix state_bound(const PropagatorPair& pair, const Matrix& form,
                        BoundKind kind = BoundKind::kState);

// -(i/2)(R inner R^T - outer) + S.
BoundMatrix factorizability_condition(const PropagatorPair& pair,
                                      const Matrix& inner, const Matrix& outer);

// Smallest eigenvalue of V + (i/2) * partial transpose form.
double lambda_min(const Matrix& covariance, const Matrix& pt_form);

// Smallest eigenvalue of -(i/2)(R Omega R^T - pt_form) + S. Negative values
// mean some physical initial state is entangled at time t.
double lambda_bound(const PropagatorPair& pair, const Matrix& pt_form);

// Smallest eigenvalue of -(i/2)(R pt R^T - pt) + S. Negative values mean
// some factorized initial state is entangled at time t.
double lambda_tilde_bound(const PropagatorPair& pair, const Matrix& pt_form);

// Per-split bounds for three or more oscillators. `necessary` uses the
// matrix -(i/2)(R inner R^T - pt_i) + S with inner = pt_i unless given;
// `sufficiency` uses -(i/2) R Omega R^T + S + (i/2) pt_i.
struct TripartiteBounds {
  std::vector<double> necessary;
  std::vector<double> sufficiency;
  bool all_sufficiency_negative = false;
};

TripartiteBounds tripartite_bounds(const PropagatorPair& pair);
TripartiteBounds tripartite_bounds(const PropagatorPair& pair,
                                   const Matrix& inner);

// Uncertainty areas of the four conjugate pairs built from the centre-of-mass
// and relative coordinates of two oscillators.
struct AreaSet {
  double xp_plus_plus = 0.0;    // X+ with P+
  double xp_minus_minus = 0.0;  // X- with P-
  double xp_plus_minus = 0.0;   // X+ with P-
  double xp_minus_plus = 0.0;   // X- with P+
};

AreaSet area_functions(const Matrix& covariance);

// Lower bounds valid for every initial state, for weak Ohmic damping with
// rate gamma: conjugate pairs get e^{-gamma t}/4 plus the diffusion area;
// mixed pairs get the diffusion area alone.
AreaSet area_lower_bounds(const PropagatorPair& pair, double gamma);

struct WitnessCurve {
  std::vector<double> times;
  std::vector<double> values;

  void validate() const;
};

enum class CrossingStatus { kCrossed, kNoCrossing };

struct DisentanglementTime {
  CrossingStatus status = CrossingStatus::kNoCrossing;
  double time = 0.0;
  // Sign of the witness on the last grid point when there is no crossing.
  int final_sign = 0;
  int evaluations = 0;
};

// Evaluates the witness at several times at once.
using WitnessRefiner =
    std::function<std::vector<double>(std::span<const double> times)>;

// Time after which the witness stays non-negative on the grid: the last
// crossing from below, located by repeated k-section (k = sections) of the
// bracketing interval to `tolerance`, or by linear interpolation if no
// refiner is supplied.
DisentanglementTime disentanglement_time(const WitnessCurve& curve,
                                         const WitnessRefiner& refine = {},
                                         double tolerance = 0.0,
                                         int sections = 16);

}  // namespace qbm
