#pragma once

#include <span>
#include <vector>

#include "qbm/model.hpp"
#include "qbm/quadrature.hpp"

namespace qbm {

// Homogeneous solution of the renormalized memory equation
//   M v'' + M W0^2 v + 2 W int_0^t G(t-s) v'(s) ds = 0,  v(0) = 0, v'(0) = I,
// where W = w w^T. The bare model (renormalized == false) replaces W0^2 by
// W0^2 - 2 M^-1 W G(0).
enum class HomogeneousMethod {
  kNumeric,   // memory-kernel integration with Richardson extrapolation
  kAnalytic,  // closed form for two oscillators in the local damping limit
};

struct HomogeneousOptions {
  HomogeneousMethod method = HomogeneousMethod::kNumeric;
  // Node spacing is at most 2 pi / (points_per_period * max frequency).
  int points_per_period = 48;
  // Refinement stops when halving the base step changes v and v' by less
  // than this (relative to their largest magnitude on the grid).
  double tolerance = 1e-8;
  int max_refinements = 7;
  // If > 0, the node spacing is chosen to divide this value.
  double align_to = 0.0;
};

class HomogeneousSolution {
 public:
  struct Sample {
    Matrix v, vdot, vddot;
  };

  HomogeneousSolution() = default;
  HomogeneousSolution(double step, std::vector<Matrix> v,
                      std::vector<Matrix> vdot, std::vector<Matrix> vddot,
                      std::vector<Matrix> vdddot);

  double step() const { return step_; }
  std::size_t nodes() const { return v_.size(); }
  double end_time() const { return step_ * static_cast<double>(v_.size() - 1); }
  double time(std::size_t k) const { return step_ * static_cast<double>(k); }
  const Matrix& v(std::size_t k) const { return v_[k]; }
  const Matrix& vdot(std::size_t k) const { return vdot_[k]; }
  const Matrix& vddot(std::size_t k) const { return vddot_[k]; }
  const Matrix& vdddot(std::size_t k) const { return vdddot_[k]; }

  // Piecewise Hermite interpolation between nodes (exact on nodes).
  Sample sample(double t) const;
  // Index k with t == time(k) up to rounding, or -1.
  long node_index(double t) const;

 private:
  double step_ = 0.0;
  std::vector<Matrix> v_, vdot_, vddot_, vdddot_;
};

HomogeneousSolution solve_homogeneous(const ModelSpec& model, double t_end,
                                      const HomogeneousOptions& options = {});

// Validates a time grid (starts at 0, strictly increasing) and solves up to
// its last point, aligning nodes with the grid spacing when it is uniform.
HomogeneousSolution solve_homogeneous(const ModelSpec& model,
                                      std::span<const double> grid,
                                      HomogeneousOptions options = {});

enum class DiffusionMethod {
  // Trapezoid rule on a uniform frequency grid fine enough to resolve the
  // longest requested time, with the low-frequency end handled adaptively.
  kSpectral,
  // Adaptive Gauss-Kronrod over the whole frequency range (slower; kept as a
  // reference).
  kAdaptive,
};

struct DiffusionOptions {
  DiffusionMethod method = DiffusionMethod::kSpectral;
  quad::Options frequency{1e-15, 1e-10, 40, 1};
};

// S(t) for each requested time (ascending, within the solution's range).
std::vector<Matrix> diffusion_matrices(const ModelSpec& model,
                                       const HomogeneousSolution& solution,
                                       std::span<const double> times,
                                       const DiffusionOptions& options = {});

// Phase-space transition matrix built from v, v', v'' at one time.
Matrix transition_matrix(const HomogeneousSolution::Sample& sample,
                         const Vector& masses);

struct PropagatorPair {
  double t = 0.0;
  Matrix R;
  Matrix S;
};

struct PropagatorOptions {
  HomogeneousOptions homogeneous;
  DiffusionOptions diffusion;
};

class Propagator {
 public:
  Propagator(ModelSpec model, double t_max, PropagatorOptions options = {});
  // Covers the grid; nodes land on its points when it is uniform.
  Propagator(ModelSpec model, std::span<const double> grid,
             PropagatorOptions options = {});

  const ModelSpec& model() const { return model_; }
  const HomogeneousSolution& homogeneous() const { return solution_; }
  double t_max() const { return solution_.end_time(); }

  Matrix transition(double t) const;
  PropagatorPair evaluate(double t) const;
  // Times must be ascending; S is computed for all of them in one pass.
  std::vector<PropagatorPair> evaluate(std::span<const double> times) const;

 private:
  ModelSpec model_;
  PropagatorOptions options_;
  HomogeneousSolution solution_;
};

std::vector<double> uniform_grid(double t_max, int points);

// V_t = R V_0 R^T + S.
Matrix evolve_covariance(const Matrix& v0, const PropagatorPair& pair);

// Time-local generator d/dt V = A V + V A^T + 2 D reconstructed from (R, S)
// by finite differences: A = R' R^-1, D = S'/2 - sym(A S).
struct MasterCoefficients {
  double t = 0.0;
  Matrix drift;
  Matrix diffusion;
};

// Requires a uniform grid with at least five points.
std::vector<MasterCoefficients> master_coefficients(
    std::span<const PropagatorPair> pairs);

// Integrates the covariance equation across the coefficient grid with RK4
// and returns V at the last grid time.
Matrix integrate_master_equation(std::span<const MasterCoefficients> coeffs,
                                 const Matrix& v0);

}  // namespace qbm
