#pragma once

#include <span>

#include "qbm/types.hpp"

namespace qbm {

// Phase-space coordinates are interleaved: (X_1, P_1, X_2, P_2, ...).
// Oscillators are numbered from 0 in this API.
class PhaseSpaceLayout {
 public:
  explicit PhaseSpaceLayout(int oscillators);

  int oscillators() const { return n_; }
  int dimension() const { return 2 * n_; }
  static int x_index(int r) { return 2 * r; }
  static int p_index(int r) { return 2 * r + 1; }

 private:
  int n_;
};

Matrix symplectic_form(const PhaseSpaceLayout& layout);

// Form of the partial transpose that flips P_r for every r in `subset`
// (non-empty and not every oscillator):
// Lambda * Omega * Lambda.
Matrix partial_transpose_form(const PhaseSpaceLayout& layout,
                              std::span<const int> subset);

// Smallest eigenvalue of the Hermitian matrix V + (i/2) * form.
double min_ppt_eigenvalue(const Matrix& covariance, const Matrix& form);

double min_hermitian_eigenvalue(const CMatrix& m);

// Sorted symplectic eigenvalues of a positive-definite covariance.
Vector symplectic_eigenvalues(const Matrix& covariance);

// Throws std::invalid_argument if `m` is not square of size `dim` or is not
// symmetric to `tol` relative to its largest entry.
void require_symmetric(const Matrix& m, Eigen::Index dim, const char* what,
                       double tol = 1e-10);

// Throws std::invalid_argument if V + (i/2) Omega has an eigenvalue below -tol.
void require_physical(const Matrix& covariance, double tol = 1e-9);

// Two-oscillator centre-of-mass / relative coordinates
// (X+, P+, X-, P-) = T (X1, P1, X2, P2) with X+- = (X1 +- X2)/2 and
// P+- = P1 +- P2. T is canonical.
Matrix plus_minus_transform();

// T V T^T for a 4x4 covariance-like matrix.
Matrix to_plus_minus(const Matrix& v);

}  // namespace qbm
