#include "qbm/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace qbm {

PhaseSpaceLayout::PhaseSpaceLayout(int oscillators) : n_(oscillators) {
  if (oscillators < 1) {
    throw std::invalid_argument("number of oscillators must be at least 1");
  }
}

Matrix symplectic_form(const PhaseSpaceLayout& layout) {
  Matrix omega = Matrix::Zero(layout.dimension(), layout.dimension());
  for (int r = 0; r < layout.oscillators(); ++r) {
    omega(2 * r, 2 * r + 1) = 1.0;
    omega(2 * r + 1, 2 * r) = -1.0;
  }
  return omega;
}

Matrix partial_transpose_form(const PhaseSpaceLayout& layout,
                              std::span<const int> subset) {
  std::vector<bool> flipped(layout.oscillators(), false);
  Matrix omega = symplectic_form(layout);
  for (int r : subset) {
    if (r < 0 || r >= layout.oscillators()) {
      throw std::invalid_argument("partial transpose: oscillator index " +
                                  std::to_string(r) + " out of range");
    }
    omega(2 * r, 2 * r + 1) = -1.0;
    omega(2 * r + 1, 2 * r) = 1.0;
    flipped[r] = true;
  }
  const auto count = std::count(flipped.begin(), flipped.end(), true);
  if (count == 0 || count == layout.oscillators())
    throw std::invalid_argument(
        "partial transpose needs a non-empty proper subset of oscillators");
  return omega;
}

double min_hermitian_eigenvalue(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericError("Hermitian eigenvalue solver failed");
  }
  return es.eigenvalues()(0);
}

double min_ppt_eigenvalue(const Matrix& covariance, const Matrix& form) {
  require_symmetric(covariance, form.rows(), "covariance");
  CMatrix b = covariance.cast<Complex>();
  b += Complex(0.0, 0.5) * form.cast<Complex>();
  return min_hermitian_eigenvalue(b);
}

Vector symplectic_eigenvalues(const Matrix& covariance) {
  const Eigen::Index dim = covariance.rows();
  require_symmetric(covariance, dim, "covariance");
  if (dim % 2 != 0) throw std::invalid_argument("covariance has odd size");
  Eigen::SelfAdjointEigenSolver<Matrix> es(covariance);
  if (es.eigenvalues()(0) <= 0.0) {
    throw std::invalid_argument("covariance is not positive definite");
  }
  const Matrix root = es.operatorSqrt();
  const Matrix omega = symplectic_form(PhaseSpaceLayout(dim / 2));
  const CMatrix h = Complex(0.0, 1.0) * (root * omega * root).cast<Complex>();
  Eigen::SelfAdjointEigenSolver<CMatrix> hs(h, Eigen::EigenvaluesOnly);
  Vector nu = hs.eigenvalues().tail(dim / 2);
  return nu;
}

void require_symmetric(const Matrix& m, Eigen::Index dim, const char* what,
                       double tol) {
  if (m.rows() != dim || m.cols() != dim) {
    throw std::invalid_argument(std::string(what) + " must be " +
                                std::to_string(dim) + "x" +
                                std::to_string(dim));
  }
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + " has non-finite entries");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
    throw std::invalid_argument(std::string(what) + " is not symmetric");
  }
}

void require_physical(const Matrix& covariance, double tol) {
  const Eigen::Index dim = covariance.rows();
  if (dim % 2 != 0 || dim == 0) {
    throw std::invalid_argument("covariance must have even, nonzero size");
  }
  const Matrix omega = symplectic_form(PhaseSpaceLayout(dim / 2));
  const double lam = min_ppt_eigenvalue(covariance, omega);
  if (lam < -tol) {
    throw std::invalid_argument(
        "covariance violates the uncertainty principle: smallest eigenvalue "
        "of V + (i/2) Omega is " +
        std::to_string(lam));
  }
}

Matrix plus_minus_transform() {
  Matrix t(4, 4);
  t << 0.5, 0.0, 0.5, 0.0,
       0.0, 1.0, 0.0, 1.0,
       0.5, 0.0, -0.5, 0.0,
       0.0, 1.0, 0.0, -1.0;
  return t;
}

Matrix to_plus_minus(const Matrix& v) {
  if (v.rows() != 4 || v.cols() != 4) {
    throw std::invalid_argument("centre-of-mass transform needs a 4x4 matrix");
  }
  const Matrix t = plus_minus_transform();
  return t * v * t.transpose();
}

}  // namespace qbm
