#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace qbm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Raised when a numerical procedure cannot reach its accuracy target
// (non-convergent quadrature, singular propagator, recurrence exceeded).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qbm
