#pragma once

#include <cstddef>
#include <functional>
#include <vector>
#include <span>

#include <Eigen/Dense>

namespace qbm::quad {

struct Options {
  double absolute = 1e-13;
  double relative = 1e-10;
  int max_depth = 40;
  int threads = 1;
};

// f(x, out) must fill `out`, which is pre-sized to the integrand dimension.
using VectorIntegrand =
    std::function<void(double x, Eigen::Ref<Eigen::ArrayXd> out)>;

struct Result {
  Eigen::ArrayXd value;
  Eigen::ArrayXd error;
  std::size_t evaluations = 0;
  bool converged = true;
};

// Adaptive Gauss-Kronrod 10/21 quadrature of a vector-valued integrand over
// the panels [breakpoints[i], breakpoints[i+1]]. Each component must satisfy
// err_k <= max(absolute * width / total, relative * integral of |f_k|) on
// every accepted sub-panel. Panels are independent, so the result does not
// depend on the thread count.
Result integrate(const VectorIntegrand& f, Eigen::Index dimension,
                 std::span<const double> breakpoints,
                 const Options& options = {});

// Scalar convenience; throws NumericError if the tolerance is not reached.
double integrate(const std::function<double(double)>& f,
                 std::span<const double> breakpoints,
                 const Options& options = {});

// `panels` equal sub-intervals of [a, b] plus any extra interior points,
// sorted and deduplicated.
std::vector<double> panel_breakpoints(double a, double b, int panels,
                                      std::span<const double> extra = {});

}  // namespace qbm::quad
