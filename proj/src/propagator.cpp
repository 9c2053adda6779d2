#include "qbm/propagator.hpp"

#include <cmath>
#include <string>

#include "qbm/phase_space.hpp"

namespace qbm {

Matrix transition_matrix(const HomogeneousSolution::Sample& s,
                         const Vector& masses) {
  const Eigen::Index n = masses.size();
  Matrix r(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index q = 0; q < n; ++q) {
      r(2 * i, 2 * q) = s.vdot(i, q);
      r(2 * i, 2 * q + 1) = s.v(i, q) / masses[q];
      r(2 * i + 1, 2 * q) = masses[i] * s.vddot(i, q);
      r(2 * i + 1, 2 * q + 1) = masses[i] * s.vdot(i, q) / masses[q];
    }
  }
  return r;
}

Propagator::Propagator(ModelSpec model, double t_max, PropagatorOptions options)
    : model_(std::move(model)), options_(options) {
  model_.validate();
  solution_ = solve_homogeneous(model_, t_max, options_.homogeneous);
}

Propagator::Propagator(ModelSpec model, std::span<const double> grid,
                       PropagatorOptions options)
    : model_(std::move(model)), options_(options) {
  model_.validate();
  solution_ = solve_homogeneous(model_, grid, options_.homogeneous);
}

Matrix Propagator::transition(double t) const {
  return transition_matrix(solution_.sample(t), model_.masses);
}

PropagatorPair Propagator::evaluate(double t) const {
  const double times[1] = {t};
  return evaluate(std::span<const double>(times, 1)).front();
}

std::vector<PropagatorPair> Propagator::evaluate(
    std::span<const double> times) const {
  const std::vector<Matrix> s =
      diffusion_matrices(model_, solution_, times, options_.diffusion);
  std::vector<PropagatorPair> out(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    out[j].t = times[j];
    out[j].R = transition(times[j]);
    out[j].S = s[j];
  }
  return out;
}

std::vector<double> uniform_grid(double t_max, int points) {
  if (points < 2) throw std::invalid_argument("grid needs at least 2 points");
  if (!(t_max > 0.0)) throw std::invalid_argument("grid end must be > 0");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = t_max * i / (points - 1);
  g.back() = t_max;
  return g;
}

Matrix evolve_covariance(const Matrix& v0, const PropagatorPair& pair) {
  require_symmetric(v0, pair.R.rows(), "initial covariance");
  return pair.R * v0 * pair.R.transpose() + pair.S;
}

namespace {

// Fourth-order finite-difference derivative on a uniform grid.
template <class Get>
Matrix derivative(std::size_t i, std::size_t n, double h, Get f) {
  if (i >= 2 && i + 2 < n) {
    return (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2)) / (12.0 * h);
  }
  if (i < 2) {
    const std::size_t b = 0;
    const double c0[5] = {-25, 48, -36, 16, -3};
    const double c1[5] = {-3, -10, 18, -6, 1};
    const double* c = i == 0 ? c0 : c1;
    Matrix d = c[0] * f(b);
    for (int k = 1; k < 5; ++k) d += c[k] * f(b + k);
    return d / (12.0 * h);
  }
  const std::size_t b = n - 5;
  const double c4[5] = {3, -16, 36, -48, 25};
  const double c3[5] = {-1, 6, -18, 10, 3};
  const double* c = i == n - 1 ? c4 : c3;
  Matrix d = c[0] * f(b);
  for (int k = 1; k < 5; ++k) d += c[k] * f(b + k);
  return d / (12.0 * h);
}

double uniform_spacing(std::span<const double> t) {
  const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs(t[i] - t[i - 1] - h) > 1e-9 * h) {
      throw std::invalid_argument("coefficient grid must be uniform");
    }
  }
  return h;
}

}  // namespace

std::vector<MasterCoefficients> master_coefficients(
    std::span<const PropagatorPair> pairs) {
  const std::size_t n = pairs.size();
  if (n < 5) throw std::invalid_argument("need at least 5 grid points");
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = pairs[i].t;
  const double h = uniform_spacing(t);
  std::vector<MasterCoefficients> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Matrix rdot =
        derivative(i, n, h, [&](std::size_t k) -> const Matrix& { return pairs[k].R; });
    const Matrix sdot =
        derivative(i, n, h, [&](std::size_t k) -> const Matrix& { return pairs[k].S; });
    Eigen::FullPivLU<Matrix> lu(pairs[i].R);
    if (!lu.isInvertible() || std::abs(lu.rcond()) < 1e-13) {
      throw NumericError("transition matrix is singular at t = " +
                         std::to_string(pairs[i].t));
    }
    const Matrix a = rdot * lu.inverse();
    const Matrix as = a * pairs[i].S;
    out[i].t = pairs[i].t;
    out[i].drift = a;
    out[i].diffusion = 0.5 * sdot - 0.5 * (as + as.transpose());
  }
  return out;
}

Matrix integrate_master_equation(std::span<const MasterCoefficients> coeffs,
                                 const Matrix& v0) {
  const std::size_t n = coeffs.size();
  if (n < 4) throw std::invalid_argument("need at least 4 coefficient points");
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = coeffs[i].t;
  const double h = uniform_spacing(t);
  require_symmetric(v0, coeffs[0].drift.rows(), "initial covariance");

  auto rhs = [](const Matrix& a, const Matrix& d, const Matrix& v) -> Matrix {
    return a * v + v * a.transpose() + 2.0 * d;
  };
  // Cubic interpolation to the midpoint of [t_i, t_i+1].
  auto midpoint = [&](std::size_t i, auto member) -> Matrix {
    std::size_t b;
    double w[4];
    if (i == 0) {
      b = 0;
      w[0] = 5.0 / 16; w[1] = 15.0 / 16; w[2] = -5.0 / 16; w[3] = 1.0 / 16;
    } else if (i + 2 >= n) {
      b = n - 4;
      w[0] = 1.0 / 16; w[1] = -5.0 / 16; w[2] = 15.0 / 16; w[3] = 5.0 / 16;
    } else {
      b = i - 1;
      w[0] = -1.0 / 16; w[1] = 9.0 / 16; w[2] = 9.0 / 16; w[3] = -1.0 / 16;
    }
    Matrix m = w[0] * (coeffs[b].*member);
    for (int k = 1; k < 4; ++k) m += w[k] * (coeffs[b + k].*member);
    return m;
  };

  Matrix v = v0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Matrix am = midpoint(i, &MasterCoefficients::drift);
    const Matrix dm = midpoint(i, &MasterCoefficients::diffusion);
    const Matrix k1 = rhs(coeffs[i].drift, coeffs[i].diffusion, v);
    const Matrix k2 = rhs(am, dm, v + 0.5 * h * k1);
    const Matrix k3 = rhs(am, dm, v + 0.5 * h * k2);
    const Matrix k4 = rhs(coeffs[i + 1].drift, coeffs[i + 1].diffusion, v + h * k3);
    v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return v;
}

}  // namespace qbm
