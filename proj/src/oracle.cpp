#include "qbm/oracle.hpp"

#include <cmath>
#include <map>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "qbm/phase_space.hpp"
#include "qbm/quadrature.hpp"

namespace qbm {

double DiscreteBath::damping_kernel(double s) const {
  double sum = 0.0;
  for (int i = 0; i < size(); ++i) {
    const double w = frequencies[i];
    sum += couplings[i] * couplings[i] / (2.0 * masses[i] * w * w) *
           std::cos(w * s);
  }
  return sum;
}

double DiscreteBath::noise_kernel(double temperature, double s) const {
  double sum = 0.0;
  for (int i = 0; i < size(); ++i) {
    const double w = frequencies[i];
    const double coth =
        temperature > 0.0 ? 1.0 / std::tanh(w / (2.0 * temperature)) : 1.0;
    sum += couplings[i] * couplings[i] / (2.0 * masses[i] * w) * coth *
           std::cos(w * s);
  }
  return sum;
}

DiscreteBath discretize_bath(const SpectralDensity& density, int modes,
                             double omega_max) {
  density.validate();
  if (modes < 10) throw std::invalid_argument("bath needs at least 10 modes");
  if (!(omega_max >= 5.0 * density.cutoff * (1.0 - 1e-12))) {
    throw std::invalid_argument(
        "bath frequency range must reach at least 5 times the cutoff");
  }
  DiscreteBath bath;
  bath.spacing = omega_max / modes;
  bath.frequencies.resize(modes);
  bath.couplings.resize(modes);
  bath.masses = Vector::Ones(modes);
  quad::Options opt;
  opt.relative = 1e-12;
  opt.absolute = 0.0;
  for (int i = 0; i < modes; ++i) {
    const double w = bath.spacing * (i + 0.5);
    const double lo = w - 0.5 * bath.spacing, hi = w + 0.5 * bath.spacing;
    const double pts[2] = {lo, hi};
    const double weight =
        density.gamma == 0.0
            ? 0.0
            : quad::integrate([&](double x) { return density(x); }, pts, opt);
    bath.frequencies[i] = w;
    bath.couplings[i] = std::sqrt(2.0 * bath.masses[i] * w * weight);
  }
  if (bath.spacing > density.gamma && density.gamma > 0.0) {
    bath.warnings.push_back("bath frequency spacing " +
                            std::to_string(bath.spacing) +
                            " exceeds the damping rate " +
                            std::to_string(density.gamma));
  }
  return bath;
}

ClosedSystem::ClosedSystem(const ModelSpec& model, DiscreteBath bath)
    : n_(model.size()), temperature_(model.temperature), bath_(std::move(bath)) {
  model.validate();
  const int m = bath_.size();
  const int d = 2 * n_ + 2 * m;
  // Hessian of H = P^2/2M + M W^2 X^2/2 + sum (p^2/2m + m w^2 q^2/2)
  //            + sum_i c_i q_i (w . X) + counterterm (w . X)^2.
  Matrix hess = Matrix::Zero(d, d);
  const double counter =
      model.renormalized ? damping_kernel(model.density, 0.0) : 0.0;
  for (int r = 0; r < n_; ++r) {
    hess(2 * r, 2 * r) += model.masses[r] * std::pow(model.frequencies[r], 2);
    hess(2 * r + 1, 2 * r + 1) = 1.0 / model.masses[r];
    for (int q = 0; q < n_; ++q) {
      hess(2 * r, 2 * q) += 2.0 * counter * model.weights[r] * model.weights[q];
    }
    for (int i = 0; i < m; ++i) {
      const int qi = 2 * n_ + 2 * i;
      hess(2 * r, qi) = bath_.couplings[i] * model.weights[r];
      hess(qi, 2 * r) = hess(2 * r, qi);
    }
  }
  for (int i = 0; i < m; ++i) {
    const int qi = 2 * n_ + 2 * i;
    hess(qi, qi) = bath_.masses[i] * std::pow(bath_.frequencies[i], 2);
    hess(qi + 1, qi + 1) = 1.0 / bath_.masses[i];
  }
  generator_ = symplectic_form(PhaseSpaceLayout(n_ + m)) * hess;
}

Matrix ClosedSystem::initial_covariance(const Matrix& system_covariance) const {
  require_symmetric(system_covariance, 2 * n_, "initial covariance");
  const int d = dimension();
  Matrix v = Matrix::Zero(d, d);
  v.topLeftCorner(2 * n_, 2 * n_) = system_covariance;
  for (int i = 0; i < bath_.size(); ++i) {
    const double w = bath_.frequencies[i], mi = bath_.masses[i];
    const double coth =
        temperature_ > 0.0 ? 1.0 / std::tanh(w / (2.0 * temperature_)) : 1.0;
    const int qi = 2 * n_ + 2 * i;
    v(qi, qi) = coth / (2.0 * mi * w);
    v(qi + 1, qi + 1) = 0.5 * mi * w * coth;
  }
  return v;
}

void ClosedSystem::check_time(double t) const {
  if (t < 0.0) throw std::invalid_argument("time must be >= 0");
  if (t > bath_.recurrence_time()) {
    throw NumericError("time " + std::to_string(t) +
                       " exceeds the bath recurrence time " +
                       std::to_string(bath_.recurrence_time()));
  }
}

Matrix ClosedSystem::evolve(const Matrix& full, double t) const {
  require_symmetric(full, dimension(), "closed-system covariance");
  check_time(t);
  const Matrix e = (generator_ * t).exp();
  return e * full * e.transpose();
}

std::vector<Matrix> ClosedSystem::evolve_system(
    const Matrix& full, std::span<const double> times) const {
  require_symmetric(full, dimension(), "closed-system covariance");
  const int s = system_dimension();
  std::map<long long, Matrix> cache;
  Matrix rows = Matrix::Identity(dimension(), dimension()).topRows(s);
  double now = 0.0;
  std::vector<Matrix> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t < now) throw std::invalid_argument("times must be ascending");
    check_time(t);
    const double dt = t - now;
    if (dt > 0.0) {
      // Reuse the exponential for repeated increments (uniform grids).
      const long long key = std::llround(dt * 1e12);
      auto it = cache.find(key);
      if (it == cache.end()) {
        it = cache.emplace(key, (generator_ * dt).exp()).first;
      }
      rows = rows * it->second;
      now = t;
    }
    out.push_back(rows * full * rows.transpose());
  }
  return out;
}

Matrix reduced_covariance(const Matrix& full, int system_dimension) {
  if (system_dimension < 2 || system_dimension % 2 != 0 ||
      system_dimension > full.rows()) {
    throw std::invalid_argument("invalid system dimension");
  }
  return full.topLeftCorner(system_dimension, system_dimension);
}

}  // namespace qbm
