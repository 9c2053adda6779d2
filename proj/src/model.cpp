#include "qbm/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qbm/quadrature.hpp"

namespace qbm {

void SpectralDensity::validate() const {
  if (!std::isfinite(gamma) || gamma < 0.0) {
    throw std::invalid_argument("damping rate gamma must be >= 0");
  }
  if (!std::isfinite(cutoff) || cutoff <= 0.0) {
    throw std::invalid_argument("cutoff frequency must be > 0");
  }
  if (!std::isfinite(ref_frequency) || ref_frequency <= 0.0) {
    throw std::invalid_argument("reference frequency must be > 0");
  }
  if (!std::isfinite(exponent) || exponent < 0.0) {
    throw std::invalid_argument("spectral exponent must be >= 0");
  }
  if (!std::isfinite(mass) || mass <= 0.0) {
    throw std::invalid_argument("spectral density mass must be > 0");
  }
}

double SpectralDensity::over_omega(double omega) const {
  if (omega < 0.0 || gamma == 0.0) return 0.0;
  const double shape =
      exponent == 0.0 ? 1.0 : std::pow(omega / ref_frequency, exponent);
  return mass * gamma / kPi * shape *
         std::exp(-(omega * omega) / (cutoff * cutoff));
}

double SpectralDensity::operator()(double omega) const {
  if (omega <= 0.0) return 0.0;
  return omega * over_omega(omega);
}

double SpectralDensity::kernel_support() const {
  if (exponent != 0.0) return std::numeric_limits<double>::infinity();
  // exp(-cutoff^2 s^2 / 4) < exp(-45)
  return 2.0 * std::sqrt(45.0) / cutoff;
}

double noise_density(const SpectralDensity& density, double temperature,
                     double omega) {
  if (omega <= 0.0) {
    if (omega == 0.0 && temperature > 0.0) {
      return 2.0 * temperature * density.over_omega(0.0);
    }
    return 0.0;
  }
  if (temperature <= 0.0) return density(omega);
  const double x = omega / (2.0 * temperature);
  const double x_coth = x < 1e-4 ? 1.0 + x * x / 3.0 : x / std::tanh(x);
  return density.over_omega(omega) * 2.0 * temperature * x_coth;
}

void ModelSpec::validate() const {
  density.validate();
  const Eigen::Index n = frequencies.size();
  if (n < 1) throw std::invalid_argument("model needs at least one oscillator");
  if (masses.size() != n) {
    throw std::invalid_argument("masses must have one entry per oscillator");
  }
  if (weights.size() != n) {
    throw std::invalid_argument("weights must have one entry per oscillator");
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    if (!(masses[r] > 0.0) || !std::isfinite(masses[r])) {
      throw std::invalid_argument("mass " + std::to_string(r + 1) +
                                  " must be > 0");
    }
    if (!(frequencies[r] > 0.0) || !std::isfinite(frequencies[r])) {
      throw std::invalid_argument("frequency " + std::to_string(r + 1) +
                                  " must be > 0");
    }
    if (!std::isfinite(weights[r])) {
      throw std::invalid_argument("weight " + std::to_string(r + 1) +
                                  " is not finite");
    }
  }
  if (!std::isfinite(temperature) || temperature < 0.0) {
    throw std::invalid_argument("temperature must be >= 0");
  }
}

Matrix ModelSpec::coupling_matrix() const {
  return weights * weights.transpose();
}

namespace {

template <class F>
double frequency_integral(const SpectralDensity& density, double s, F f) {
  const double top = density.integration_limit();
  const int panels = 8 + static_cast<int>(std::ceil(top * std::abs(s) / kPi));
  const auto pts = quad::panel_breakpoints(0.0, top, panels);
  quad::Options opt;
  opt.relative = 1e-12;
  opt.absolute = 1e-15 * density.mass * std::max(density.gamma, 1e-300) *
                 density.cutoff * density.cutoff;
  return quad::integrate(f, pts, opt);
}

}  // namespace

double damping_kernel(const SpectralDensity& density, double s) {
  if (density.gamma == 0.0) return 0.0;
  return frequency_integral(density, s, [&](double w) {
    return density.over_omega(w) * std::cos(w * s);
  });
}

double dissipation_kernel(const SpectralDensity& density, double s) {
  if (density.gamma == 0.0 || s == 0.0) return 0.0;
  return frequency_integral(density, s, [&](double w) {
    return -density(w) * std::sin(w * s);
  });
}

double noise_kernel(const SpectralDensity& density, double temperature,
                    double s) {
  if (density.gamma == 0.0) return 0.0;
  return frequency_integral(density, s, [&](double w) {
    return noise_density(density, temperature, w) * std::cos(w * s);
  });
}

Matrix dissipation_kernel(const ModelSpec& model, double s) {
  return dissipation_kernel(model.density, s) * model.coupling_matrix();
}

Matrix noise_kernel(const ModelSpec& model, double s) {
  return noise_kernel(model.density, model.temperature, s) *
         model.coupling_matrix();
}

ExpandedParams expand_params(const TwoOscillatorParams& params) {
  if (!(params.delta > -1.0 && params.delta < 1.0)) {
    throw std::invalid_argument("detuning delta must lie in (-1, 1)");
  }
  if (!(params.theta >= 0.0) || !std::isfinite(params.theta)) {
    throw std::invalid_argument("temperature theta must be >= 0");
  }
  if (!(params.scale > 0.0)) {
    throw std::invalid_argument("frequency scale must be > 0");
  }
  ExpandedParams out;
  out.omega1 = params.scale * std::sqrt(0.5 * (1.0 + params.delta));
  out.omega2 = params.scale * std::sqrt(0.5 * (1.0 - params.delta));
  out.temperature = params.theta * params.scale;
  return out;
}

ModelSpec two_oscillator_model(const TwoOscillatorParams& params, double gamma,
                               double cutoff, bool renormalized) {
  const ExpandedParams e = expand_params(params);
  ModelSpec m;
  m.masses = Vector::Ones(2);
  m.frequencies = Vector(2);
  m.frequencies << e.omega1, e.omega2;
  m.weights = Vector::Ones(2);
  m.density.gamma = gamma;
  m.density.cutoff = cutoff;
  m.temperature = e.temperature;
  m.renormalized = renormalized;
  m.validate();
  return m;
}

}  // namespace qbm
