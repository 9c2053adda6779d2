#include "qbm/case_model.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "qbm/phase_space.hpp"
#include "qbm/quadrature.hpp"

namespace qbm {

void CaseModel::validate() const {
  if (!(omega1 > 0.0) || !(omega2 > 0.0)) {
    throw std::invalid_argument("oscillator frequencies must be > 0");
  }
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (!(mass > 0.0)) throw std::invalid_argument("mass must be > 0");
}

double CaseModel::delta() const {
  const double a = omega1 * omega1, b = omega2 * omega2;
  return (a - b) / (a + b);
}

double CaseModel::detuning_squared() const {
  return std::abs(omega1 * omega1 - omega2 * omega2);
}

CaseModel CaseModel::from(const ModelSpec& model) {
  model.validate();
  if (model.size() != 2) {
    throw std::invalid_argument("two-oscillator model required");
  }
  if (model.weights[0] != 1.0 || model.weights[1] != 1.0) {
    throw std::invalid_argument(
        "two-oscillator closed forms need unit coupling weights");
  }
  if (model.masses[0] != model.masses[1]) {
    throw std::invalid_argument("two-oscillator closed forms need equal masses");
  }
  if (model.density.exponent != 0.0) {
    throw std::invalid_argument("two-oscillator closed forms need an Ohmic bath");
  }
  if (!model.renormalized) {
    throw std::invalid_argument(
        "two-oscillator closed forms describe the renormalized model");
  }
  CaseModel cm;
  cm.omega1 = model.frequencies[0];
  cm.omega2 = model.frequencies[1];
  cm.gamma = model.density.gamma;
  cm.mass = model.masses[0];
  return cm;
}

LocalLimitSolution::LocalLimitSolution(const CaseModel& model) : model_(model) {
  model.validate();
  if (std::abs(model.delta()) < kMinDetuning) {
    throw std::invalid_argument(
        "closed-form solution needs |delta| >= 1e-3; use the numeric solver "
        "near resonance");
  }
  const double w1 = model.omega1, w2 = model.omega2, g = model.gamma;
  const double pref = 1.0 / (4.0 * w1 * w2 * (w2 * w2 - w1 * w1));
  const double sin1 = pref * w2 * (g * g - 2 * w1 * w1 + 2 * w2 * w2);
  const double sin2 = -pref * w1 * (g * g + 2 * w1 * w1 - 2 * w2 * w2);
  const double cosine = pref * 4.0 * g * w1 * w2;
  pp_ = {sin1, sin2, -cosine, cosine};
  pm_ = {1.0 / (2.0 * w1), -1.0 / (2.0 * w2), 0.0, 0.0};
  // The relative sector carries the opposite sign of the cosine terms; this
  // is what v(0) = 0 with v'(0) = 1 and the gamma -> 0 limit require.
  mm_ = {sin1, sin2, cosine, -cosine};
}

double LocalLimitSolution::eval(const DampedTrig& f, double s,
                                int derivative) const {
  // d/ds of e^{ls} (a sin ws + b cos ws) = e^{ls} ((l a - w b) sin + (l b + w a) cos)
  const double l = -0.5 * model_.gamma;
  double a1 = f.sin1, b1 = f.cos1, a2 = f.sin2, b2 = f.cos2;
  const double w1 = model_.omega1, w2 = model_.omega2;
  for (int k = 0; k < derivative; ++k) {
    const double na1 = l * a1 - w1 * b1, nb1 = l * b1 + w1 * a1;
    const double na2 = l * a2 - w2 * b2, nb2 = l * b2 + w2 * a2;
    a1 = na1;
    b1 = nb1;
    a2 = na2;
    b2 = nb2;
  }
  return std::exp(l * s) * (a1 * std::sin(w1 * s) + b1 * std::cos(w1 * s) +
                            a2 * std::sin(w2 * s) + b2 * std::cos(w2 * s));
}

LocalLimitSolution::Values LocalLimitSolution::plus_minus(double s) const {
  Values out;
  Matrix* slots[4] = {&out.v, &out.vdot, &out.vddot, &out.vdddot};
  for (int d = 0; d < 4; ++d) {
    Matrix m(2, 2);
    const double pm = eval(pm_, s, d);
    m << eval(pp_, s, d), pm, pm, eval(mm_, s, d);
    *slots[d] = m;
  }
  return out;
}

LocalLimitSolution::Values LocalLimitSolution::oscillators(double s) const {
  // X+- = T X with T = [[1/2, 1/2], [1/2, -1/2]]; v = T^-1 v+- T.
  Matrix t(2, 2), tinv(2, 2);
  t << 0.5, 0.5, 0.5, -0.5;
  tinv << 1.0, 1.0, 1.0, -1.0;
  Values pm = plus_minus(s);
  pm.v = tinv * pm.v * t;
  pm.vdot = tinv * pm.vdot * t;
  pm.vddot = tinv * pm.vddot * t;
  pm.vdddot = tinv * pm.vdddot * t;
  return pm;
}

AsymptoticDiffusion asymptotic_diffusion(const CaseModel& model,
                                         double temperature, double cutoff) {
  model.validate();
  if (!(model.gamma > 0.0)) {
    throw std::invalid_argument("asymptotic diffusion needs gamma > 0");
  }
  if (!(cutoff > 0.0)) throw std::invalid_argument("cutoff must be > 0");
  if (!(temperature >= 0.0)) {
    throw std::invalid_argument("temperature must be >= 0");
  }
  const double w1 = model.omega1, w2 = model.omega2, g = model.gamma;
  const double m = model.mass;
  auto coth_term = [&](double w) {
    if (temperature == 0.0) return 1.0;
    const double x = w / (2.0 * temperature);
    return x < 1e-8 ? 1.0 / x : 1.0 / std::tanh(x);
  };
  // Integrands carry one power of w; w coth(w/2T) stays finite at w = 0.
  auto f = [&](double w) {
    const double a = w * w - w1 * w1, b = w * w - w2 * w2;
    const double den = (2 * a * a + g * g * (w * w + w1 * w1)) *
                       (2 * b * b + g * g * (w * w + w2 * w2));
    return std::exp(-w * w / (cutoff * cutoff)) / den;
  };
  auto w_coth = [&](double w) {
    if (temperature == 0.0) return w;
    const double x = w / (2.0 * temperature);
    return x < 1e-4 ? 2.0 * temperature * (1.0 + x * x / 3.0)
                    : w * coth_term(w);
  };

  std::vector<double> extra;
  for (double c : {w1, w2}) {
    for (double k : {1.0, 3.0, 10.0, 30.0, 100.0}) {
      extra.push_back(c - k * g);
      extra.push_back(c + k * g);
    }
    extra.push_back(c);
  }
  const double top = 8.0 * cutoff;
  const auto pts = quad::panel_breakpoints(0.0, top, 64, extra);
  quad::VectorIntegrand integrand = [&](double w,
                                        Eigen::Ref<Eigen::ArrayXd> out) {
    const double sum = -2.0 * w * w + w1 * w1 + w2 * w2;
    const double base = w_coth(w) * f(w);
    out[0] = base * sum * sum;
    out[1] = base * w * w * sum * sum;
    out[2] = base;
    out[3] = base * w * w;
  };
  quad::Options opt;
  opt.relative = 1e-10;
  opt.absolute = 0.0;
  opt.max_depth = 60;
  const auto r = quad::integrate(integrand, 4, pts, opt);
  if (!r.converged) {
    throw NumericError("asymptotic diffusion quadrature did not converge");
  }
  const double d4 = std::pow(w1 * w1 - w2 * w2, 2);
  AsymptoticDiffusion s;
  s.xx_plus = g / (m * kPi) * r.value[0];
  s.pp_plus = 4.0 * m * g / kPi * r.value[1];
  s.xx_minus = g / (m * kPi) * d4 * r.value[2];
  s.pp_minus = 4.0 * m * g / kPi * d4 * r.value[3];
  return s;
}

AsymptoticDiffusion weak_damping_diffusion(const CaseModel& model,
                                           double temperature) {
  model.validate();
  auto coth_half = [&](double w) {
    return temperature == 0.0 ? 1.0 : 1.0 / std::tanh(w / (2.0 * temperature));
  };
  const double w1 = model.omega1, w2 = model.omega2, m = model.mass;
  AsymptoticDiffusion s;
  s.xx_plus = s.xx_minus =
      (coth_half(w1) / w1 + coth_half(w2) / w2) / (8.0 * m);
  s.pp_plus = s.pp_minus = 0.5 * m * (w1 * coth_half(w1) + w2 * coth_half(w2));
  return s;
}

AreaSet high_temperature_area_bounds(const CaseModel& model, double temperature,
                                     double t) {
  const double g = model.gamma;
  const double d2 = model.detuning_squared();
  const double gt2 = g * g * temperature * temperature;
  const double d4 = d2 * d2, d8 = d4 * d4;
  const double t4 = std::pow(t, 4), t8 = t4 * t4, t12 = t8 * t4;
  AreaSet a;
  a.xp_plus_plus = 0.25 * (1.0 - g * t + gt2 * t4);
  a.xp_minus_minus =
      0.25 * (1.0 - g * t + gt2 * d8 * t12 / (256.0 * 81.0 * 35.0));
  a.xp_plus_minus = 11.0 * gt2 * d4 * t8 / 256.0;
  a.xp_minus_plus = gt2 * d4 * t8 / 256.0;
  return a;
}

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

HighTemperatureFit fit_high_temperature_regime(
    std::span<const PropagatorPair> pairs, const CaseModel& model,
    double temperature, double t_lo, double t_hi) {
  model.validate();
  HighTemperatureFit fit;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  const double gt2 = std::pow(model.gamma * temperature, 2);
  const double d4 = std::pow(model.detuning_squared(), 2);
  fit.mixed_reference_coefficient = 11.0 * gt2 * d4 / 256.0;
  fit.mixed_white_noise_coefficient = gt2 * d4 / 240.0;

  std::vector<double> lt, lmixed, lrel;
  double log_ratio = 0.0, coef_log = 0.0;
  double lo_val = 0.0, hi_val = 0.0;
  for (const auto& p : pairs) {
    if (p.S.rows() != 4) {
      throw std::invalid_argument("high-temperature fit needs two oscillators");
    }
    if (!(p.t > 0.0) || p.t < t_lo) continue;
    if (t_hi > 0.0 && p.t > t_hi) continue;
    const Matrix w = to_plus_minus(p.S);
    const double mixed = w(0, 0) * w(3, 3) - w(0, 3) * w(0, 3);
    const double other = w(2, 2) * w(1, 1) - w(2, 1) * w(2, 1);
    const double rel = w(2, 2) * w(3, 3) - w(2, 3) * w(2, 3);
    if (!(mixed > 0.0) || !(other > 0.0) || !(rel > 0.0)) continue;
    const double lt_i = std::log(p.t);
    lt.push_back(lt_i);
    lmixed.push_back(std::log(mixed));
    lrel.push_back(std::log(rel));
    log_ratio += std::log(mixed / other);
    coef_log += std::log(mixed) - 8.0 * lt_i;
    if (lt.size() == 1) lo_val = mixed;
    hi_val = mixed;
  }
  fit.points = static_cast<int>(lt.size());
  if (fit.points > 0) {
    fit.t_lo = std::exp(lt.front());
    fit.t_hi = std::exp(lt.back());
  }
  if (fit.points < 4 || !(hi_val > 10.0 * lo_val)) {
    fit.inconclusive = true;
    if (fit.points < 2) return fit;
  }
  fit.mixed_slope = fit_slope(lt, lmixed);
  fit.relative_slope = fit_slope(lt, lrel);
  fit.mixed_coefficient = std::exp(coef_log / fit.points);
  fit.mixed_ratio = std::exp(log_ratio / fit.points);
  return fit;
}

}  // namespace qbm
