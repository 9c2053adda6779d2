#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qbm/propagator.hpp"

namespace qbm {
namespace {

// mu_k(theta) = int_0^1 x^k e^{i theta x} dx for k = 0..3.
void moments(double theta, Complex mu[4]) {
  const Complex it(0.0, theta);
  if (std::abs(theta) < 1.0) {
    for (int k = 0; k < 4; ++k) {
      Complex term = 1.0, sum = 0.0;
      for (int n = 0; n < 40; ++n) {
        const Complex add = term / static_cast<double>(n + k + 1);
        sum += add;
        if (std::abs(add) < 1e-18) break;
        term *= it / static_cast<double>(n + 1);
      }
      mu[k] = sum;
    }
    return;
  }
  const Complex e = std::exp(it);
  mu[0] = (e - 1.0) / it;
  for (int k = 1; k < 4; ++k) {
    mu[k] = (e - static_cast<double>(k) * mu[k - 1]) / it;
  }
}

// Integrals of the cubic Hermite basis against e^{i theta x} on [0, 1].
struct PanelWeights {
  Complex w00, w10, w01, w11;
};

PanelWeights hermite_weights(double theta) {
  Complex mu[4];
  moments(theta, mu);
  return {mu[0] - 3.0 * mu[2] + 2.0 * mu[3], mu[1] - 2.0 * mu[2] + mu[3],
          3.0 * mu[2] - 2.0 * mu[3], mu[3] - mu[2]};
}

// Node data for the two time integrals
//   g(w, t)  = int_0^t a(u) e^{iwu} du,   a  = v M^-1 w,
//   gd(w, t) = int_0^t a'(u) e^{iwu} du,  a' = v' M^-1 w,
// each approximated by piecewise cubic Hermite interpolation (Filon rule).
class FilonData {
 public:
  FilonData(const ModelSpec& model, const HomogeneousSolution& solution,
            std::span<const double> times)
      : n_(model.size()), h_(solution.step()) {
    const Vector mw = model.masses.cwiseInverse().cwiseProduct(model.weights);
    const std::size_t nodes = solution.nodes();
    a_.resize(nodes);
    da_.resize(nodes);
    dda_.resize(nodes);
    for (std::size_t k = 0; k < nodes; ++k) {
      a_[k] = solution.v(k) * mw;
      da_[k] = solution.vdot(k) * mw;
      dda_[k] = solution.vddot(k) * mw;
    }
    targets_.resize(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
      const long node = solution.node_index(times[j]);
      Target& tg = targets_[j];
      if (node >= 0) {
        tg.panels = static_cast<std::size_t>(node);
      } else {
        tg.panels = std::min<std::size_t>(
            static_cast<std::size_t>(std::floor(times[j] / h_)), nodes - 2);
        tg.partial = times[j] - h_ * static_cast<double>(tg.panels);
        const auto s = solution.sample(times[j]);
        tg.a = s.v * mw;
        tg.da = s.vdot * mw;
        tg.dda = s.vddot * mw;
      }
    }
  }

  int n() const { return n_; }
  double step() const { return h_; }
  std::size_t targets() const { return targets_.size(); }

  // Writes n(w) * [Re g g^H, Re gd gd^H, Re g gd^H] for every target time
  // into `out` (3 n^2 entries per time), scaled by `scale`.
  void direct(double w, double scale, double* out) const {
    const PanelWeights pw = hermite_weights(w * h_);
    CVector g = CVector::Zero(n_), gd = CVector::Zero(n_);
    const Complex step = std::polar(1.0, w * h_);
    Complex phase = 1.0;
    std::size_t done = 0;
    for (std::size_t j = 0; j < targets_.size(); ++j) {
      const Target& tg = targets_[j];
      for (; done < tg.panels; ++done) {
        add_panel(g, a_[done], da_[done], a_[done + 1], da_[done + 1], pw, h_,
                  phase);
        add_panel(gd, da_[done], dda_[done], da_[done + 1], dda_[done + 1], pw,
                  h_, phase);
        phase *= step;
        if ((done & 255) == 255) phase = std::polar(1.0, w * h_ * (done + 1));
      }
      CVector gj = g, gdj = gd;
      if (tg.partial > 0.0) {
        const PanelWeights pp = hermite_weights(w * tg.partial);
        add_panel(gj, a_[done], da_[done], tg.a, tg.da, pp, tg.partial, phase);
        add_panel(gdj, da_[done], dda_[done], tg.da, tg.dda, pp, tg.partial,
                  phase);
      }
      write(gj, gdj, scale, out + 3 * n_ * n_ * j);
    }
  }

  // Trapezoid sum over w_m = m * dw, m = 0..count-1, with per-frequency
  // weights; adds into `out` as `direct` does.
  void uniform(double dw, std::size_t count, const std::vector<double>& weight,
               double* out) const {
    using Arr = Eigen::ArrayXcd;
    const Eigen::Index m = static_cast<Eigen::Index>(count);
    Eigen::ArrayXd w = Eigen::ArrayXd::LinSpaced(m, 0.0, dw * (m - 1));
    Arr w00(m), w10(m), w01(m), w11(m), step(m), phase = Arr::Ones(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const PanelWeights pw = hermite_weights(w[i] * h_);
      w00[i] = h_ * pw.w00;
      w10[i] = h_ * h_ * pw.w10;
      w01[i] = h_ * pw.w01;
      w11[i] = h_ * h_ * pw.w11;
      step[i] = std::polar(1.0, w[i] * h_);
    }
    std::vector<Arr> g(n_, Arr::Zero(m)), gd(n_, Arr::Zero(m));
    Arr c00(m), c10(m), c01(m), c11(m);
    std::vector<Arr> gj(n_), gdj(n_);
    std::size_t done = 0;
    for (std::size_t j = 0; j < targets_.size(); ++j) {
      const Target& tg = targets_[j];
      for (; done < tg.panels; ++done) {
        c00 = phase * w00;
        c10 = phase * w10;
        c01 = phase * w01;
        c11 = phase * w11;
        const Vector &a0 = a_[done], &a1 = a_[done + 1];
        const Vector &d0 = da_[done], &d1 = da_[done + 1];
        const Vector &e0 = dda_[done], &e1 = dda_[done + 1];
        for (int r = 0; r < n_; ++r) {
          g[r] += c00 * a0[r] + c10 * d0[r] + c01 * a1[r] + c11 * d1[r];
          gd[r] += c00 * d0[r] + c10 * e0[r] + c01 * d1[r] + c11 * e1[r];
        }
        if ((done & 255) == 255) {
          const double t = h_ * static_cast<double>(done + 1);
          for (Eigen::Index i = 0; i < m; ++i) phase[i] = std::polar(1.0, w[i] * t);
        } else {
          phase *= step;
        }
      }
      for (int r = 0; r < n_; ++r) {
        gj[r] = g[r];
        gdj[r] = gd[r];
      }
      if (tg.partial > 0.0) {
        const double len = tg.partial;
        for (Eigen::Index i = 0; i < m; ++i) {
          const PanelWeights pp = hermite_weights(w[i] * len);
          const Complex ph = phase[i];
          for (int r = 0; r < n_; ++r) {
            gj[r][i] += len * ph *
                        (pp.w00 * a_[done][r] + len * pp.w10 * da_[done][r] +
                         pp.w01 * tg.a[r] + len * pp.w11 * tg.da[r]);
            gdj[r][i] += len * ph *
                         (pp.w00 * da_[done][r] + len * pp.w10 * dda_[done][r] +
                          pp.w01 * tg.da[r] + len * pp.w11 * tg.dda[r]);
          }
        }
      }
      double* o = out + 3 * n_ * n_ * j;
      const Eigen::Map<const Eigen::ArrayXd> wt(weight.data(), m);
      for (int r = 0; r < n_; ++r) {
        for (int q = 0; q < n_; ++q) {
          o[r * n_ + q] += (wt * (gj[r] * gj[q].conjugate()).real()).sum();
          o[n_ * n_ + r * n_ + q] +=
              (wt * (gdj[r] * gdj[q].conjugate()).real()).sum();
          o[2 * n_ * n_ + r * n_ + q] +=
              (wt * (gj[r] * gdj[q].conjugate()).real()).sum();
        }
      }
    }
  }

 private:
  struct Target {
    std::size_t panels = 0;  // complete panels before the time
    double partial = 0.0;    // length of the trailing partial panel
    Vector a, da, dda;       // values at the time itself if partial > 0
  };

  void add_panel(CVector& acc, const Vector& f0, const Vector& d0,
                 const Vector& f1, const Vector& d1, const PanelWeights& wt,
                 double len, Complex ph) const {
    for (int r = 0; r < n_; ++r) {
      acc[r] += len * ph *
                (wt.w00 * f0[r] + len * wt.w10 * d0[r] + wt.w01 * f1[r] +
                 len * wt.w11 * d1[r]);
    }
  }

  void write(const CVector& g, const CVector& gd, double scale,
             double* o) const {
    for (int r = 0; r < n_; ++r) {
      for (int q = 0; q < n_; ++q) {
        o[r * n_ + q] = scale * std::real(g[r] * std::conj(g[q]));
        o[n_ * n_ + r * n_ + q] = scale * std::real(gd[r] * std::conj(gd[q]));
        o[2 * n_ * n_ + r * n_ + q] = scale * std::real(g[r] * std::conj(gd[q]));
      }
    }
  }

  int n_;
  double h_;
  std::vector<Vector> a_, da_, dda_;
  std::vector<Target> targets_;
};

void require_converged(const quad::Result& r, Eigen::Index block) {
  if (r.converged) return;
  Eigen::Index worst = 0;
  r.error.maxCoeff(&worst);
  throw NumericError(
      "frequency quadrature for the diffusion matrix did not converge "
      "(time index " +
      std::to_string(worst / block) + ", error estimate " +
      std::to_string(r.error[worst]) + ")");
}

}  // namespace

std::vector<Matrix> diffusion_matrices(const ModelSpec& model,
                                       const HomogeneousSolution& solution,
                                       std::span<const double> times,
                                       const DiffusionOptions& options) {
  model.validate();
  const int n = model.size();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || (i > 0 && times[i] < times[i - 1])) {
      throw std::invalid_argument("diffusion times must be ascending and >= 0");
    }
  }
  if (!times.empty() &&
      times.back() > solution.end_time() * (1.0 + 1e-12) + 1e-12) {
    throw std::out_of_range("diffusion time beyond the homogeneous solution");
  }
  std::vector<Matrix> out(times.size(), Matrix::Zero(2 * n, 2 * n));
  if (times.empty() || model.density.gamma == 0.0) return out;

  const FilonData data(model, solution, times);
  const Eigen::Index block = 3 * n * n;
  const Eigen::Index total = block * static_cast<Eigen::Index>(times.size());
  const double temperature = model.temperature;
  const SpectralDensity& density = model.density;
  const double top = density.integration_limit();
  const double t_max = std::max(times.back(), solution.step());
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(total);

  if (options.method == DiffusionMethod::kAdaptive) {
    quad::VectorIntegrand f = [&](double w, Eigen::Ref<Eigen::ArrayXd> res) {
      data.direct(w, noise_density(density, temperature, w), res.data());
    };
    const int panels =
        std::max(32, static_cast<int>(std::ceil(top * t_max / kPi)));
    std::vector<double> extra(model.frequencies.data(),
                              model.frequencies.data() + n);
    const auto pts = quad::panel_breakpoints(0.0, top, panels, extra);
    const quad::Result r = quad::integrate(f, total, pts, options.frequency);
    require_converged(r, block);
    acc = r.value;
  } else {
    // Split n(w) = chi(w) n(w) + (1 - chi(w)) n(w) with the smooth step
    // chi = erfc((w - w0) / s) / 2, s = w0 / 6. The first part (which holds
    // any non-smoothness at w = 0) is integrated adaptively. The second is
    // even and smooth in w, so the trapezoid rule converges spectrally once
    // the grid resolves lags beyond 2 t_max: the step costs a margin of
    // 12.2 / s (Gaussian decay of its transform) and the thermal factor one
    // of 6 / T (poles of coth at w = 2 pi i T k).
    const double w0 = 0.4 * model.frequencies.minCoeff();
    const double width = w0 / 6.0;
    auto chi = [=](double w) { return 0.5 * std::erfc((w - w0) / width); };
    const double low_top = 2.0 * w0;
    quad::VectorIntegrand f = [&](double w, Eigen::Ref<Eigen::ArrayXd> res) {
      data.direct(w, chi(w) * noise_density(density, temperature, w),
                  res.data());
    };
    const int panels = std::max(
        8, static_cast<int>(std::ceil(low_top * t_max / kPi)));
    std::vector<double> extra;
    for (double k : {1.0, 3.0, 10.0}) extra.push_back(k * temperature);
    const auto pts = quad::panel_breakpoints(0.0, low_top, panels, extra);
    const quad::Result r = quad::integrate(f, total, pts, options.frequency);
    require_converged(r, block);
    acc = r.value;

    const double margin =
        12.2 / width + 6.0 / std::max(temperature, 0.05 * w0);
    const std::size_t count = static_cast<std::size_t>(
        std::ceil(top * (2.0 * t_max + margin) / (2.0 * kPi))) + 1;
    const double dw = top / static_cast<double>(count - 1);
    std::vector<double> weight(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double w = dw * static_cast<double>(i);
      weight[i] = dw * (1.0 - chi(w)) * noise_density(density, temperature, w);
    }
    weight.front() *= 0.5;
    weight.back() *= 0.5;
    data.uniform(dw, count, weight, acc.data());
  }

  for (std::size_t j = 0; j < times.size(); ++j) {
    const double* o = acc.data() + block * static_cast<Eigen::Index>(j);
    Matrix& s = out[j];
    for (int r = 0; r < n; ++r) {
      for (int q = 0; q < n; ++q) {
        const double mr = model.masses[r], mq = model.masses[q];
        s(2 * r, 2 * q) = o[r * n + q];
        s(2 * r + 1, 2 * q + 1) = mr * o[n * n + r * n + q] * mq;
        s(2 * r, 2 * q + 1) = o[2 * n * n + r * n + q] * mq;
        s(2 * q + 1, 2 * r) = s(2 * r, 2 * q + 1);
      }
    }
    s = (0.5 * (s + s.transpose())).eval();
  }
  return out;
}

}  // namespace qbm
