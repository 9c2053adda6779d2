#include "qbm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "qbm/types.hpp"

namespace qbm::quad {
namespace {

constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights for the nodes kXgk[1], kXgk[3], ..., kXgk[9].
constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Accumulator {
  Eigen::ArrayXd value;
  Eigen::ArrayXd error;
  std::size_t evaluations = 0;
  bool converged = true;

  explicit Accumulator(Eigen::Index dim)
      : value(Eigen::ArrayXd::Zero(dim)), error(Eigen::ArrayXd::Zero(dim)) {}
};

class PanelIntegrator {
 public:
  PanelIntegrator(const VectorIntegrand& f, Eigen::Index dim,
                  const Options& options, double total_width)
      : f_(f),
        options_(options),
        total_width_(total_width),
        samples_(dim, 21),
        kronrod_(dim),
        gauss_(dim),
        l1_(dim),
        asc_(dim) {}

  void run(double a, double b, int depth, Accumulator& acc) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    f_(center, samples_.col(20));
    for (int j = 0; j < 10; ++j) {
      f_(center - half * kXgk[j], samples_.col(2 * j));
      f_(center + half * kXgk[j], samples_.col(2 * j + 1));
    }
    acc.evaluations += 21;

    kronrod_ = kWgk[10] * samples_.col(20);
    gauss_.setZero();
    l1_ = kWgk[10] * samples_.col(20).abs();
    for (int j = 0; j < 10; ++j) {
      const auto lo = samples_.col(2 * j);
      const auto hi = samples_.col(2 * j + 1);
      kronrod_ += kWgk[j] * (lo + hi);
      l1_ += kWgk[j] * (lo.abs() + hi.abs());
      if (j % 2 == 1) gauss_ += kWg[j / 2] * (lo + hi);
    }
    const Eigen::ArrayXd mean = 0.5 * kronrod_;
    asc_ = kWgk[10] * (samples_.col(20) - mean).abs();
    for (int j = 0; j < 10; ++j) {
      asc_ += kWgk[j] * ((samples_.col(2 * j) - mean).abs() +
                         (samples_.col(2 * j + 1) - mean).abs());
    }

    const double abs_share =
        total_width_ > 0 ? options_.absolute * (b - a) / total_width_ : 0.0;
    bool ok = true;
    Eigen::ArrayXd err(kronrod_.size());
    for (Eigen::Index k = 0; k < kronrod_.size(); ++k) {
      double e = std::abs((kronrod_[k] - gauss_[k]) * half);
      const double resasc = asc_[k] * half;
      if (resasc != 0.0 && e != 0.0) {
        e = resasc * std::min(1.0, std::pow(200.0 * e / resasc, 1.5));
      }
      const double target =
          std::max(abs_share, options_.relative * l1_[k] * half);
      if (!(e <= target)) ok = false;
      err[k] = e;
    }

    if (ok || depth >= options_.max_depth || half < 1e-15 * std::abs(center)) {
      if (!ok) acc.converged = false;
      acc.value += kronrod_ * half;
      acc.error += err;
      return;
    }
    // Children reuse the scratch buffers, so copy nothing further from them.
    run(a, center, depth + 1, acc);
    run(center, b, depth + 1, acc);
  }

 private:
  const VectorIntegrand& f_;
  const Options& options_;
  double total_width_;
  Eigen::ArrayXXd samples_;
  Eigen::ArrayXd kronrod_, gauss_, l1_, asc_;
};

}  // namespace

Result integrate(const VectorIntegrand& f, Eigen::Index dimension,
                 std::span<const double> breakpoints, const Options& options) {
  if (dimension < 1) throw std::invalid_argument("integrand dimension < 1");
  if (breakpoints.size() < 2) {
    throw std::invalid_argument("quadrature needs at least two breakpoints");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > breakpoints[i - 1])) {
      throw std::invalid_argument("quadrature breakpoints must increase");
    }
  }
  const std::size_t panels = breakpoints.size() - 1;
  const double total = breakpoints.back() - breakpoints.front();

  std::vector<Accumulator> parts(panels, Accumulator(dimension));
  const int threads = std::max(1, std::min<int>(options.threads, panels));
  auto work = [&](int worker) {
    PanelIntegrator integrator(f, dimension, options, total);
    for (std::size_t p = worker; p < panels; p += threads) {
      integrator.run(breakpoints[p], breakpoints[p + 1], 0, parts[p]);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& t : pool) t.join();
  }

  Result result;
  result.value = Eigen::ArrayXd::Zero(dimension);
  result.error = Eigen::ArrayXd::Zero(dimension);
  for (const auto& part : parts) {
    result.value += part.value;
    result.error += part.error;
    result.evaluations += part.evaluations;
    result.converged = result.converged && part.converged;
  }
  return result;
}

double integrate(const std::function<double(double)>& f,
                 std::span<const double> breakpoints, const Options& options) {
  VectorIntegrand g = [&f](double x, Eigen::Ref<Eigen::ArrayXd> out) {
    out[0] = f(x);
  };
  Result r = integrate(g, 1, breakpoints, options);
  if (!r.converged) {
    throw NumericError("scalar quadrature did not converge (error estimate " +
                       std::to_string(r.error[0]) + ")");
  }
  return r.value[0];
}

std::vector<double> panel_breakpoints(double a, double b, int panels,
                                      std::span<const double> extra) {
  if (!(b > a) || panels < 1) {
    throw std::invalid_argument("panel_breakpoints: need b > a and panels >= 1");
  }
  std::vector<double> pts;
  pts.reserve(panels + 1 + extra.size());
  for (int i = 0; i <= panels; ++i) {
    pts.push_back(i == panels ? b : a + (b - a) * i / panels);
  }
  for (double x : extra) {
    if (x > a && x < b) pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end());
  const double min_gap = 1e-12 * (b - a);
  std::vector<double> out;
  for (double x : pts) {
    if (out.empty() || x - out.back() > min_gap) {
      out.push_back(x);
    } else if (x == b) {
      out.back() = b;
    }
  }
  return out;
}

}  // namespace qbm::quad
