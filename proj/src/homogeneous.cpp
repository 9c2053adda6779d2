#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "qbm/case_model.hpp"
#include "qbm/propagator.hpp"

namespace qbm {

HomogeneousSolution::HomogeneousSolution(double step, std::vector<Matrix> v,
                                         std::vector<Matrix> vdot,
                                         std::vector<Matrix> vddot,
                                         std::vector<Matrix> vdddot)
    : step_(step),
      v_(std::move(v)),
      vdot_(std::move(vdot)),
      vddot_(std::move(vddot)),
      vdddot_(std::move(vdddot)) {
  if (v_.size() < 2 || vdot_.size() != v_.size() ||
      vddot_.size() != v_.size() || vdddot_.size() != v_.size()) {
    throw std::invalid_argument("homogeneous solution needs >= 2 nodes");
  }
}

long HomogeneousSolution::node_index(double t) const {
  const double x = t / step_;
  const double k = std::round(x);
  if (std::abs(x - k) > 1e-9 * std::max(1.0, x)) return -1;
  if (k < 0 || k > static_cast<double>(v_.size() - 1)) return -1;
  return static_cast<long>(k);
}

HomogeneousSolution::Sample HomogeneousSolution::sample(double t) const {
  if (t < -1e-12 || t > end_time() * (1.0 + 1e-12) + 1e-12) {
    throw std::out_of_range("time " + std::to_string(t) +
                            " outside the homogeneous solution range");
  }
  const long node = node_index(t);
  if (node >= 0) return {v_[node], vdot_[node], vddot_[node]};

  std::size_t k = static_cast<std::size_t>(std::floor(t / step_));
  k = std::min(k, v_.size() - 2);
  const double h = step_;
  const double x = (t - time(k)) / h;
  const double x2 = x * x, x3 = x2 * x, x4 = x3 * x, x5 = x4 * x;
  // Quintic Hermite through value, first and second derivative.
  const double h00 = 1 - 10 * x3 + 15 * x4 - 6 * x5;
  const double h10 = x - 6 * x3 + 8 * x4 - 3 * x5;
  const double h20 = 0.5 * x2 - 1.5 * x3 + 1.5 * x4 - 0.5 * x5;
  const double h01 = 10 * x3 - 15 * x4 + 6 * x5;
  const double h11 = -4 * x3 + 7 * x4 - 3 * x5;
  const double h21 = 0.5 * x3 - x4 + 0.5 * x5;
  auto quintic = [&](const std::vector<Matrix>& f0, const std::vector<Matrix>& f1,
                     const std::vector<Matrix>& f2) -> Matrix {
    return h00 * f0[k] + h * h10 * f1[k] + h * h * h20 * f2[k] +
           h01 * f0[k + 1] + h * h11 * f1[k + 1] + h * h * h21 * f2[k + 1];
  };
  // Cubic Hermite for the second derivative.
  const double c00 = 1 - 3 * x2 + 2 * x3, c10 = x - 2 * x2 + x3;
  const double c01 = 3 * x2 - 2 * x3, c11 = -x2 + x3;
  Sample s;
  s.v = quintic(v_, vdot_, vddot_);
  s.vdot = quintic(vdot_, vddot_, vdddot_);
  s.vddot = c00 * vddot_[k] + h * c10 * vdddot_[k] + c01 * vddot_[k + 1] +
            h * c11 * vdddot_[k + 1];
  return s;
}

namespace {

struct Grid {
  double spacing = 0.0;
  std::size_t nodes = 0;
};

Grid node_grid(const ModelSpec& model, double t_end,
               const HomogeneousOptions& options) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw std::invalid_argument("end time must be positive and finite");
  }
  if (options.points_per_period < 8) {
    throw std::invalid_argument("points_per_period must be >= 8");
  }
  const double w_max = model.frequencies.maxCoeff();
  double h_max = 2.0 * kPi / (options.points_per_period * w_max);
  Grid g;
  if (options.align_to > 0.0) {
    const double d = std::min(options.align_to, t_end);
    g.spacing = d / std::ceil(d / h_max - 1e-9);
  } else {
    g.spacing = h_max;
  }
  g.nodes = static_cast<std::size_t>(std::ceil(t_end / g.spacing - 1e-9)) + 1;
  if (options.align_to <= 0.0) g.spacing = t_end / (g.nodes - 1);
  g.nodes = std::max<std::size_t>(g.nodes, 2);
  return g;
}

struct NodeValues {
  std::vector<Matrix> v, u, a, j;
};

// Exponential trapezoid integrator for the memory equation. The free motion
// x' = L x is propagated exactly; the memory force enters through the
// linear-interpolation weights Q0, Q1; the convolution uses the trapezoid
// rule, whose error expands in even powers of the step.
class MemoryIntegrator {
 public:
  MemoryIntegrator(const ModelSpec& model)
      : model_(model), n_(model.size()) {
    const Vector minv = model.masses.cwiseInverse();
    w_ = model.weights;
    b_ = 2.0 * minv.cwiseProduct(w_);
    k2_ = model.frequencies.array().square().matrix().asDiagonal();
    if (!model.renormalized) {
      k2_ -= damping_kernel(model.density, 0.0) * b_ * w_.transpose();
    }
    support_ = model.density.kernel_support();
  }

  NodeValues run(double h, std::size_t per_node, std::size_t nodes) const {
    const std::size_t steps = per_node * (nodes - 1);
    const int n = n_;
    const int d = 2 * n;

    // Kernel tables.
    std::size_t kmax = steps;
    if (std::isfinite(support_)) {
      kmax = std::min<std::size_t>(
          steps, static_cast<std::size_t>(std::ceil(support_ / h)) + 1);
    }
    std::vector<double> gk(kmax + 2, 0.0), ek(kmax + 2, 0.0);
    for (std::size_t k = 0; k <= kmax + 1; ++k) {
      gk[k] = damping_kernel(model_.density, k * h);
      ek[k] = dissipation_kernel(model_.density, k * h);
    }
    const std::size_t support = kmax;  // K[k] treated as zero for k > support
    auto kern = [&](std::size_t k) { return k <= support ? gk[k] : 0.0; };
    auto eta = [&](std::size_t k) { return k <= support ? ek[k] : 0.0; };

    // Propagation weights from one augmented exponential.
    Matrix z = Matrix::Zero(d + 2 * n, d + 2 * n);
    z.block(0, n, n, n).setIdentity();
    z.block(n, 0, n, n) = -k2_;
    z.block(n, d, n, n).setIdentity();
    z.block(d, d + n, n, n) = Matrix::Identity(n, n) / h;
    const Matrix ez = (z * h).exp();
    const Matrix e = ez.topLeftCorner(d, d);
    const Matrix q1 = ez.block(0, d + n, d, n);
    const Matrix q0 = ez.block(0, d, d, n) - q1;
    const Vector p0b = q0 * b_;
    const Vector q1b = q1 * b_;
    Vector c = Vector::Zero(d);
    c.tail(n) = w_;
    const double alpha = 0.5 * h * kern(0);
    const double denom = 1.0 + alpha * c.dot(q1b);
    if (std::abs(denom) < 1e-12) {
      throw NumericError("memory integrator step is singular");
    }

    // History of z_j = w^T v'(t_j), one row per step.
    const std::size_t cap = std::min(steps, support) + 2;
    std::vector<double> hist(cap * n, 0.0);
    auto row = [&](std::size_t j) { return hist.data() + (j % cap) * n; };
    Eigen::RowVectorXd z0 = w_.transpose();  // v'(0) = I
    std::copy(z0.data(), z0.data() + n, row(0));

    Matrix y = Matrix::Zero(d, n);
    y.bottomRows(n).setIdentity();
    Eigen::RowVectorXd m = Eigen::RowVectorXd::Zero(n);
    Eigen::RowVectorXd hacc(n), mdot(n);
    Matrix rhs(d, n);

    NodeValues out;
    out.v.reserve(nodes);
    out.u.reserve(nodes);
    out.a.reserve(nodes);
    out.j.reserve(nodes);
    auto record = [&](std::size_t step_index) {
      const Matrix v = y.topRows(n);
      const Matrix u = y.bottomRows(n);
      // m'(t) = G(0) z(t) + int_0^t G'(t - s) z(s) ds
      mdot.setZero();
      const std::size_t lo =
          step_index > support ? step_index - support : 0;
      for (std::size_t jj = std::max<std::size_t>(lo, 1); jj < step_index; ++jj) {
        const double wgt = eta(step_index - jj);
        const double* zr = row(jj);
        for (int q = 0; q < n; ++q) mdot[q] += wgt * zr[q];
      }
      if (step_index > 0 && step_index <= support) {
        const double wgt = 0.5 * eta(step_index);
        for (int q = 0; q < n; ++q) mdot[q] += wgt * z0[q];
      }
      mdot *= h;
      const double* zn = row(step_index);
      for (int q = 0; q < n; ++q) mdot[q] += kern(0) * zn[q];
      out.v.push_back(v);
      out.u.push_back(u);
      out.a.push_back(-k2_ * v - b_ * m);
      out.j.push_back(-k2_ * u - b_ * mdot);
    };
    record(0);

    for (std::size_t s = 0; s < steps; ++s) {
      const std::size_t next = s + 1;
      // H = h [sum_{j=1}^{s} K(next - j) z_j + K(next) z_0 / 2]
      hacc.setZero();
      const std::size_t lo = next > support ? next - support : 1;
      for (std::size_t jj = std::max<std::size_t>(lo, 1); jj <= s; ++jj) {
        const double wgt = kern(next - jj);
        const double* zr = row(jj);
        for (int q = 0; q < n; ++q) hacc[q] += wgt * zr[q];
      }
      if (next <= support) hacc += 0.5 * kern(next) * z0;
      hacc *= h;

      rhs.noalias() = e * y;
      rhs.noalias() -= p0b * m;
      rhs.noalias() -= q1b * hacc;
      const Eigen::RowVectorXd cr = c.transpose() * rhs;
      y = rhs - (alpha / denom) * q1b * cr;
      const Eigen::RowVectorXd znew = c.transpose() * y;
      std::copy(znew.data(), znew.data() + n, row(next));
      m = hacc + alpha * znew;
      if (next % per_node == 0) record(next);
    }
    return out;
  }

 private:
  const ModelSpec& model_;
  int n_;
  Vector w_, b_;
  Matrix k2_;
  double support_;
};

NodeValues richardson(const NodeValues& l1, const NodeValues& l2,
                      const NodeValues& l4) {
  // Error ~ c2 h^2 + c4 h^4: eliminate both terms.
  auto mix = [](const std::vector<Matrix>& a, const std::vector<Matrix>& b,
                const std::vector<Matrix>& c) {
    std::vector<Matrix> out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      out[k] = (64.0 * c[k] - 20.0 * b[k] + a[k]) / 45.0;
    }
    return out;
  };
  return {mix(l1.v, l2.v, l4.v), mix(l1.u, l2.u, l4.u), mix(l1.a, l2.a, l4.a),
          mix(l1.j, l2.j, l4.j)};
}

double relative_change(const std::vector<Matrix>& a,
                       const std::vector<Matrix>& b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    diff = std::max(diff, (a[k] - b[k]).cwiseAbs().maxCoeff());
    scale = std::max(scale, a[k].cwiseAbs().maxCoeff());
  }
  return scale > 0.0 ? diff / scale : diff;
}

HomogeneousSolution from_nodes(double spacing, NodeValues&& nv) {
  return HomogeneousSolution(spacing, std::move(nv.v), std::move(nv.u),
                             std::move(nv.a), std::move(nv.j));
}

HomogeneousSolution solve_numeric(const ModelSpec& model, const Grid& grid,
                                  const HomogeneousOptions& options) {
  MemoryIntegrator integrator(model);
  if (model.density.gamma == 0.0) {
    // No memory force: the exponential step is exact.
    return from_nodes(grid.spacing, integrator.run(grid.spacing, 1, grid.nodes));
  }
  const double h_target = 0.5 / model.density.cutoff;
  const std::size_t base = static_cast<std::size_t>(
      std::max(1.0, std::ceil(grid.spacing / h_target - 1e-9)));

  std::vector<NodeValues> levels;
  auto level = [&](int k) {
    const std::size_t per = base << k;
    return integrator.run(grid.spacing / per, per, grid.nodes);
  };
  for (int k = 0; k < 3; ++k) levels.push_back(level(k));
  NodeValues best = richardson(levels[0], levels[1], levels[2]);
  double change = 0.0;
  for (int r = 3; r < 3 + options.max_refinements; ++r) {
    levels.push_back(level(r));
    NodeValues next = richardson(levels[r - 2], levels[r - 1], levels[r]);
    change = std::max(relative_change(next.v, best.v),
                      relative_change(next.u, best.u));
    best = std::move(next);
    if (change < options.tolerance) {
      return from_nodes(grid.spacing, std::move(best));
    }
    levels[r - 3] = NodeValues{};
  }
  throw NumericError(
      "memory equation did not converge: last step halving changed v by " +
      std::to_string(change) + " (relative)");
}

HomogeneousSolution solve_analytic(const ModelSpec& model, const Grid& grid) {
  if (model.size() != 2) {
    throw std::invalid_argument("analytic solution needs two oscillators");
  }
  const CaseModel cm = CaseModel::from(model);
  const LocalLimitSolution sol(cm);
  NodeValues nv;
  for (std::size_t k = 0; k < grid.nodes; ++k) {
    const auto val = sol.oscillators(grid.spacing * k);
    nv.v.push_back(val.v);
    nv.u.push_back(val.vdot);
    nv.a.push_back(val.vddot);
    nv.j.push_back(val.vdddot);
  }
  return from_nodes(grid.spacing, std::move(nv));
}

}  // namespace

HomogeneousSolution solve_homogeneous(const ModelSpec& model, double t_end,
                                      const HomogeneousOptions& options) {
  model.validate();
  const Grid grid = node_grid(model, t_end, options);
  if (options.method == HomogeneousMethod::kAnalytic) {
    return solve_analytic(model, grid);
  }
  return solve_numeric(model, grid, options);
}

HomogeneousSolution solve_homogeneous(const ModelSpec& model,
                                      std::span<const double> grid,
                                      HomogeneousOptions options) {
  if (grid.size() < 2) throw std::invalid_argument("time grid needs >= 2 points");
  if (grid.front() != 0.0) throw std::invalid_argument("time grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("time grid must be strictly increasing");
    }
  }
  const double d = grid[1] - grid[0];
  bool uniform = true;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (std::abs(grid[i] - grid[i - 1] - d) > 1e-9 * d) uniform = false;
  }
  if (uniform && options.align_to <= 0.0) options.align_to = d;
  return solve_homogeneous(model, grid.back(), options);
}

}  // namespace qbm
