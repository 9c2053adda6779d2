#include "qbm/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qbm {
namespace {

void check_pair(const PropagatorPair& pair, const Matrix& form) {
  const Eigen::Index d = pair.R.rows();
  if (pair.R.cols() != d || pair.S.rows() != d || pair.S.cols() != d ||
      form.rows() != d || form.cols() != d) {
    throw std::invalid_argument("propagator pair and form sizes differ");
  }
}

CMatrix minus_half_i(const Matrix& m) {
  return Complex(0.0, -0.5) * m.cast<Complex>();
}

}  // namespace

BoundMatrix state_bound(const PropagatorPair& pair, const Matrix& form,
                        BoundKind kind) {
  check_pair(pair, form);
  require_symmetric(pair.S, pair.S.rows(), "diffusion matrix", 1e-8);
  BoundMatrix b;
  b.t = pair.t;
  b.kind = kind;
  b.matrix = minus_half_i(pair.R * form * pair.R.transpose()) +
             pair.S.cast<Complex>();
  return b;
}

BoundMatrix factorizability_condition(const PropagatorPair& pair,
                                      const Matrix& inner,
                                      const Matrix& outer) {
  check_pair(pair, inner);
  check_pair(pair, outer);
  BoundMatrix b;
  b.t = pair.t;
  b.kind = BoundKind::kFactorizabilityNecessary;
  b.matrix = minus_half_i(pair.R * inner * pair.R.transpose() - outer) +
             pair.S.cast<Complex>();
  return b;
}

double lambda_min(const Matrix& covariance, const Matrix& pt_form) {
  return min_ppt_eigenvalue(covariance, pt_form);
}

double lambda_bound(const PropagatorPair& pair, const Matrix& pt_form) {
  const Matrix omega = symplectic_form(PhaseSpaceLayout(
      static_cast<int>(pair.R.rows() / 2)));
  return min_hermitian_eigenvalue(
      factorizability_condition(pair, omega, pt_form).matrix);
}

double lambda_tilde_bound(const PropagatorPair& pair, const Matrix& pt_form) {
  return min_hermitian_eigenvalue(
      factorizability_condition(pair, pt_form, pt_form).matrix);
}

namespace {

TripartiteBounds tripartite_impl(const PropagatorPair& pair,
                                 const Matrix* inner) {
  const int n = static_cast<int>(pair.R.rows() / 2);
  if (n < 3) {
    throw std::invalid_argument("tripartite bounds need at least 3 oscillators");
  }
  const PhaseSpaceLayout layout(n);
  const Matrix omega = symplectic_form(layout);
  const BoundMatrix base = state_bound(pair, omega);
  TripartiteBounds out;
  out.all_sufficiency_negative = true;
  for (int i = 0; i < n; ++i) {
    const int subset[1] = {i};
    const Matrix pt = partial_transpose_form(layout, subset);
    const Matrix& in = inner ? *inner : pt;
    out.necessary.push_back(min_hermitian_eigenvalue(
        factorizability_condition(pair, in, pt).matrix));
    const CMatrix suff =
        base.matrix + Complex(0.0, 0.5) * pt.cast<Complex>();
    const double s = min_hermitian_eigenvalue(suff);
    out.sufficiency.push_back(s);
    if (!(s < 0.0)) out.all_sufficiency_negative = false;
  }
  return out;
}

}  // namespace

TripartiteBounds tripartite_bounds(const PropagatorPair& pair) {
  return tripartite_impl(pair, nullptr);
}

TripartiteBounds tripartite_bounds(const PropagatorPair& pair,
                                   const Matrix& inner) {
  return tripartite_impl(pair, &inner);
}

namespace {

AreaSet areas_of(const Matrix& w) {
  AreaSet a;
  a.xp_plus_plus = w(0, 0) * w(1, 1) - w(0, 1) * w(0, 1);
  a.xp_minus_minus = w(2, 2) * w(3, 3) - w(2, 3) * w(2, 3);
  a.xp_plus_minus = w(0, 0) * w(3, 3) - w(0, 3) * w(0, 3);
  a.xp_minus_plus = w(2, 2) * w(1, 1) - w(2, 1) * w(2, 1);
  return a;
}

}  // namespace

AreaSet area_functions(const Matrix& covariance) {
  require_symmetric(covariance, 4, "covariance");
  return areas_of(to_plus_minus(covariance));
}

AreaSet area_lower_bounds(const PropagatorPair& pair, double gamma) {
  if (pair.S.rows() != 4) {
    throw std::invalid_argument("area bounds need two oscillators");
  }
  AreaSet a = areas_of(to_plus_minus(pair.S));
  const double quantum = 0.25 * std::exp(-gamma * pair.t);
  a.xp_plus_plus += quantum;
  a.xp_minus_minus += quantum;
  return a;
}

void WitnessCurve::validate() const {
  if (times.size() != values.size()) {
    throw std::invalid_argument("witness curve times and values differ in size");
  }
  if (times.size() < 2) throw std::invalid_argument("witness curve needs >= 2 points");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(values[i])) {
      throw std::invalid_argument("witness curve has non-finite entries");
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw std::invalid_argument("witness curve times must increase");
    }
  }
}

DisentanglementTime disentanglement_time(const WitnessCurve& curve,
                                         const WitnessRefiner& refine,
                                         double tolerance, int sections) {
  curve.validate();
  if (sections < 2) throw std::invalid_argument("sections must be >= 2");
  DisentanglementTime out;
  const auto& t = curve.times;
  const auto& v = curve.values;
  if (v.back() < 0.0) {
    out.final_sign = -1;
    return out;
  }
  std::size_t k = t.size();
  for (std::size_t i = t.size() - 1; i-- > 0;) {
    if (v[i] < 0.0) {
      k = i;
      break;
    }
  }
  if (k == t.size()) {
    out.final_sign = 1;
    return out;
  }
  double lo = t[k], hi = t[k + 1];
  double vlo = v[k], vhi = v[k + 1];
  if (refine) {
    while (hi - lo > tolerance) {
      std::vector<double> probe(sections - 1);
      for (int i = 1; i < sections; ++i) {
        probe[i - 1] = lo + (hi - lo) * i / sections;
      }
      const std::vector<double> vals = refine(probe);
      if (vals.size() != probe.size()) {
        throw std::invalid_argument("refiner returned the wrong number of values");
      }
      out.evaluations += static_cast<int>(probe.size());
      // Keep the last sub-interval where the witness goes from < 0 to >= 0.
      std::size_t last_neg = probe.size();
      for (std::size_t i = probe.size(); i-- > 0;) {
        if (vals[i] < 0.0) {
          last_neg = i;
          break;
        }
      }
      if (last_neg == probe.size()) {
        hi = probe.front();
        vhi = vals.front();
      } else {
        lo = probe[last_neg];
        vlo = vals[last_neg];
        if (last_neg + 1 < probe.size()) {
          hi = probe[last_neg + 1];
          vhi = vals[last_neg + 1];
        }
      }
    }
  }
  out.status = CrossingStatus::kCrossed;
  out.final_sign = 1;
  out.time = vhi == vlo ? 0.5 * (lo + hi) : lo + (hi - lo) * (-vlo) / (vhi - vlo);
  out.time = std::clamp(out.time, lo, hi);
  return out;
}

}  // namespace qbm
