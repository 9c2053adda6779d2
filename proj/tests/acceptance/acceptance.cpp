// Acceptance report: one PASS/FAIL line per criterion. Exits 0 once every
// check has run; pass --strict to exit 1 when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "qbm/case_model.hpp"
#include "qbm/cli/commands.hpp"
#include "qbm/gaussian_states.hpp"
#include "qbm/oracle.hpp"
#include "qbm/phase_space.hpp"
#include "qbm/propagator.hpp"
#include "qbm/uncertainty.hpp"

using namespace qbm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

const int kSecond[] = {1};

Matrix pt2() { return partial_transpose_form(PhaseSpaceLayout(2), kSecond); }

ModelSpec single_oscillator(double omega, double gamma, double cutoff) {
  ModelSpec m;
  m.masses = Vector::Ones(1);
  m.frequencies = Vector::Constant(1, omega);
  m.weights = Vector::Ones(1);
  m.density.gamma = gamma;
  m.density.cutoff = cutoff;
  return m;
}

// max_t ||R Omega R^T - e^{-gamma t} Omega||_max / e^{-gamma t}
double dissipative_structure(const ModelSpec& m, double gamma, double t_max) {
  const auto grid = uniform_grid(t_max, 201);
  const Propagator prop(m, grid);
  const Matrix omega = symplectic_form(PhaseSpaceLayout(m.size()));
  double worst = 0.0;
  for (double t : grid) {
    const Matrix r = prop.transition(t);
    const double decay = std::exp(-gamma * t);
    worst = std::max(worst, max_abs(r * omega * r.transpose() - decay * omega) / decay);
  }
  return worst;
}

// 1. Symplectic limit.
Outcome symplectic_limit() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto grid = uniform_grid(50.0, 200);
  double r_err = 0.0, s_err = 0.0;
  const ModelSpec models[] = {single_oscillator(1.0, 0.0, 10.0),
                              two_oscillator_model({0.38, 0.7, 1.0}, 0.0, 10.0)};
  for (const auto& m : models) {
    const Propagator prop(m, grid);
    const Matrix omega = symplectic_form(PhaseSpaceLayout(m.size()));
    for (const auto& p : prop.evaluate(grid)) {
      r_err = std::max(r_err, max_abs(p.R * omega * p.R.transpose() - omega));
      s_err = std::max(s_err, max_abs(p.S));
    }
  }
  const double secs = seconds_since(t0);
  return {r_err <= 1e-10 && s_err <= 1e-12 && secs < 1.0,
          fmt("N=1,2, 200 times on [0, 50]: max|R Om R^T - Om| = %.2e (tol 1e-10), "
              "max|S| = %.2e (tol 1e-12), %.2f s (limit 1 s)",
              r_err, s_err, secs)};
}

// 2. Weak-coupling dissipative structure.
Outcome dissipative_limit() {
  const auto t0 = std::chrono::steady_clock::now();
  const double gamma = 0.01;
  const double one = dissipative_structure(single_oscillator(1.0, gamma, 20.0), gamma,
                                           5.0 / gamma);
  const double secs = seconds_since(t0);
  const double two = dissipative_structure(
      two_oscillator_model({0.38, 0.7, 1.0}, gamma, 20.0), gamma, 5.0 / gamma);
  return {one < 0.05 && secs < 10.0,
          fmt("N=1, W=1, gamma=0.01, cutoff 20, gamma t <= 5: max deviation %.4f "
              "(tol 0.05), %.2f s (limit 10 s); two oscillators delta=0.38 "
              "(diagnostic): %.4f",
              one, secs, two)};
}

// 3. Local-limit closed form against the numeric memory solution.
Outcome closed_form_cross_check() {
  const double gamma = 0.01;
  const auto m = two_oscillator_model({0.38, 0.7, 1.0}, gamma, 100.0);
  const auto sol = solve_homogeneous(m, 5.0 / gamma);
  const LocalLimitSolution local(CaseModel::from(m));
  double err = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < sol.nodes(); ++k) {
    err = std::max(err, max_abs(local.oscillators(sol.time(k)).v - sol.v(k)));
    scale = std::max(scale, max_abs(sol.v(k)));
  }
  const double rel = err / scale;
  return {rel <= 1e-3,
          fmt("gamma=0.01, delta=0.38, cutoff 100, gamma t <= 5: "
              "max|v_closed - v_numeric| / max|v| = %.3e (tol 1e-3)",
              rel)};
}

// 4. Asymptotic thermal state.
Outcome asymptotic_state() {
  const double thetas[] = {0.2, 1.0, 5.0};
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  auto worst_of = [&](const AsymptoticDiffusion& a, const AsymptoticDiffusion& b) {
    return std::max({rel(a.xx_plus, b.xx_plus), rel(a.pp_plus, b.pp_plus),
                     rel(a.xx_minus, b.xx_minus), rel(a.pp_minus, b.pp_minus)});
  };
  double closed = 0.0, numeric = 0.0;
  for (double theta : thetas) {
    const auto weak = two_oscillator_model({0.38, theta, 1.0}, 1e-3, 100.0);
    const auto cw = CaseModel::from(weak);
    closed = std::max(closed, worst_of(asymptotic_diffusion(cw, weak.temperature, 100.0),
                                       weak_damping_diffusion(cw, weak.temperature)));

    const double gamma = 0.01, cutoff = 10.0;
    const auto m = two_oscillator_model({0.38, theta, 1.0}, gamma, cutoff);
    const double t = 15.0 / gamma;
    const double grid[] = {0.0, t};
    const Propagator prop(m, grid);
    const Matrix s = to_plus_minus(prop.evaluate(t).S);
    AsymptoticDiffusion got;
    got.xx_plus = s(0, 0);
    got.pp_plus = s(1, 1);
    got.xx_minus = s(2, 2);
    got.pp_minus = s(3, 3);
    numeric = std::max(numeric, worst_of(got, asymptotic_diffusion(CaseModel::from(m),
                                                                   m.temperature, cutoff)));
  }
  return {closed <= 0.02 && numeric <= 0.02,
          fmt("theta in {0.2, 1, 5}: asymptotic vs weak-damping closed form "
              "(gamma=1e-3, cutoff 100) worst %.2f%%; numeric S at gamma t = 15 "
              "(gamma=0.01, cutoff 10) vs asymptotic worst %.2f%% (tol 2%%)",
              100 * closed, 100 * numeric)};
}

// 5. High-temperature power laws.
Outcome power_laws() {
  const double gamma = 0.01, cutoff = 200.0;
  const auto m = two_oscillator_model({0.38, 50.0, 1.0}, gamma, cutoff);
  const double lo = 0.05, hi = 0.3;
  std::vector<double> times = {0.0};
  for (int k = 0; k < 40; ++k) times.push_back(lo * std::pow(hi / lo, k / 39.0));
  const Propagator prop(m, hi);
  const auto pairs = prop.evaluate(times);
  const auto cm = CaseModel::from(m);
  const auto fit = fit_high_temperature_regime(pairs, cm, m.temperature);
  const auto closed = high_temperature_area_bounds(cm, m.temperature, 0.1);
  const double analytic_ratio = closed.xp_plus_minus / closed.xp_minus_plus;
  const bool slope_ok = fit.mixed_slope >= 7.5 && fit.mixed_slope <= 8.5;
  const double coef_dev =
      std::abs(fit.mixed_coefficient / fit.mixed_reference_coefficient - 1.0);
  const double ratio_dev = std::abs(fit.mixed_ratio / 11.0 - 1.0);
  const bool analytic_ok = std::abs(analytic_ratio - 11.0) < 1e-12;
  return {!fit.inconclusive && slope_ok && coef_dev <= 0.30 && analytic_ok &&
              ratio_dev <= 0.35,
          fmt("theta=50, delta=0.38, gamma=0.01, cutoff 200, t in [0.05, 0.3]: "
              "slope %.3f [7.5, 8.5] %s; coefficient %.3e vs 11 g^2 T^2 D^4/256 = "
              "%.3e (off %.0f%%, tol 30%%) %s; analytic ratio %.3f %s; numeric "
              "ratio %.3f vs 11 (off %.0f%%, tol 35%%) %s; white-noise series "
              "coefficient g^2 T^2 D^4/240 = %.3e",
              fit.mixed_slope, slope_ok ? "ok" : "FAIL", fit.mixed_coefficient,
              fit.mixed_reference_coefficient, 100 * coef_dev,
              coef_dev <= 0.30 ? "ok" : "FAIL", analytic_ratio,
              analytic_ok ? "ok" : "FAIL", fit.mixed_ratio, 100 * ratio_dev,
              ratio_dev <= 0.35 ? "ok" : "FAIL", fit.mixed_white_noise_coefficient)};
}

// 6. Envelope property over random pure states.
Outcome envelope() {
  const double gamma = 0.05;
  const auto m = two_oscillator_model({0.38, 0.21, 1.0}, gamma, 10.0);
  const auto grid = uniform_grid(12.0 / gamma, 241);
  const Propagator prop(m, grid);
  const auto pairs = prop.evaluate(grid);
  std::vector<double> bound, tilde;
  for (const auto& p : pairs) {
    bound.push_back(lambda_bound(p, pt2()));
    tilde.push_back(lambda_tilde_bound(p, pt2()));
  }
  const PhaseSpaceLayout two(2);
  const int draws = 60;
  double worst = 1e300, closest = 1e300, worst_f = 1e300;
  for (int d = 0; d < draws; ++d) {
    Rng rng(1000 + d);
    const Matrix v0 = random_pure_covariance(two, rng);
    const Matrix f0 = random_factorized_pure_covariance(two, rng);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const double gap = lambda_min(evolve_covariance(v0, pairs[k]), pt2()) - bound[k];
      worst = std::min(worst, gap);
      closest = std::min(closest, std::abs(gap));
      worst_f = std::min(worst_f,
                         lambda_min(evolve_covariance(f0, pairs[k]), pt2()) - tilde[k]);
    }
  }
  return {worst >= -1e-8 && closest <= 1e-3 && worst_f >= -1e-8,
          fmt("%d pure and %d factorized draws, delta=0.38, theta=0.21, gamma=0.05, "
              "gamma t <= 12: min(lambda_min - lambda_bound) = %.2e, closest approach "
              "%.2e (tol 1e-3), min(lambda_min - lambda_tilde_bound) = %.2e (tol -1e-8)",
              draws, draws, worst, closest, worst_f)};
}

std::vector<double> tilde_curve(double theta, double gamma, double cutoff,
                                const std::vector<double>& grid) {
  const auto m = two_oscillator_model({0.02, theta, 1.0}, gamma, cutoff);
  const Propagator prop(m, grid);
  std::vector<double> out;
  for (const auto& p : prop.evaluate(grid)) out.push_back(lambda_tilde_bound(p, pt2()));
  return out;
}

// 7. Entanglement oscillations.
Outcome oscillations() {
  const double gamma = 0.005, cutoff = 20.0;
  const auto grid = uniform_grid(3.0 / gamma, 2401);
  const auto cold = tilde_curve(0.21, gamma, cutoff, grid);
  int changes = 0, last = 0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const int s = cold[k] > 0.0 ? 1 : (cold[k] < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  const auto hot = tilde_curve(20.0, gamma, cutoff, uniform_grid(8.0 / gamma, 3201));
  const auto it = std::min_element(hot.begin(), hot.end());
  const double hot_min = *it;
  const double hot_t = (8.0 / gamma) * static_cast<double>(it - hot.begin()) / 3200.0;
  return {changes >= 2 && hot_min >= 0.0,
          fmt("delta=0.02, gamma=0.005, cutoff 20: theta=0.21 has %d sign changes "
              "of lambda_tilde_bound in gamma t in (0, 3] (need >= 2) %s; theta=20 "
              "min lambda_tilde_bound = %.3e at gamma t = %.3f (need >= 0) %s",
              changes, changes >= 2 ? "ok" : "FAIL", hot_min, gamma * hot_t,
              hot_min >= 0.0 ? "ok" : "FAIL")};
}

cli::CsvTable tdis(const cli::Json& task, double delta) {
  cli::Json cfg = {{"model", {{"delta", delta}}},
                   {"bath", {{"gamma", 0.01}, {"cutoff", 20}, {"theta", 1}}},
                   {"grid", {{"t_max", 8}, {"points", 801}}},
                   {"task", task}};
  return cli::tdis_table(cli::parse_config(cfg));
}

// 8. Disentanglement-time trends.
Outcome tdis_trends() {
  const auto by_theta = tdis({{"theta", {0.2, 0.5, 1.0, 2.0}}}, 0.02);
  const auto by_delta = tdis({{"theta", {1.0}}, {"delta", {0.1, 0.38, 0.8}}}, 0.1);
  auto values = [](const cli::CsvTable& t) {
    std::vector<double> v;
    const auto c = t.column("t_dis_gamma");
    for (const auto& row : t.rows) v.push_back(row[c].number ? *row[c].number : NAN);
    return v;
  };
  const auto a = values(by_theta), b = values(by_delta);
  bool decreasing = std::all_of(a.begin(), a.end(), [](double x) { return std::isfinite(x); });
  for (std::size_t i = 1; i < a.size(); ++i) decreasing &= a[i] < a[i - 1];
  const auto [lo, hi] = std::minmax_element(b.begin(), b.end());
  double mean = 0.0;
  for (double x : b) mean += x / b.size();
  const double spread = (*hi - *lo) / mean;
  const bool flat = std::isfinite(spread) && spread < 0.15;
  return {decreasing && flat,
          fmt("gamma=0.01, cutoff 20: t_dis (units 1/gamma) at delta=0.02 for theta "
              "0.2/0.5/1/2 = %.3f/%.3f/%.3f/%.3f, strictly decreasing %s; theta=1 "
              "for delta 0.1/0.38/0.8 = %.3f/%.3f/%.3f, spread (max-min)/mean = "
              "%.0f%% (need < 15%%) %s",
              a[0], a[1], a[2], a[3], decreasing ? "ok" : "FAIL", b[0], b[1], b[2],
              100 * spread, flat ? "ok" : "FAIL")};
}

double oracle_error(int modes, double window, const std::vector<double>& grid,
                    const ModelSpec& m) {
  const ClosedSystem sys(m, discretize_bath(m.density, modes, 20.0));
  const Propagator prop(m, grid);
  const Matrix v0 = vacuum_covariance(PhaseSpaceLayout(2));
  std::vector<double> inside;
  for (double t : grid)
    if (t <= window * (1 + 1e-12)) inside.push_back(t);
  const auto exact = sys.evolve_system(sys.initial_covariance(v0), inside);
  const auto pairs = prop.evaluate(inside);
  double err = 0.0;
  for (std::size_t k = 0; k < inside.size(); ++k)
    err = std::max(err, max_abs(exact[k] - evolve_covariance(v0, pairs[k])));
  return err;
}

// 9. Oracle equivalence.
Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const double gamma = 0.05;
  const auto m = two_oscillator_model({0.38, 0.21, 1.0}, gamma, 4.0);
  auto window = [&](int modes) {
    return std::min(10.0 / gamma, 0.8 * 2.0 * kPi / (20.0 / modes));
  };
  const double w400 = window(400), w200 = window(200);
  const auto grid = uniform_grid(w400, 201);
  const double e400 = oracle_error(400, w400, grid, m);
  const double c400 = oracle_error(400, w200, grid, m);
  const double c200 = oracle_error(200, w200, grid, m);
  const double ratio = c200 / c400;
  const double secs = seconds_since(t0);
  return {e400 < 5e-3 && ratio >= 1.5 && secs < 120.0,
          fmt("delta=0.38, theta=0.21, gamma=0.05, cutoff 4, omega_max 20, vacuum: "
              "M=400 max deviation %.2e over t <= %.1f (tol 5e-3); on t <= %.1f "
              "M=200 %.2e, M=400 %.2e, ratio %.2f (need >= 1.5); %.1f s (limit 120 s)",
              e400, w400, w200, c200, c400, ratio, secs)};
}

// 10. Master-equation consistency.
Outcome master_equation() {
  struct Set {
    double delta, theta;
  };
  const Set sets[] = {{0.02, 0.2}, {0.38, 1.0}, {0.8, 10.0}};
  double worst = 0.0;
  for (const auto& s : sets) {
    const auto m = two_oscillator_model({s.delta, s.theta, 1.0}, 0.05, 10.0);
    const auto grid = uniform_grid(5.0, 1001);
    const Propagator prop(m, grid);
    const auto pairs = prop.evaluate(grid);
    const Matrix v0 = two_mode_squeezed_covariance(0.5);
    const Matrix expect = evolve_covariance(v0, pairs.back());
    const Matrix got = integrate_master_equation(master_coefficients(pairs), v0);
    worst = std::max(worst, max_abs(got - expect) / max_abs(expect));
  }
  return {worst <= 1e-6,
          fmt("(delta, theta) = (0.02, 0.2), (0.38, 1), (0.8, 10), gamma=0.05, "
              "cutoff 10, t_end = 5: worst relative deviation %.2e (tol 1e-6)",
              worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 11. Determinism of every data-producing subcommand.
Outcome determinism() {
  const fs::path dir =
      fs::temp_directory_path() / ("qbm_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  struct Case {
    const char* sub;
    cli::Json cfg;
  };
  const cli::Json bath = {{"gamma", 0.05}, {"cutoff", 4}, {"theta", 0.21}};
  const std::vector<Case> cases = {
      {"propagator",
       {{"model", {{"delta", 0.38}}}, {"bath", bath}, {"grid", {{"t_max", 2}, {"points", 41}}}}},
      {"bounds",
       {{"model", {{"delta", 0.38}}},
        {"bath", bath},
        {"grid", {{"t_max", 2}, {"points", 41}}},
        {"task", {{"initial_state", {{"preset", "random-pure"}}}}}}},
      {"tdis",
       {{"model", {{"delta", 0.38}}},
        {"bath", bath},
        {"grid", {{"t_max", 4}, {"points", 81}}},
        {"task", {{"theta", {0.5, 2.0}}, {"delta", {0.1, 0.38}}}}}},
      {"oracle-check",
       {{"model", {{"delta", 0.38}}},
        {"bath", bath},
        {"grid", {{"t_max", 20}, {"points", 21}, {"unit", "absolute"}}},
        {"task", {{"modes", 100}, {"omega_max", 20}}}}},
  };
  int identical = 0;
  std::string bad;
  for (const auto& c : cases) {
    const fs::path cfg = dir / (std::string(c.sub) + ".json");
    std::ofstream(cfg) << c.cfg.dump(2);
    std::string outs[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path out = dir / (std::string(c.sub) + "_" + std::to_string(run));
      const std::string cfg_s = cfg.string(), out_s = out.string();
      const char* argv[] = {"qbm", "--config", cfg_s.c_str(), "--out", out_s.c_str(),
                            "--seed", "42", c.sub};
      std::ostringstream sink;
      auto* saved = std::cout.rdbuf(sink.rdbuf());
      const int rc = cli::run(8, argv);
      std::cout.rdbuf(saved);
      if (rc != cli::kOk) break;
      std::vector<fs::path> files(fs::directory_iterator(out), fs::directory_iterator{});
      std::sort(files.begin(), files.end());
      for (const auto& f : files) outs[run] += f.filename().string() + "\n" + slurp(f);
    }
    if (!outs[0].empty() && outs[0] == outs[1]) {
      ++identical;
    } else {
      bad += std::string(bad.empty() ? "" : ", ") + c.sub;
    }
  }
  fs::remove_all(dir);
  return {identical == static_cast<int>(cases.size()),
          fmt("propagator, bounds (random-pure, seed 42), tdis, oracle-check run "
              "twice: %d/%zu byte-identical outputs%s%s",
              identical, cases.size(), bad.empty() ? "" : "; differing: ", bad.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  const Criterion criteria[] = {
      {"symplectic limit", symplectic_limit},
      {"weak-coupling dissipative structure", dissipative_limit},
      {"closed-form homogeneous solution", closed_form_cross_check},
      {"asymptotic thermal state", asymptotic_state},
      {"high-temperature power laws", power_laws},
      {"envelope property", envelope},
      {"entanglement oscillations", oscillations},
      {"disentanglement-time trends", tdis_trends},
      {"oracle equivalence", oracle_equivalence},
      {"master-equation consistency", master_equation},
      {"determinism", determinism},
  };
  int passed = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    passed += o.pass;
    std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", index, c.name,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", passed, index);
  return strict && passed != index ? 1 : 0;
}
