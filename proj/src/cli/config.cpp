#include "qbm/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "qbm/gaussian_states.hpp"

namespace qbm::cli {
namespace {

const Json& require(const Json& block, const std::string& block_name,
                    const std::string& key) {
  if (!block.is_object() || !block.contains(key))
    throw ConfigError("missing field '" + block_name + "." + key + "'");
  return block.at(key);
}

double number(const Json& value, const std::string& name) {
  if (!value.is_number())
    throw ConfigError("field '" + name + "' must be a number");
  return value.get<double>();
}

double number_or(const Json& block, const std::string& block_name,
                 const std::string& key, double fallback) {
  if (!block.is_object() || !block.contains(key)) return fallback;
  return number(block.at(key), block_name + "." + key);
}

bool bool_or(const Json& block, const std::string& block_name,
             const std::string& key, bool fallback) {
  if (!block.is_object() || !block.contains(key)) return fallback;
  if (!block.at(key).is_boolean())
    throw ConfigError("field '" + block_name + "." + key + "' must be a boolean");
  return block.at(key).get<bool>();
}

std::string string_or(const Json& block, const std::string& block_name,
                      const std::string& key, const std::string& fallback) {
  if (!block.is_object() || !block.contains(key)) return fallback;
  if (!block.at(key).is_string())
    throw ConfigError("field '" + block_name + "." + key + "' must be a string");
  return block.at(key).get<std::string>();
}

Vector number_array(const Json& value, const std::string& name) {
  if (!value.is_array() || value.empty())
    throw ConfigError("field '" + name + "' must be a non-empty array");
  Vector out(static_cast<Eigen::Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i)
    out(static_cast<Eigen::Index>(i)) =
        number(value[i], name + "[" + std::to_string(i) + "]");
  return out;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

PropagatorOptions parse_solver(const Json& block, int threads) {
  PropagatorOptions opts;
  const std::string name = "solver";
  const auto hom = string_or(block, name, "homogeneous", "numeric");
  if (hom == "numeric")
    opts.homogeneous.method = HomogeneousMethod::kNumeric;
  else if (hom == "analytic")
    opts.homogeneous.method = HomogeneousMethod::kAnalytic;
  else
    throw ConfigError("field 'solver.homogeneous' must be 'numeric' or 'analytic'");
  opts.homogeneous.tolerance =
      number_or(block, name, "tolerance", opts.homogeneous.tolerance);
  opts.homogeneous.points_per_period = static_cast<int>(number_or(
      block, name, "points_per_period", opts.homogeneous.points_per_period));
  if (!(opts.homogeneous.tolerance > 0.0) ||
      opts.homogeneous.points_per_period < 8)
    throw ConfigError("solver.tolerance must be > 0 and solver.points_per_period >= 8");
  const auto diff = string_or(block, name, "diffusion", "spectral");
  if (diff == "spectral")
    opts.diffusion.method = DiffusionMethod::kSpectral;
  else if (diff == "adaptive")
    opts.diffusion.method = DiffusionMethod::kAdaptive;
  else
    throw ConfigError("field 'solver.diffusion' must be 'spectral' or 'adaptive'");
  opts.diffusion.frequency.threads = threads;
  return opts;
}

Json solver_json(const PropagatorOptions& opts) {
  return {
      {"homogeneous", opts.homogeneous.method == HomogeneousMethod::kNumeric
                          ? "numeric"
                          : "analytic"},
      {"tolerance", opts.homogeneous.tolerance},
      {"points_per_period", opts.homogeneous.points_per_period},
      {"diffusion", opts.diffusion.method == DiffusionMethod::kSpectral
                        ? "spectral"
                        : "adaptive"},
  };
}

}  // namespace

ModelSpec build_model(const Json& model, const Json& bath, double* scale,
                      std::optional<double>* delta) {
  if (!model.is_object()) throw ConfigError("missing block 'model'");
  if (!bath.is_object()) throw ConfigError("missing block 'bath'");

  ModelSpec spec;
  double s = 1.0;
  std::optional<double> d;
  const bool has_delta = model.contains("delta");
  const bool has_freq = model.contains("frequencies");
  if (has_delta == has_freq)
    throw ConfigError(
        "model block needs exactly one of 'model.delta' or 'model.frequencies'");
  if (has_delta) {
    d = number(model.at("delta"), "model.delta");
    s = number_or(model, "model", "scale", 1.0);
    if (!(std::abs(*d) < 1.0) || !(s > 0.0))
      throw ConfigError("model.delta must lie in (-1, 1) and model.scale must be > 0");
    const auto e = expand_params({*d, 0.0, s});
    spec.frequencies = Vector{{e.omega1, e.omega2}};
  } else {
    spec.frequencies = number_array(model.at("frequencies"), "model.frequencies");
    s = spec.frequencies.norm();
  }
  const auto n = spec.frequencies.size();
  if (model.contains("N") &&
      number(model.at("N"), "model.N") != static_cast<double>(n))
    throw ConfigError("model.N does not match the number of frequencies");
  spec.masses = model.contains("masses")
                    ? number_array(model.at("masses"), "model.masses")
                    : Vector::Ones(n);
  spec.weights = model.contains("weights")
                     ? number_array(model.at("weights"), "model.weights")
                     : Vector::Ones(n);
  if (spec.masses.size() != n || spec.weights.size() != n)
    throw ConfigError("model.masses and model.weights must have one entry per frequency");

  auto& dens = spec.density;
  dens.gamma = number(require(bath, "bath", "gamma"), "bath.gamma");
  dens.cutoff = number(require(bath, "bath", "cutoff"), "bath.cutoff");
  dens.ref_frequency = number_or(bath, "bath", "ref_frequency", 1.0);
  dens.exponent = number_or(bath, "bath", "exponent", 0.0);
  dens.mass = spec.masses(0);
  const bool has_theta = bath.contains("theta");
  const bool has_temp = bath.contains("temperature");
  if (has_theta == has_temp)
    throw ConfigError(
        "bath block needs exactly one of 'bath.theta' or 'bath.temperature'");
  spec.temperature = has_theta ? number(bath.at("theta"), "bath.theta") * s
                               : number(bath.at("temperature"), "bath.temperature");
  spec.renormalized = bool_or(bath, "bath", "renormalized", true);
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (scale) *scale = s;
  if (delta) *delta = d;
  return spec;
}

double RunConfig::time_unit() const {
  return grid.gamma_units ? 1.0 / model.density.gamma : 1.0;
}

std::vector<double> RunConfig::times() const {
  return uniform_grid(t_max(), grid.points);
}

Json RunConfig::resolved() const {
  Json m = {
      {"masses", to_json(model.masses)},
      {"frequencies", to_json(model.frequencies)},
      {"weights", to_json(model.weights)},
      {"scale", scale},
  };
  if (delta) m["delta"] = *delta;
  const auto& d = model.density;
  Json b = {
      {"gamma", d.gamma},
      {"cutoff", d.cutoff},
      {"ref_frequency", d.ref_frequency},
      {"exponent", d.exponent},
      {"temperature", model.temperature},
      {"theta", model.temperature / scale},
      {"renormalized", model.renormalized},
  };
  return {
      {"model", m},
      {"bath", b},
      {"grid",
       {{"t_max", grid.t_max},
        {"points", grid.points},
        {"unit", grid.gamma_units ? "gamma" : "absolute"}}},
      {"task", task},
      {"solver", solver_json(solver)},
      {"output",
       {{"prefix", output.prefix},
        {"svg", output.svg},
        {"plot_kind", output.plot_kind}}},
      {"seed", seed},
  };
}

RunConfig parse_config(const Json& config, std::uint64_t seed, int threads) {
  if (!config.is_object()) throw ConfigError("configuration must be a JSON object");
  RunConfig rc;
  rc.seed = seed;
  rc.threads = threads;
  rc.model_block = config.contains("model") ? config.at("model") : Json();
  rc.bath_block = config.contains("bath") ? config.at("bath") : Json();
  rc.model = build_model(rc.model_block, rc.bath_block, &rc.scale, &rc.delta);

  if (!config.contains("grid")) throw ConfigError("missing block 'grid'");
  const auto& g = config.at("grid");
  rc.grid.t_max = number(require(g, "grid", "t_max"), "grid.t_max");
  const double points = number(require(g, "grid", "points"), "grid.points");
  if (!(rc.grid.t_max > 0.0)) throw ConfigError("grid.t_max must be > 0");
  if (points < 2 || points != std::floor(points) || points > 1e7)
    throw ConfigError("grid.points must be an integer >= 2");
  rc.grid.points = static_cast<int>(points);
  const auto unit = string_or(g, "grid", "unit", "gamma");
  if (unit != "gamma" && unit != "absolute")
    throw ConfigError("grid.unit must be 'gamma' or 'absolute'");
  rc.grid.gamma_units = unit == "gamma";
  if (rc.grid.gamma_units && !(rc.model.density.gamma > 0.0))
    throw ConfigError("grid.unit 'gamma' requires bath.gamma > 0");

  if (config.contains("task")) {
    rc.task = config.at("task");
    if (!rc.task.is_object()) throw ConfigError("block 'task' must be an object");
  }
  rc.solver = parse_solver(config.contains("solver") ? config.at("solver")
                                                     : Json::object(),
                           threads);
  const Json out = config.contains("output") ? config.at("output") : Json::object();
  rc.output.prefix = string_or(out, "output", "prefix", "");
  rc.output.svg = bool_or(out, "output", "svg", false);
  rc.output.plot_kind = string_or(out, "output", "plot_kind", "lines");
  return rc;
}

RunConfig load_config(const std::string& path, std::uint64_t seed, int threads) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  Json j;
  try {
    j = Json::parse(buf.str(), nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
  return parse_config(j, seed, threads);
}

Matrix initial_covariance(const Json& spec, const PhaseSpaceLayout& layout,
                          std::uint64_t seed) {
  const int dim = layout.dimension();
  const std::string name = "task.initial_state";
  if (!spec.is_object()) throw ConfigError("field '" + name + "' must be an object");
  if (spec.contains("matrix")) {
    const auto& rows = spec.at("matrix");
    if (!rows.is_array() || static_cast<int>(rows.size()) != dim)
      throw ConfigError(name + ".matrix must be " + std::to_string(dim) + "x" +
                        std::to_string(dim));
    Matrix v(dim, dim);
    for (int i = 0; i < dim; ++i) {
      const Vector row = number_array(rows[i], name + ".matrix");
      if (row.size() != dim)
        throw ConfigError(name + ".matrix must be " + std::to_string(dim) + "x" +
                          std::to_string(dim));
      v.row(i) = row.transpose();
    }
    return v;
  }
  const auto preset = string_or(spec, name, "preset", "");
  if (preset.empty())
    throw ConfigError("missing field '" + name + ".preset' (or '" + name + ".matrix')");
  if (preset == "vacuum") return vacuum_covariance(layout);
  if (preset == "thermal")
    return thermal_covariance(layout, number_or(spec, name, "nu", 0.5));
  if (preset == "random-pure") {
    Rng rng(seed);
    return random_pure_covariance(layout, rng,
                                  number_or(spec, name, "max_squeeze", 1.5));
  }
  if (layout.oscillators() != 2)
    throw ConfigError("preset '" + preset + "' needs two oscillators");
  if (preset == "two-mode-squeezed")
    return two_mode_squeezed_covariance(
        number(require(spec, name, "r"), name + ".r"));
  if (preset == "factorized-squeezed")
    return factorized_squeezed_covariance(
        number(require(spec, name, "r1"), name + ".r1"),
        number(require(spec, name, "r2"), name + ".r2"));
  throw ConfigError("unknown preset '" + preset + "'");
}

}  // namespace qbm::cli
