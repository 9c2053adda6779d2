#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbm/model.hpp"
#include "qbm/phase_space.hpp"
#include "qbm/propagator.hpp"

namespace qbm::cli {

using Json = nlohmann::json;

// Malformed or inconsistent configuration (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File system failure (exit code 2).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  double t_max = 0.0;
  int points = 0;
  bool gamma_units = true;  // t_max is given in units of 1/gamma
};

struct OutputSpec {
  std::string prefix;  // file stem; defaults to the subcommand name
  bool svg = false;    // also render the CSV as an SVG plot
  std::string plot_kind = "lines";
};

struct RunConfig {
  Json model_block;
  Json bath_block;
  ModelSpec model;
  double scale = 1.0;  // theta = temperature / scale
  std::optional<double> delta;
  GridSpec grid;
  Json task = Json::object();
  PropagatorOptions solver;
  OutputSpec output;
  std::uint64_t seed = 0;
  int threads = 1;

  // Length of one grid unit in absolute time.
  double time_unit() const;
  double t_max() const { return grid.t_max * time_unit(); }
  std::vector<double> times() const;
  // Normalized configuration with every default filled in. Threads are left
  // out because they do not change any result.
  Json resolved() const;
};

// Builds the system and bath from the "model" and "bath" blocks.
// `scale` receives the frequency scale used to convert theta to a temperature.
ModelSpec build_model(const Json& model, const Json& bath, double* scale,
                      std::optional<double>* delta = nullptr);

RunConfig parse_config(const Json& config, std::uint64_t seed = 0,
                       int threads = 1);
RunConfig load_config(const std::string& path, std::uint64_t seed = 0,
                      int threads = 1);

// Initial covariance from {"preset": name, ...} or {"matrix": [[...]]}.
// Presets: vacuum, thermal (nu), two-mode-squeezed (r),
// factorized-squeezed (r1, r2), random-pure (max_squeeze; uses the seed).
Matrix initial_covariance(const Json& spec, const PhaseSpaceLayout& layout,
                          std::uint64_t seed);

}  // namespace qbm::cli
