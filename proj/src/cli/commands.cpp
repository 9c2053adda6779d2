#include "qbm/cli/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "qbm/gaussian_states.hpp"
#include "qbm/oracle.hpp"
#include "qbm/propagator.hpp"
#include "qbm/uncertainty.hpp"

namespace qbm::cli {
namespace {

std::string index_name(const char* prefix, int i, int j) {
  return std::string(prefix) + "_" + std::to_string(i) + "_" + std::to_string(j);
}

std::string time_column(const RunConfig& config) {
  return config.grid.gamma_units ? "gamma_t" : "t";
}

CsvTable new_table(const RunConfig& config) {
  CsvTable table;
  table.comment = config.resolved().dump();
  table.columns.push_back(time_column(config));
  return table;
}

std::vector<int> subset_from(const Json& task, const char* key, int n,
                             std::vector<int> fallback) {
  if (!task.contains(key)) return fallback;
  const auto& a = task.at(key);
  if (!a.is_array() || a.empty())
    throw ConfigError(std::string("field 'task.") + key +
                      "' must be a non-empty array of oscillator indices");
  std::vector<int> out;
  for (const auto& e : a) {
    if (!e.is_number_integer() || e.get<int>() < 0 || e.get<int>() >= n)
      throw ConfigError(std::string("field 'task.") + key +
                        "' holds an invalid oscillator index");
    out.push_back(e.get<int>());
  }
  return out;
}

std::optional<Matrix> supplied_state(const RunConfig& config,
                                     const PhaseSpaceLayout& layout) {
  if (!config.task.contains("initial_state")) return std::nullopt;
  Matrix v0;
  try {
    v0 = initial_covariance(config.task.at("initial_state"), layout, config.seed);
    require_symmetric(v0, layout.dimension(), "task.initial_state", 1e-10);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const double lam = min_ppt_eigenvalue(v0, symplectic_form(layout));
  if (lam < -1e-9)
    throw StateError("initial covariance is unphysical: smallest eigenvalue of "
                     "V + (i/2) Omega is " + format_number(lam));
  return v0;
}

double task_number(const Json& task, const char* key, double fallback) {
  if (!task.contains(key)) return fallback;
  if (!task.at(key).is_number())
    throw ConfigError(std::string("field 'task.") + key + "' must be a number");
  return task.at(key).get<double>();
}

std::vector<double> task_list(const Json& task, const char* key) {
  const auto& a = task.at(key);
  if (a.is_number()) return {a.get<double>()};
  if (!a.is_array() || a.empty())
    throw ConfigError(std::string("field 'task.") + key +
                      "' must be a number or a non-empty array");
  std::vector<double> out;
  for (const auto& e : a) {
    if (!e.is_number())
      throw ConfigError(std::string("field 'task.") + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::string output_path(const RunConfig& config, const std::string& out_dir,
                        const std::string& name, const std::string& ext) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "'");
  const std::string stem = config.output.prefix.empty() ? name : config.output.prefix;
  return (std::filesystem::path(out_dir) / (stem + ext)).string();
}

CommandResult finish(const RunConfig& config, const std::string& out_dir,
                     const std::string& name, CsvTable table) {
  CommandResult result;
  const auto csv = output_path(config, out_dir, name, ".csv");
  write_csv(csv, table);
  result.files.push_back(csv);
  if (config.output.svg) {
    auto opts = plot_options_for(config.output.plot_kind);
    opts.title = name;
    const auto svg = output_path(config, out_dir, name, ".svg");
    write_text(svg, render_svg(table, opts));
    result.files.push_back(svg);
  }
  result.table = std::move(table);
  return result;
}

// Runs body(i) for i in [0, count) on up to `threads` workers.
template <class F>
void parallel_for(int count, int threads, F body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

CsvTable propagator_table(const RunConfig& config) {
  const int dim = 2 * config.model.size();
  const auto times = config.times();
  const Propagator prop(config.model, times, config.solver);
  const auto pairs = prop.evaluate(times);

  auto table = new_table(config);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) table.columns.push_back(index_name("R", i, j));
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) table.columns.push_back(index_name("S", i, j));

  const double unit = config.time_unit();
  for (const auto& p : pairs) {
    std::vector<Cell> row{Cell::of(p.t / unit)};
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) row.push_back(Cell::of(p.R(i, j)));
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) row.push_back(Cell::of(p.S(i, j)));
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable bounds_table(const RunConfig& config) {
  const int n = config.model.size();
  const PhaseSpaceLayout layout(n);
  const bool tripartite =
      config.task.contains("tripartite") && config.task.at("tripartite").is_boolean() &&
      config.task.at("tripartite").get<bool>();
  if (tripartite && n < 3)
    throw ConfigError("task.tripartite needs at least three oscillators");
  if (!tripartite && n != 2)
    throw ConfigError("bounds needs two oscillators (or task.tripartite with three)");

  const auto v0 = supplied_state(config, layout);
  const auto times = config.times();
  const Propagator prop(config.model, times, config.solver);
  const auto pairs = prop.evaluate(times);

  auto table = new_table(config);
  const double unit = config.time_unit();
  if (!tripartite) {
    const auto subset = subset_from(config.task, "partial_transpose", n, {1});
    const Matrix pt = partial_transpose_form(layout, subset);
    for (const char* c : {"lambda_bound", "lambda_tilde_bound", "area_xp_pp",
                          "area_xp_mm", "area_xp_pm", "area_xp_mp"})
      table.columns.push_back(c);
    if (v0) table.columns.push_back("lambda_min");
    for (const auto& p : pairs) {
      const auto areas = area_lower_bounds(p, config.model.density.gamma);
      std::vector<Cell> row{Cell::of(p.t / unit),
                            Cell::of(lambda_bound(p, pt)),
                            Cell::of(lambda_tilde_bound(p, pt)),
                            Cell::of(areas.xp_plus_plus),
                            Cell::of(areas.xp_minus_minus),
                            Cell::of(areas.xp_plus_minus),
                            Cell::of(areas.xp_minus_plus)};
      if (v0) row.push_back(Cell::of(lambda_min(evolve_covariance(*v0, p), pt)));
      table.rows.push_back(std::move(row));
    }
    return table;
  }

  for (int i = 0; i < n; ++i)
    table.columns.push_back("necessary_" + std::to_string(i));
  for (int i = 0; i < n; ++i)
    table.columns.push_back("sufficiency_" + std::to_string(i));
  table.columns.push_back("all_sufficiency_negative");
  if (v0)
    for (int i = 0; i < n; ++i)
      table.columns.push_back("lambda_min_" + std::to_string(i));
  for (const auto& p : pairs) {
    const auto b = tripartite_bounds(p);
    std::vector<Cell> row{Cell::of(p.t / unit)};
    for (double v : b.necessary) row.push_back(Cell::of(v));
    for (double v : b.sufficiency) row.push_back(Cell::of(v));
    row.push_back(Cell::of(b.all_sufficiency_negative ? 1.0 : 0.0));
    if (v0) {
      const Matrix vt = evolve_covariance(*v0, p);
      for (int i = 0; i < n; ++i) {
        const int split[] = {i};
        row.push_back(Cell::of(lambda_min(vt, partial_transpose_form(layout, split))));
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable tdis_table(const RunConfig& config) {
  if (config.model.size() != 2) throw ConfigError("tdis needs two oscillators");
  if (!config.task.contains("theta")) throw ConfigError("missing field 'task.theta'");
  const auto thetas = task_list(config.task, "theta");
  std::vector<double> deltas;
  if (config.task.contains("delta")) {
    if (!config.delta)
      throw ConfigError("task.delta sweeps need the model given by 'model.delta'");
    deltas = task_list(config.task, "delta");
  } else {
    const auto& w = config.model.frequencies;
    deltas = {config.delta ? *config.delta
                           : (w(0) * w(0) - w(1) * w(1)) / w.squaredNorm()};
  }
  const double tolerance = task_number(config.task, "tolerance", 1e-4);
  if (!(tolerance > 0.0)) throw ConfigError("task.tolerance must be > 0");
  const auto subset = subset_from(config.task, "partial_transpose", 2, {1});

  struct Point {
    double theta, delta;
    DisentanglementTime result;
  };
  std::vector<Point> points;
  for (double d : deltas)
    for (double th : thetas) points.push_back({th, d, {}});

  const PhaseSpaceLayout layout(2);
  const Matrix pt = partial_transpose_form(layout, subset);
  const double unit = config.time_unit();
  const int workers = std::max(1, config.threads);
  auto solver = config.solver;
  if (workers > 1) solver.diffusion.frequency.threads = 1;

  parallel_for(static_cast<int>(points.size()), workers, [&](int k) {
    auto& point = points[static_cast<std::size_t>(k)];
    Json model = config.model_block;
    Json bath = config.bath_block;
    if (config.delta) model["delta"] = point.delta;
    bath.erase("temperature");
    bath["theta"] = point.theta;
    double scale = 1.0;
    const ModelSpec spec = build_model(model, bath, &scale);
    WitnessCurve curve;
    curve.times = config.times();
    const Propagator prop(spec, curve.times, solver);
    for (const auto& p : prop.evaluate(curve.times))
      curve.values.push_back(lambda_bound(p, pt));
    const WitnessRefiner refine = [&](std::span<const double> ts) {
      std::vector<double> out;
      for (const auto& p : prop.evaluate(ts)) out.push_back(lambda_bound(p, pt));
      return out;
    };
    point.result = disentanglement_time(curve, refine, tolerance * unit);
  });

  CsvTable table;
  table.comment = config.resolved().dump();
  table.columns = {"theta", "delta", "t_dis_gamma", "status"};
  const double gamma = config.model.density.gamma;
  for (const auto& p : points) {
    const bool crossed = p.result.status == CrossingStatus::kCrossed;
    table.rows.push_back(
        {Cell::of(p.theta), Cell::of(p.delta),
         crossed && gamma > 0.0 ? Cell::of(p.result.time * gamma) : Cell::empty(),
         Cell::label(crossed ? "crossed" : "no-crossing")});
  }
  return table;
}

OracleReport oracle_check(const RunConfig& config) {
  OracleReport report;
  const auto& task = config.task;
  if (!task.contains("modes")) throw ConfigError("missing field 'task.modes'");
  if (!task.contains("omega_max")) throw ConfigError("missing field 'task.omega_max'");
  const double modes = task_number(task, "modes", 0);
  if (modes != std::floor(modes) || modes < 1 || modes > 1e5)
    throw ConfigError("task.modes must be a positive integer");
  report.modes = static_cast<int>(modes);
  report.omega_max = task_number(task, "omega_max", 0.0);
  report.threshold = task_number(task, "threshold", 5e-3);

  const PhaseSpaceLayout layout(config.model.size());
  const Matrix v0 = supplied_state(config, layout).value_or(vacuum_covariance(layout));
  DiscreteBath bath;
  try {
    bath = discretize_bath(config.model.density, report.modes, report.omega_max);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  report.recurrence_time = bath.recurrence_time();
  report.warnings = bath.warnings;
  if (config.t_max() > report.recurrence_time)
    throw NumericError("time window " + format_number(config.t_max()) +
                       " exceeds the bath recurrence time " +
                       format_number(report.recurrence_time));

  const ClosedSystem closed(config.model, std::move(bath));
  const auto times = config.times();
  const auto exact = closed.evolve_system(closed.initial_covariance(v0), times);
  const Propagator prop(config.model, times, config.solver);
  const auto pairs = prop.evaluate(times);

  report.table = new_table(config);
  report.table.columns.push_back("deviation");
  const double unit = config.time_unit();
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double dev =
        (exact[k] - evolve_covariance(v0, pairs[k])).cwiseAbs().maxCoeff();
    report.max_deviation = std::max(report.max_deviation, dev);
    report.table.rows.push_back({Cell::of(times[k] / unit), Cell::of(dev)});
  }
  report.pass = report.max_deviation < report.threshold;
  return report;
}

CommandResult cmd_propagator(const RunConfig& config, const std::string& out_dir) {
  auto r = finish(config, out_dir, "propagator", propagator_table(config));
  r.summary = "wrote " + std::to_string(r.table.rows.size()) + " rows";
  return r;
}

CommandResult cmd_bounds(const RunConfig& config, const std::string& out_dir) {
  auto r = finish(config, out_dir, "bounds", bounds_table(config));
  r.summary = "wrote " + std::to_string(r.table.rows.size()) + " rows";
  return r;
}

CommandResult cmd_tdis(const RunConfig& config, const std::string& out_dir) {
  auto r = finish(config, out_dir, "tdis", tdis_table(config));
  r.summary = "wrote " + std::to_string(r.table.rows.size()) + " sweep points";
  return r;
}

CommandResult cmd_oracle_check(const RunConfig& config, const std::string& out_dir) {
  auto report = oracle_check(config);
  auto r = finish(config, out_dir, "oracle_check", std::move(report.table));
  const Json summary = {
      {"max_deviation", report.max_deviation},
      {"threshold", report.threshold},
      {"pass", report.pass},
      {"modes", report.modes},
      {"omega_max", report.omega_max},
      {"recurrence_time", report.recurrence_time},
      {"warnings", report.warnings},
  };
  const auto path = output_path(config, out_dir,
                                (config.output.prefix.empty() ? std::string("oracle_check")
                                                              : config.output.prefix) +
                                    "_report",
                                ".json");
  write_text(path, summary.dump(2) + "\n");
  r.files.push_back(path);
  r.summary = std::string(report.pass ? "pass" : "fail") + ": max deviation " +
              format_number(report.max_deviation) + " (threshold " +
              format_number(report.threshold) + ")";
  return r;
}

CommandResult cmd_plot(const std::string& csv_path, const PlotOptions& options,
                       std::string svg_path) {
  CommandResult r;
  r.table = read_csv(csv_path);
  const auto svg = render_svg(r.table, options);
  if (svg_path.empty())
    svg_path = std::filesystem::path(csv_path).replace_extension(".svg").string();
  write_text(svg_path, svg);
  r.files.push_back(svg_path);
  r.summary = "plotted " + std::to_string(r.table.rows.size()) + " rows";
  return r;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Gaussian propagator for quantum Brownian motion"};
  app.fallthrough();
  app.require_subcommand(1);
  std::string config_path, out_dir = ".";
  int threads = 1;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 256));
  app.add_option("--seed", seed, "Seed for random initial states");

  auto* propagator = app.add_subcommand("propagator", "Write R(t) and S(t)");
  auto* bounds = app.add_subcommand("bounds", "Write entanglement bounds and areas");
  auto* tdis = app.add_subcommand("tdis", "Sweep the disentanglement time");
  auto* oracle = app.add_subcommand("oracle-check", "Compare with a discrete bath");
  auto* plot = app.add_subcommand("plot", "Render a CSV as SVG");
  std::string csv_path, kind = "lines", svg_path, title, x;
  std::vector<std::string> ys;
  plot->add_option("--csv", csv_path, "CSV written by this tool")->required();
  plot->add_option("--kind", kind, "lines, semilogy or loglog");
  plot->add_option("--svg", svg_path, "Output path");
  plot->add_option("--x", x, "Column for the horizontal axis");
  plot->add_option("--y", ys, "Columns to draw")->delimiter(',');
  plot->add_option("--title", title, "Plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    CommandResult result;
    if (plot->parsed()) {
      auto options = plot_options_for(kind);
      options.x = x;
      options.y = ys;
      options.title = title;
      result = cmd_plot(csv_path, options, svg_path);
    } else {
      if (config_path.empty()) {
        std::cerr << "error: --config is required\n";
        return kUsage;
      }
      const auto config = load_config(config_path, seed, threads);
      if (propagator->parsed())
        result = cmd_propagator(config, out_dir);
      else if (bounds->parsed())
        result = cmd_bounds(config, out_dir);
      else if (tdis->parsed())
        result = cmd_tdis(config, out_dir);
      else if (oracle->parsed())
        result = cmd_oracle_check(config, out_dir);
    }
    std::cout << result.summary << "\n";
    for (const auto& f : result.files) std::cout << f << "\n";
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const StateError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  }
}

}  // namespace qbm::cli
