#pragma once

#include <string>
#include <vector>

#include "qbm/cli/config.hpp"
#include "qbm/cli/csv.hpp"
#include "qbm/cli/svg.hpp"

namespace qbm::cli {

enum ExitCode { kOk = 0, kUsage = 1, kIo = 2, kNumeric = 3 };

// Unphysical user-supplied state (exit code 3).
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommandResult {
  CsvTable table;
  std::vector<std::string> files;
  std::string summary;
};

// Tables are computed first and then written below `out_dir`.
CsvTable propagator_table(const RunConfig& config);
CsvTable bounds_table(const RunConfig& config);
CsvTable tdis_table(const RunConfig& config);

struct OracleReport {
  CsvTable table;
  double max_deviation = 0.0;
  double threshold = 0.0;
  bool pass = false;
  int modes = 0;
  double omega_max = 0.0;
  double recurrence_time = 0.0;
  std::vector<std::string> warnings;
};

OracleReport oracle_check(const RunConfig& config);

CommandResult cmd_propagator(const RunConfig& config, const std::string& out_dir);
CommandResult cmd_bounds(const RunConfig& config, const std::string& out_dir);
CommandResult cmd_tdis(const RunConfig& config, const std::string& out_dir);
CommandResult cmd_oracle_check(const RunConfig& config,
                               const std::string& out_dir);
// Writes `svg_path` (defaults to the CSV path with an .svg extension).
CommandResult cmd_plot(const std::string& csv_path, const PlotOptions& options,
                       std::string svg_path = {});

// Full command line including argv[0]; returns the exit code.
int run(int argc, const char* const* argv);

}  // namespace qbm::cli
