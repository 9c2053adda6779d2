#pragma once

#include <string>
#include <vector>

#include "qbm/cli/csv.hpp"

namespace qbm::cli {

struct PlotOptions {
  std::string x;               // defaults to the first column
  std::vector<std::string> y;  // defaults to every other numeric column
  bool log_x = false;
  bool log_y = false;
  std::string title;
  int width = 800;
  int height = 500;
};

// "lines", "semilogy" or "loglog".
PlotOptions plot_options_for(const std::string& kind);

// Throws ConfigError for unknown columns or a table without data.
std::string render_svg(const CsvTable& table, const PlotOptions& options);

}  // namespace qbm::cli
