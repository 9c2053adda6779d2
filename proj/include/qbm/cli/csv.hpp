#pragma once

#include <optional>
#include <string>
#include <vector>

namespace qbm::cli {

// Cells are numbers, empty, or text (status columns).
struct Cell {
  std::optional<double> number;
  std::string text;

  static Cell of(double v) { return {v, {}}; }
  static Cell empty() { return {}; }
  static Cell label(std::string s) { return {std::nullopt, std::move(s)}; }
};

struct CsvTable {
  std::string comment;  // written as one '#' line
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  int column(const std::string& name) const;  // -1 if absent
};

// %.12g
std::string format_number(double v);
std::string to_csv(const CsvTable& table);
void write_text(const std::string& path, const std::string& text);
void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

}  // namespace qbm::cli
