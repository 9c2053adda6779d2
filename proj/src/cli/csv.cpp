#include "qbm/cli/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qbm/cli/config.hpp"

namespace qbm::cli {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Cell parse_cell(const std::string& s) {
  if (s.empty()) return Cell::empty();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() + s.size()) return Cell::of(v);
  return Cell::label(s);
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  if (!table.comment.empty()) out += "# " + table.comment + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (row[i].number)
        out += format_number(*row[i].number);
      else
        out += row[i].text;
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

void write_csv(const std::string& path, const CsvTable& table) {
  write_text(path, to_csv(table));
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (table.comment.empty())
        table.comment = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
      continue;
    }
    auto cells = split(line);
    if (!header) {
      table.columns = std::move(cells);
      header = true;
      continue;
    }
    std::vector<Cell> row;
    row.reserve(table.columns.size());
    for (std::size_t i = 0; i < table.columns.size(); ++i)
      row.push_back(i < cells.size() ? parse_cell(cells[i]) : Cell::empty());
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace qbm::cli
