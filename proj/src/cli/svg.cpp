#include "qbm/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "qbm/cli/config.hpp"

namespace qbm::cli {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                    "#bcbd22", "#17becf"};

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;  // in transformed units

  double transform(double v) const { return log ? std::log10(v) : v; }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (double e = std::ceil(lo); e <= hi + 1e-9; e += 1.0) out.push_back(e);
      return out;
    }
    const double span = hi - lo;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (raw <= m * mag) {
        step = m * mag;
        break;
      }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
      out.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
    return out;
  }

  std::string label(double tick) const {
    return tick_label(log ? std::pow(10.0, tick) : tick);
  }
};

void fit(Axis& axis, double lo, double hi) {
  if (!(hi > lo)) {
    const double pad = lo == 0.0 ? 1.0 : 0.5 * std::abs(lo);
    lo -= axis.log ? 0.5 : pad;
    hi += axis.log ? 0.5 : pad;
  }
  const double margin = axis.log ? 0.0 : 0.03 * (hi - lo);
  axis.lo = lo - margin;
  axis.hi = hi + margin;
}

}  // namespace

PlotOptions plot_options_for(const std::string& kind) {
  PlotOptions o;
  if (kind == "lines") return o;
  if (kind == "semilogy") {
    o.log_y = true;
    return o;
  }
  if (kind == "loglog") {
    o.log_x = o.log_y = true;
    return o;
  }
  throw ConfigError("unknown plot kind '" + kind + "' (lines, semilogy, loglog)");
}

std::string render_svg(const CsvTable& table, const PlotOptions& options) {
  if (table.columns.empty() || table.rows.empty())
    throw ConfigError("CSV has no data rows");
  const int xc = options.x.empty() ? 0 : table.column(options.x);
  if (xc < 0) throw ConfigError("unknown column '" + options.x + "'");

  std::vector<int> ys;
  if (options.y.empty()) {
    for (int c = 0; c < static_cast<int>(table.columns.size()); ++c) {
      if (c == xc) continue;
      const bool numeric = std::any_of(
          table.rows.begin(), table.rows.end(),
          [c](const auto& row) { return row[c].number.has_value(); });
      if (numeric) ys.push_back(c);
    }
  } else {
    for (const auto& name : options.y) {
      const int c = table.column(name);
      if (c < 0) throw ConfigError("unknown column '" + name + "'");
      ys.push_back(c);
    }
  }
  if (ys.empty()) throw ConfigError("CSV has no numeric columns to plot");

  Axis ax{options.log_x}, ay{options.log_y};
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& row : table.rows) {
    if (!row[xc].number || !ax.usable(*row[xc].number)) continue;
    for (int c : ys) {
      if (!row[c].number || !ay.usable(*row[c].number)) continue;
      const double x = ax.transform(*row[xc].number);
      const double y = ay.transform(*row[c].number);
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
  if (!std::isfinite(xlo)) throw ConfigError("no plottable points in CSV");
  fit(ax, xlo, xhi);
  fit(ay, ylo, yhi);

  const double w = options.width, h = options.height;
  const double left = 80, right = 190, top = 40, bottom = 60;
  const double pw = w - left - right, ph = h - top - bottom;
  auto px = [&](double x) { return left + (x - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double y) { return top + (ay.hi - y) / (ay.hi - ay.lo) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(w) +
       "\" height=\"" + fixed(h) + "\" viewBox=\"0 0 " + fixed(w) + " " +
       fixed(h) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty())
    s += "<text x=\"" + fixed(left + pw / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(options.title) + "</text>\n";

  for (double t : ax.ticks()) {
    const double x = px(t);
    s += "<line x1=\"" + fixed(x) + "\" y1=\"" + fixed(top) + "\" x2=\"" +
         fixed(x) + "\" y2=\"" + fixed(top + ph) +
         "\" stroke=\"#e0e0e0\"/>\n";
    s += "<text x=\"" + fixed(x) + "\" y=\"" + fixed(top + ph + 18) +
         "\" text-anchor=\"middle\">" + ax.label(t) + "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = py(t);
    s += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(y) + "\" x2=\"" +
         fixed(left + pw) + "\" y2=\"" + fixed(y) +
         "\" stroke=\"#e0e0e0\"/>\n";
    s += "<text x=\"" + fixed(left - 6) + "\" y=\"" + fixed(y + 4) +
         "\" text-anchor=\"end\">" + ay.label(t) + "</text>\n";
  }
  if (!ay.log && ay.lo < 0.0 && ay.hi > 0.0)
    s += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(py(0.0)) +
         "\" x2=\"" + fixed(left + pw) + "\" y2=\"" + fixed(py(0.0)) +
         "\" stroke=\"#808080\"/>\n";
  s += "<rect x=\"" + fixed(left) + "\" y=\"" + fixed(top) + "\" width=\"" +
       fixed(pw) + "\" height=\"" + fixed(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  s += "<text x=\"" + fixed(left + pw / 2) + "\" y=\"" + fixed(h - 16) +
       "\" text-anchor=\"middle\">" + escape(table.columns[xc]) +
       (ax.log ? " (log)" : "") + "</text>\n";

  for (std::size_t k = 0; k < ys.size(); ++k) {
    const int c = ys[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::string d;
    bool pen = false;
    for (const auto& row : table.rows) {
      const bool ok = row[xc].number && row[c].number &&
                      ax.usable(*row[xc].number) && ay.usable(*row[c].number);
      if (!ok) {
        pen = false;
        continue;
      }
      d += pen ? " L" : (d.empty() ? "M" : " M");
      d += fixed(px(ax.transform(*row[xc].number))) + "," +
           fixed(py(ay.transform(*row[c].number)));
      pen = true;
    }
    if (!d.empty())
      s += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.5\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    s += "<line x1=\"" + fixed(left + pw + 12) + "\" y1=\"" + fixed(ly) +
         "\" x2=\"" + fixed(left + pw + 36) + "\" y2=\"" + fixed(ly) +
         "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + fixed(left + pw + 42) + "\" y=\"" + fixed(ly + 4) +
         "\">" + escape(table.columns[c]) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace qbm::cli
