#include "curveflow/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace curveflow {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw ConfigError("csv: empty header");
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  add_row(std::move(cells));
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw ConfigError("csv: row width does not match header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::write(const std::string& path) const { write_text(path, str()); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << text;
  os.flush();
  if (!os) throw IoError("write failed: " + path);
}

namespace {

constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 20, kTop = 36, kBottom = 50;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string esc(const std::string& s) {
  std::string o;
  for (char ch : s) {
    switch (ch) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += ch;
    }
  }
  return o;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kW - kLeft - kRight); }
  double py(double y) const { return kH - kBottom - (y - y0) / (y1 - y0) * (kH - kTop - kBottom); }
};

void pad(double& lo, double& hi) {
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
}

void axes(std::ostringstream& os, const Frame& f, const PlotLabels& labels) {
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kW - kLeft - kRight
     << "\" height=\"" << kH - kTop - kBottom << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = f.x0 + (f.x1 - f.x0) * k / 4.0;
    const double y = f.y0 + (f.y1 - f.y0) * k / 4.0;
    os << "<text x=\"" << fmt(f.px(x)) << "\" y=\"" << fmt(kH - kBottom + 16)
       << "\" font-size=\"11\" text-anchor=\"middle\">" << tick(x) << "</text>\n";
    os << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(f.py(y) + 4)
       << "\" font-size=\"11\" text-anchor=\"end\">" << tick(y) << "</text>\n";
  }
  os << "<text x=\"" << fmt(0.5 * (kLeft + kW - kRight)) << "\" y=\"" << fmt(kH - 12)
     << "\" font-size=\"13\" text-anchor=\"middle\">" << esc(labels.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << fmt(0.5 * (kTop + kH - kBottom))
     << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << fmt(0.5 * (kTop + kH - kBottom)) << ")\">" << esc(labels.y_label) << "</text>\n";
  if (!labels.title.empty())
    os << "<text x=\"" << fmt(0.5 * kW) << "\" y=\"22\" font-size=\"14\" text-anchor=\"middle\">"
       << esc(labels.title) << "</text>\n";
}

std::string header() {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\" font-family=\"sans-serif\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return os.str();
}

// Diverging blue-white-red map for t in [0, 1].
std::string color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  double r, g, b;
  if (t < 0.5) {
    const double s = t / 0.5;
    r = 0.23 + 0.77 * s;
    g = 0.30 + 0.70 * s;
    b = 0.75 + 0.25 * s;
  } else {
    const double s = (t - 0.5) / 0.5;
    r = 1.0 - 0.3 * s;
    g = 1.0 - 0.85 * s;
    b = 1.0 - 0.85 * s;
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(r * 255)),
                static_cast<int>(std::lround(g * 255)), static_cast<int>(std::lround(b * 255)));
  return buf;
}

}  // namespace

std::string line_plot_svg(const std::vector<LineSeries>& series, const PlotLabels& labels) {
  if (series.empty()) throw ConfigError("plot: empty series list");
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw ConfigError("plot: x and y lengths differ in " + s.name);
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, s.y[k]);
      y1 = std::max(y1, s.y[k]);
    }
  }
  if (!std::isfinite(x0)) throw ConfigError("plot: no finite points");
  pad(x0, x1);
  pad(y0, y1);
  const Frame f{x0, x1, y0, y1};
  std::ostringstream os;
  os << header();
  axes(os, f, labels);
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* col = kPalette[si % 6];
    std::string d;
    bool pen = false;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) {
        pen = false;
        continue;
      }
      d += pen ? " L" : " M";
      d += fmt(f.px(s.x[k])) + ' ' + fmt(f.py(s.y[k]));
      pen = true;
    }
    os << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\"/>\n";
    os << "<text x=\"" << fmt(kW - kRight - 8) << "\" y=\"" << fmt(kTop + 16 + 14 * si)
       << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << col << "\">" << esc(s.name)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string heat_map_svg(const LevelSetField2D& field, const std::vector<LevelCurve>& overlay,
                         const PlotLabels& labels, std::size_t max_cells) {
  const Grid2D& g = field.grid;
  if (field.values.empty() || g.n < 2) throw ConfigError("heat map: empty field");
  double lo = INFINITY, hi = -INFINITY;
  for (double v : field.values)
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!std::isfinite(lo)) throw ConfigError("heat map: no finite values");
  pad(lo, hi);
  const Frame f{-g.L, g.L, -g.L, g.L};
  const std::size_t cells = std::min(max_cells, g.n);
  const double h = 2.0 * g.L / static_cast<double>(cells);
  std::ostringstream os;
  os << header();
  for (std::size_t j = 0; j < cells; ++j)
    for (std::size_t i = 0; i < cells; ++i) {
      const Point2 c{-g.L + (i + 0.5) * h, -g.L + (j + 0.5) * h};
      const double v = field.sample(c);
      const double x = f.px(c.x - 0.5 * h), y = f.py(c.y + 0.5 * h);
      os << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\""
         << fmt(f.px(c.x + 0.5 * h) - x + 0.3) << "\" height=\"" << fmt(f.py(c.y - 0.5 * h) - y + 0.3)
         << "\" fill=\"" << color((v - lo) / (hi - lo)) << "\"/>\n";
    }
  for (const auto& curve : overlay) {
    if (curve.points.size() < 2) continue;
    std::string d;
    for (std::size_t k = 0; k < curve.points.size(); ++k)
      d += (k ? " L" : " M") + fmt(f.px(curve.points[k].x)) + ' ' + fmt(f.py(curve.points[k].y));
    if (curve.closed) d += " Z";
    os << "<path d=\"" << d << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  }
  axes(os, f, labels);
  os << "<text x=\"" << fmt(kW - kRight) << "\" y=\"" << fmt(kTop - 6)
     << "\" font-size=\"10\" text-anchor=\"end\">range [" << tick(lo) << ", " << tick(hi)
     << "]</text>\n</svg>\n";
  return os.str();
}

void emit_line_plot(const std::string& path, const std::vector<LineSeries>& series,
                    const PlotLabels& labels) {
  write_text(path, line_plot_svg(series, labels));
}

void emit_heat_map(const std::string& path, const LevelSetField2D& field,
                   const std::vector<LevelCurve>& overlay, const PlotLabels& labels) {
  write_text(path, heat_map_svg(field, overlay, labels));
}

}  // namespace curveflow
