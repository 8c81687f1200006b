#pragma once

#include <string>
#include <vector>

#include "curveflow/geometry.hpp"
#include "curveflow/levelset2d.hpp"

namespace curveflow {

/// Thrown when an output file cannot be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form ("inf", "-inf", "nan" for non-finite).
std::string format_number(double v);

/// CSV table with a header row. Cells are preformatted strings, so numeric
/// and text columns can be mixed.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  void add_row(std::vector<std::string> cells);

  std::string str() const;
  void write(const std::string& path) const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text(const std::string& path, const std::string& text);

struct LineSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotLabels {
  std::string title;
  std::string x_label;
  std::string y_label;
};

/// Self-contained SVG line plot. Non-finite points are skipped. Throws
/// ConfigError when there is no series or no finite point.
std::string line_plot_svg(const std::vector<LineSeries>& series, const PlotLabels& labels);

/// SVG heat map of a 2D field with optional level-curve overlay.
std::string heat_map_svg(const LevelSetField2D& field, const std::vector<LevelCurve>& overlay,
                         const PlotLabels& labels, std::size_t max_cells = 160);

void emit_line_plot(const std::string& path, const std::vector<LineSeries>& series,
                    const PlotLabels& labels);
void emit_heat_map(const std::string& path, const LevelSetField2D& field,
                   const std::vector<LevelCurve>& overlay, const PlotLabels& labels);

}  // namespace curveflow
