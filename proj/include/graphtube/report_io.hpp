#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "graphtube/convergence.hpp"

namespace graphtube {

inline constexpr const char* kCsvVersionLine = "# graphtube csv v1";

using CsvCell = std::variant<std::string, double, long>;

struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;
};

/// Version line, header, then one line per row. Doubles use the shortest
/// round-trip representation.
std::string to_csv(const CsvTable& table);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  OrderFit fit;
};

struct LogLogPlot {
  std::string name;
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<PlotSeries> series;

  [[nodiscard]] bool empty() const;
};

/// Log–log SVG with markers, fitted lines and slope annotations.
std::string to_svg(const LogLogPlot& plot);

std::string format_double(double x);

/// Writes text to `path`; IO failures raise Error naming the path.
void write_text(const std::filesystem::path& path, const std::string& text);

/// report.json, one CSV per table, one SVG per non-empty plot.
/// Returns the written paths in order.
std::vector<std::filesystem::path> emit_outputs(const nlohmann::json& report, const std::vector<CsvTable>& tables,
                                                const std::vector<LogLogPlot>& plots,
                                                const std::filesystem::path& dir);

} // namespace graphtube
