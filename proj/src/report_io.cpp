#include "graphtube/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "graphtube/error.hpp"

namespace graphtube {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string cell_text(const CsvCell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) {
    if (s->find_first_of(",\"\n") == std::string::npos) return *s;
    std::string q = "\"";
    for (char ch : *s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  return std::to_string(std::get<long>(c));
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '&': out += "&amp;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

} // namespace

std::string to_csv(const CsvTable& table) {
  std::ostringstream os;
  os << kCsvVersionLine << "\n";
  for (std::size_t i = 0; i < table.header.size(); ++i) os << (i ? "," : "") << table.header[i];
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
    os << "\n";
  }
  return os.str();
}

bool LogLogPlot::empty() const {
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (s.x[i] > 0.0 && s.y[i] > 0.0) return false;
  return true;
}

std::string to_svg(const LogLogPlot& plot) {
  constexpr double W = 640, H = 440, L = 70, R = 170, T = 40, B = 60;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0.0 && s.y[i] > 0.0)) continue;
      x0 = std::min(x0, std::log10(s.x[i]));
      x1 = std::max(x1, std::log10(s.x[i]));
      y0 = std::min(y0, std::log10(s.y[i]));
      y1 = std::max(y1, std::log10(s.y[i]));
    }
  if (!std::isfinite(x0)) return {};
  auto pad = [](double& a, double& b) {
    const double w = std::max(b - a, 0.2);
    const double m = 0.5 * (a + b);
    a = m - 0.55 * w;
    b = m + 0.55 * w;
  };
  pad(x0, x1);
  pad(y0, y1);
  auto px = [&](double lx) { return L + (lx - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double ly) { return H - B - (ly - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape_xml(plot.title) << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int d = static_cast<int>(std::ceil(x0)); d <= static_cast<int>(std::floor(x1)); ++d)
    os << "<text x=\"" << px(d) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
  for (int d = static_cast<int>(std::ceil(y0)); d <= static_cast<int>(std::floor(y1)); ++d)
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(d) + 4 << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\">" << escape_xml(plot.xlabel) << "</text>\n";
  os << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (T + H - B) / 2
     << ")\">" << escape_xml(plot.ylabel) << "</text>\n";

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* c = colors[k % 7];
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0.0 && s.y[i] > 0.0)) continue;
      os << "<circle cx=\"" << px(std::log10(s.x[i])) << "\" cy=\"" << py(std::log10(s.y[i])) << "\" r=\"4\" fill=\"" << c << "\"/>\n";
    }
    if (s.fit.valid) {
      // fit is in natural logs; convert to log10 coordinates
      auto fy = [&](double lx) { return (s.fit.intercept + s.fit.slope * lx * std::log(10.0)) / std::log(10.0); };
      double a = INFINITY, b = -INFINITY;
      for (double x : s.x)
        if (x > 0.0) {
          a = std::min(a, std::log10(x));
          b = std::max(b, std::log10(x));
        }
      os << "<line x1=\"" << px(a) << "\" y1=\"" << py(fy(a)) << "\" x2=\"" << px(b) << "\" y2=\"" << py(fy(b))
         << "\" stroke=\"" << c << "\" stroke-dasharray=\"5,3\"/>\n";
    }
    const double ly = T + 16 + 18 * static_cast<double>(k);
    os << "<circle cx=\"" << W - R + 14 << "\" cy=\"" << ly - 4 << "\" r=\"4\" fill=\"" << c << "\"/>\n";
    os << "<text x=\"" << W - R + 24 << "\" y=\"" << ly << "\">" << escape_xml(s.label);
    if (s.fit.valid) os << " slope " << format_double(std::round(s.fit.slope * 1000.0) / 1000.0);
    os << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw Error("write failed for " + path.string());
}

std::vector<std::filesystem::path> emit_outputs(const nlohmann::json& report, const std::vector<CsvTable>& tables,
                                                const std::vector<LogLogPlot>& plots,
                                                const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  written.push_back(dir / "report.json");
  write_text(written.back(), report.dump(2) + "\n");
  for (const auto& t : tables) {
    written.push_back(dir / (t.name + ".csv"));
    write_text(written.back(), to_csv(t));
  }
  for (const auto& p : plots) {
    if (p.empty()) continue;
    written.push_back(dir / (p.name + ".svg"));
    write_text(written.back(), to_svg(p));
  }
  return written;
}

} // namespace graphtube
