#include "graphtube/root_finding.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "graphtube/error.hpp"

namespace graphtube {

double bisect(const ScalarFunction& f, double a, double b, double xtol) {
  double fa = f(a);
  double fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb)) {
    std::ostringstream os;
    os << "non-finite secular value on bracket [" << a << ", " << b << "]";
    throw SolverFailure(os.str());
  }
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    std::ostringstream os;
    os << "no sign change on bracket [" << a << ", " << b << "]: f = " << fa << ", " << fb;
    throw SolverFailure(os.str());
  }
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (b - a <= xtol * std::max(1.0, std::abs(m)) || m == a || m == b) return m;
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

std::vector<double> scan_grid(double hi, double step, int geometric_points, double smallest) {
  std::vector<double> grid;
  if (!(hi > 0.0)) return grid;
  const double top = std::min(step, hi);
  const double ratio = std::pow(top / smallest, 1.0 / geometric_points);
  double x = smallest;
  for (int i = 0; i < geometric_points; ++i, x *= ratio) grid.push_back(x);
  const auto cells = static_cast<long>(std::ceil(hi / step - 1e-9));
  for (long i = 1; i <= cells; ++i) grid.push_back(std::min(hi, static_cast<double>(i) * step));
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<double> find_roots(const ScalarFunction& f, const std::vector<double>& grid, double xtol) {
  std::vector<double> roots;
  if (grid.empty()) return roots;
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    vals[i] = f(grid[i]);
    if (!std::isfinite(vals[i])) {
      std::ostringstream os;
      os << "secular function is not finite at " << grid[i];
      throw SolverFailure(os.str());
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (vals[i] == 0.0) {
      roots.push_back(grid[i]);
      continue;
    }
    if (i + 1 < grid.size() && vals[i + 1] != 0.0 && (vals[i] > 0.0) != (vals[i + 1] > 0.0))
      roots.push_back(bisect(f, grid[i], grid[i + 1], xtol));
  }
  return roots;
}

std::vector<double> merge_close(std::vector<double> roots, double gap) {
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots) {
    if (!out.empty() && std::abs(r - out.back()) <= gap * std::max(1.0, std::abs(r))) continue;
    out.push_back(r);
  }
  return out;
}

} // namespace graphtube
