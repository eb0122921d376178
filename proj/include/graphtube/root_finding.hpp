#pragma once

#include <functional>
#include <vector>

namespace graphtube {

using ScalarFunction = std::function<double(double)>;

/// Bisection on a bracket [a, b] with f(a)·f(b) ≤ 0. Stops when the bracket
/// is below `xtol` (relative to max(1, |x|)) or after 200 halvings.
double bisect(const ScalarFunction& f, double a, double b, double xtol = 1e-14);

/// Scan grid: geometric points in (0, step] followed by a uniform grid with
/// the given step up to `hi`.
std::vector<double> scan_grid(double hi, double step = 0.01, int geometric_points = 60,
                              double smallest = 1e-9);

/// All sign changes of f along `grid`, refined by bisection. Exact zeros on
/// grid points are reported as roots as well.
std::vector<double> find_roots(const ScalarFunction& f, const std::vector<double>& grid,
                               double xtol = 1e-14);

/// Merge roots closer than `gap` · max(1, |x|).
std::vector<double> merge_close(std::vector<double> roots, double gap);

} // namespace graphtube
