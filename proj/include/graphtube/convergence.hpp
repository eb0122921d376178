#pragma once

#include <vector>

#include <json.hpp>

namespace graphtube {

/// Least-squares line through (log x, log err).
struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0; ///< RMS residual in log space
  int points = 0;
  bool valid = false;    ///< at least two points with positive errors
};

OrderFit fit_order(const std::vector<double>& x, const std::vector<double>& err);

/// Strictly decreasing in the given order.
bool strictly_decreasing(const std::vector<double>& v);

/// Passes when the fit used ≥ 3 points, slope ≥ order and residual < max_residual.
bool order_at_least(const OrderFit& fit, double order, double max_residual = 0.2);

nlohmann::json to_json(const OrderFit& fit);

} // namespace graphtube
