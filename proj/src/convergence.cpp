#include "graphtube/convergence.hpp"

#include <cmath>

#include "graphtube/error.hpp"

namespace graphtube {

OrderFit fit_order(const std::vector<double>& x, const std::vector<double>& err) {
  if (x.size() != err.size()) throw InvalidParameter("fit_order: size mismatch");
  OrderFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(err[i] > 0.0) || !std::isfinite(err[i])) continue;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(err[i]));
  }
  fit.points = static_cast<int>(lx.size());
  if (lx.size() < 2) return fit;
  const auto n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.valid = true;
  return fit;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

bool order_at_least(const OrderFit& fit, double order, double max_residual) {
  return fit.valid && fit.points >= 3 && fit.slope >= order && fit.residual < max_residual;
}

nlohmann::json to_json(const OrderFit& fit) {
  return {{"slope", fit.slope},       {"intercept", fit.intercept}, {"residual", fit.residual},
          {"points", fit.points},     {"valid", fit.valid}};
}

} // namespace graphtube
