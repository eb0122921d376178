#include "graphtube/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "graphtube/error.hpp"

namespace graphtube {

namespace {

template <std::size_t N>
std::size_t argmax(const std::array<double, N>& a) {
  return static_cast<std::size_t>(std::max_element(a.begin(), a.end()) - a.begin());
}

nlohmann::json finite_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

} // namespace

double BoundInputs::ell0() const { return std::min(1.0, ell_minus); }

double delta_form_constant(double q, double p_norm_sq, double ell_minus, double eta) {
  if (!(eta > 0.0)) throw InvalidParameter("eta must be positive");
  if (!(p_norm_sq > 0.0) || !(ell_minus > 0.0)) throw InvalidParameter("|p|^2 and l_- must be positive");
  if (q == 0.0) return 0.0;
  const double a = q * q / (eta * p_norm_sq * p_norm_sq);
  const double b = std::abs(q) / (ell_minus * p_norm_sq);
  return 2.0 * std::max(a, b);
}

double manifold_eps_eta(double q_sup, double ell_minus, double lambda2_v, double c_vol, double eta) {
  if (q_sup == 0.0) return std::numeric_limits<double>::infinity();
  const double bracket = 1.0 / lambda2_v + c_vol * (ell_minus + 2.0 / (ell_minus * lambda2_v));
  return eta / (4.0 * q_sup) / bracket;
}

double manifold_form_constant(double q_sup, double ell_minus, double c_vol, double eta) {
  return 8.0 * c_vol * q_sup * std::max(4.0 * c_vol * q_sup / eta, 1.0 / ell_minus);
}

std::array<double, 5> closeness_terms(const BoundInputs& in) {
  const double e = in.eps;
  const double l0 = in.ell0();
  const double c = in.c_vol;
  const double lv = in.lambda2_v;
  const double tail = 1.0 + 2.0 / (l0 * lv);
  return {
      8.0 * e * c / l0,
      e * e / in.lambda2_E,
      4.0 * e * e * (1.0 / lv + c * tail),
      2.0 * e / l0 * tail,
      4.0 * e * c * in.q_sup * in.q_sup / (l0 * lv),
  };
}

BoundReport compute_bounds(const BoundInputs& in, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidParameter("eta must lie in (0,1)");
  if (!(in.eps > 0.0)) throw InvalidParameter("eps must be positive");
  if (!(in.ell_minus > 0.0) || !(in.lambda2_v > 0.0) || !(in.lambda2_E > 0.0) || !(in.c_vol > 0.0) ||
      !(in.p_norm_sq > 0.0) || in.q_sup < 0.0)
    throw InvalidParameter("bound inputs must be positive");

  BoundReport r;
  r.eta = eta;
  r.C_eta = delta_form_constant(in.q_v, in.p_norm_sq, in.ell_minus, eta);
  r.eps_eta = manifold_eps_eta(in.q_sup, in.ell_minus, in.lambda2_v, in.c_vol, eta);
  r.Ct_eta_terms = {4.0 * in.c_vol * in.q_sup / eta, 1.0 / in.ell_minus};
  r.Ct_eta_active = argmax(r.Ct_eta_terms);
  r.Ct_eta = manifold_form_constant(in.q_sup, in.ell_minus, in.c_vol, eta);

  r.C_half = delta_form_constant(in.q_v, in.p_norm_sq, in.ell_minus, 0.5);
  r.C_half_chain = std::max(4.0 * in.c_vol * in.c_vol * in.q_sup * in.q_sup,
                            2.0 * in.c_vol * in.q_sup / in.ell_minus);
  r.Ct_half = manifold_form_constant(in.q_sup, in.ell_minus, in.c_vol, 0.5);
  r.eps_half = manifold_eps_eta(in.q_sup, in.ell_minus, in.lambda2_v, in.c_vol, 0.5);
  r.lambda0 = r.Ct_half > 0.0 ? -r.Ct_half : 0.0;

  r.delta_sq_terms = closeness_terms(in);
  r.delta_active = argmax(r.delta_sq_terms);
  r.delta_sq = r.delta_sq_terms[r.delta_active];
  r.delta = std::sqrt(r.delta_sq);

  r.resolvent_bound = std::sqrt(2.0) * r.delta;
  r.resolvent_bound_func = 3.0 * std::sqrt(2.0) * r.delta;
  r.resolvent_bound_diff = 10.0 * r.delta * std::max(r.Ct_half, std::sqrt(2.0));
  return r;
}

nlohmann::json to_json(const BoundInputs& in) {
  return {{"q_sup", in.q_sup},       {"ell_minus", in.ell_minus}, {"ell0", in.ell0()},
          {"lambda2_v", in.lambda2_v}, {"lambda2_E", in.lambda2_E}, {"c_vol", in.c_vol},
          {"p_norm_sq", in.p_norm_sq}, {"q_v", in.q_v},           {"eps", in.eps}};
}

nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json j;
  j["eta"] = r.eta;
  j["C_eta"] = r.C_eta;
  j["eps_eta"] = finite_or_null(r.eps_eta);
  j["Ct_eta"] = r.Ct_eta;
  j["Ct_eta_terms"] = r.Ct_eta_terms;
  j["Ct_eta_active"] = r.Ct_eta_active;
  j["C_half"] = r.C_half;
  j["C_half_chain"] = r.C_half_chain;
  j["Ct_half"] = r.Ct_half;
  j["eps_half"] = finite_or_null(r.eps_half);
  j["lambda0"] = r.lambda0;
  j["delta_sq_terms"] = r.delta_sq_terms;
  j["delta_active"] = r.delta_active;
  j["delta_sq"] = r.delta_sq;
  j["delta"] = r.delta;
  j["resolvent_bound"] = r.resolvent_bound;
  j["resolvent_bound_func"] = r.resolvent_bound_func;
  j["resolvent_bound_diff"] = r.resolvent_bound_diff;
  return j;
}

DeltaPrimeOrders deltaprime_orders(double beta, double alpha, double eps, const ChainGeometry& geo) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0,1)");
  if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
  DeltaPrimeOrders o;
  o.beta = beta;
  o.alpha = alpha;
  o.eps = eps;
  o.ell_minus = std::pow(eps, alpha);
  // unscaled potentials: -β/(ε^{2α} vol X_{v0}) at the centre, -ε^{-α} on the satellites
  o.q_sup = std::max(std::abs(beta) / (std::pow(eps, 2.0 * alpha) * geo.vol_v0), std::pow(eps, -alpha));

  BoundInputs in;
  in.q_sup = o.q_sup;
  in.ell_minus = o.ell_minus;
  in.lambda2_v = geo.lambda2_v;
  in.lambda2_E = M_PI * M_PI;
  in.c_vol = geo.c_vol;
  in.p_norm_sq = 1.0;
  in.q_v = 0.0;
  in.eps = eps;
  const auto r = compute_bounds(in, 0.5);
  o.Ct_half = r.Ct_half;
  o.eps_half = r.eps_half;
  o.delta = r.delta;
  o.product = r.delta * r.Ct_half;

  o.exponent_Ct = -4.0 * alpha;
  o.exponent_eps_half = 3.0 * alpha;
  o.exponent_delta = (1.0 - 5.0 * alpha) / 2.0;
  o.exponent_product = (1.0 - 13.0 * alpha) / 2.0;
  o.valid = alpha < 1.0 / 13.0;
  return o;
}

nlohmann::json to_json(const DeltaPrimeOrders& o) {
  return {{"beta", o.beta},
          {"alpha", o.alpha},
          {"eps", o.eps},
          {"ell_minus", o.ell_minus},
          {"q_sup", o.q_sup},
          {"Ct_half", o.Ct_half},
          {"eps_half", o.eps_half},
          {"delta", o.delta},
          {"product", o.product},
          {"exponent_Ct", o.exponent_Ct},
          {"exponent_eps_half", o.exponent_eps_half},
          {"exponent_delta", o.exponent_delta},
          {"exponent_product", o.exponent_product},
          {"valid", o.valid}};
}

EdgeRescaleBound edge_rescale_bound(double eps) {
  if (eps < 0.0 || !(eps < 1.0)) throw InvalidParameter("edge rescaling needs 0 <= eps < 1");
  EdgeRescaleBound b;
  b.delta = 2.0 * eps / std::sqrt(1.0 - eps);
  b.resolvent = 2.0 * b.delta;
  return b;
}

} // namespace graphtube
