#pragma once

#include <array>
#include <cstddef>

#include <json.hpp>

namespace graphtube {

/// Model parameters entering the explicit constants.
struct BoundInputs {
  double q_sup = 0.0;      ///< ‖Q‖_∞
  double ell_minus = 1.0;  ///< ℓ_-
  double lambda2_v = 0.0;  ///< second Neumann eigenvalue of X_v
  double lambda2_E = 0.0;  ///< min_e λ₂(e)
  double c_vol = 0.0;      ///< vol X_v / vol ∂X_v
  double p_norm_sq = 0.0;  ///< |p|² = vol ∂X_v
  double q_v = 0.0;        ///< q(v) = ∫ Q over X_v
  double eps = 0.0;

  [[nodiscard]] double ell0() const;
};

struct BoundReport {
  double eta = 0.5;
  double C_eta = 0.0;        ///< graph form bound constant
  double eps_eta = 0.0;      ///< +inf when Q vanishes
  double Ct_eta = 0.0;       ///< manifold form bound constant
  std::array<double, 2> Ct_eta_terms{};
  std::size_t Ct_eta_active = 0;

  double C_half = 0.0;       ///< graph constant at η = 1/2
  double C_half_chain = 0.0; ///< intermediate bound max{4c²‖Q‖², 2c‖Q‖/ℓ_-}
  double Ct_half = 0.0;
  double eps_half = 0.0;
  double lambda0 = 0.0;

  std::array<double, 5> delta_sq_terms{};
  std::size_t delta_active = 0;
  double delta_sq = 0.0;
  double delta = 0.0;

  double resolvent_bound = 0.0;       ///< √2 δ_ε
  double resolvent_bound_func = 0.0;  ///< 3√2 δ_ε
  double resolvent_bound_diff = 0.0;  ///< 10 δ_ε max{C̃_{1/2}, √2}
};

/// C_η = 2 max{q²/(η|p|⁴), |q|/(ℓ_-|p|²)}; zero when q = 0.
double delta_form_constant(double q, double p_norm_sq, double ell_minus, double eta);

/// ε_η for the manifold form bound; +inf for Q = 0.
double manifold_eps_eta(double q_sup, double ell_minus, double lambda2_v, double c_vol, double eta);

/// C̃_η = 8 c ‖Q‖ max{4c‖Q‖/η, 1/ℓ_-}.
double manifold_form_constant(double q_sup, double ell_minus, double c_vol, double eta);

/// Five terms of δ_ε² in display order.
std::array<double, 5> closeness_terms(const BoundInputs& in);

BoundReport compute_bounds(const BoundInputs& in, double eta);

nlohmann::json to_json(const BoundInputs& in);
nlohmann::json to_json(const BoundReport& r);

/// Vertex-region data of the δ′ chain.
struct ChainGeometry {
  double vol_v0 = 0.4330127018922193; ///< equilateral triangle with unit sides
  double c_vol = 0.14433756729740643; ///< vol/3
  double lambda2_v = 17.545963379714415;
};

struct DeltaPrimeOrders {
  double beta = 0.0;
  double alpha = 0.0;
  double eps = 0.0;
  double ell_minus = 0.0; ///< a_ε = ε^α
  double q_sup = 0.0;
  double Ct_half = 0.0;
  double eps_half = 0.0;
  double delta = 0.0;
  double product = 0.0;   ///< δ_ε · C̃_{1/2}
  double exponent_Ct = 0.0;
  double exponent_eps_half = 0.0;
  double exponent_delta = 0.0;
  double exponent_product = 0.0;
  bool valid = false;     ///< α < 1/13
};

DeltaPrimeOrders deltaprime_orders(double beta, double alpha, double eps,
                                   const ChainGeometry& geo = {});

nlohmann::json to_json(const DeltaPrimeOrders& o);

struct EdgeRescaleBound {
  double delta = 0.0;
  double resolvent = 0.0;
};

/// δ_ε = 2ε/(1−ε)^{1/2} for the longitudinal rescaling; resolvent bound 2δ_ε.
EdgeRescaleBound edge_rescale_bound(double eps);

} // namespace graphtube
