#pragma once

// Five-dimensional lift of a spacetime carrying a U(1) principal connection
// sigma = du + gamma_i dx^i, and its reduction to Einstein-Maxwell theory.
//
// Conventions: chart (u, x^1..x^4) with the fiber coordinate first. Frame
// e_0 = d_u, e_i = d_i - gamma_i d_u; coframe w^0 = sigma, w^i = dx^i.
// Omega_ij = (d_i gamma_j - d_j gamma_i) / 2, so d sigma = Omega_ij w^i ^ w^j
// and C^0_ij = -2 Omega_ij. F = Omega / kappa, A = (d psi + gamma) / kappa.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "mag/chart_frame.hpp"
#include "mag/connection_field.hpp"
#include "mag/metric_field.hpp"

namespace mag {

struct KaluzaConfiguration {
  std::string label = "kaluza";
  Chart base_chart;          // 4D chart x^i
  MetricField base_metric;   // coordinate components g_ij(x)
  TensorField gamma;         // [down] gamma_i(x)
  TensorField psi;           // scalar gauge section u = psi(x)
  double kappa = std::sqrt(4.0 * std::numbers::pi);
  double newton_g = 1.0;
  double light_c = 1.0;
};

/// 4D chart plus a leading fiber coordinate u in (-1, 1).
Chart kaluza_chart(const Chart& base);

/// Frame e_0 = d_u, e_i = d_i - gamma_i d_u on the 5D chart.
Frame kaluza_frame(const KaluzaConfiguration& config);

struct KaluzaLift {
  Frame frame;
  MetricField metric;           // block(1, g_ij) in the Kaluza frame, signature (4,1)
  MetricField coordinate_metric;  // sigma (x) sigma + g in chart coordinates
  ConnectionField levi_civita;  // generic Koszul path
};

KaluzaLift assemble(const KaluzaConfiguration& config);

/// Lifts a 4D field to the 5D chart: components with any index 0 vanish,
/// the rest are the 4D components at x (u ignored).
TensorField pad_to_5d(const TensorField& base_field);

/// Restricts a 5D field to base points (u = 0), keeping only slots' indices
/// 1..4; the result lives on the 4D chart.
TensorField restrict_to_base(const TensorField& field5);

/// Selects the components with every index equal to 0 except those in
/// `base_slots`, which range over 1..4. Result is a 4D field.
TensorField slice_to_base(const TensorField& field5, std::vector<bool> base_slots, Variance variance);

struct EmFields {
  TensorField omega;  // Omega_ij
  TensorField f;      // F_ij = Omega_ij / kappa
  TensorField a;      // A_i = (d_i psi + gamma_i) / kappa
};

EmFields em_fields(const KaluzaConfiguration& config);

/// gamma' = gamma - df, psi' = psi + f.
KaluzaConfiguration gauge_transform(const KaluzaConfiguration& config, const TensorField& f);

/// Closed-form Levi-Civita coefficients of the lift in the Kaluza frame:
/// Gamma^i_kj = Gamma*^i_kj, Gamma^i_0j = Gamma^i_j0 = -Omega^i_j,
/// Gamma^0_ji = Omega_ij, all others zero.
ConnectionField hat_connection_forms(const KaluzaConfiguration& config);

/// Closed-form 5D Ricci R^_AB in the Kaluza frame:
/// R^_ij = R_ij - 2 Omega^p_i Omega_pj, R^_i0 = Omega_i^p_||p, R^_00 = Omega^rs Omega_rs.
TensorField hat_ricci(const KaluzaConfiguration& config);

/// Closed-form curvature 2-forms of the lift, as R^A_BCD in the Kaluza frame.
TensorField hat_riemann(const KaluzaConfiguration& config);

struct LiftFieldResiduals {
  TensorField eq_b;  // R^_0j, 4D covector
  TensorField eq_c;  // R^_ij - (R^0_0 + R^k_k) g_ij / 2, 4D
};

/// Built from the generic 5D curvature of the assembled metric.
LiftFieldResiduals lift_field_residuals(const KaluzaConfiguration& config);

struct EinsteinMaxwellResiduals {
  TensorField maxwell;   // F_i^p_||p
  TensorField einstein;  // G_ij - (8 pi G / c^4)(F^p_i F_pj - F^rs F_rs g_ij / 4)
};

EinsteinMaxwellResiduals einstein_maxwell_residuals(const KaluzaConfiguration& config);

struct ReducedAction {
  TensorField lifted;   // g^AB R^_AB from the generic 5D computation, on the base
  TensorField reduced;  // R - (4 pi G / c^4) F_ij F^ij
};

ReducedAction reduced_action_density(const KaluzaConfiguration& config);

/// 5D [up, up] generators d(phi^AB) in the Kaluza frame: 10 from symmetric
/// one-hot d g^ij (i <= j), then 4 from one-hot d gamma_i.
std::vector<TensorField> deformation_basis(const KaluzaConfiguration& config);

}  // namespace mag
