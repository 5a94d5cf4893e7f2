#pragma once

// Pseudo-Riemannian metrics: Levi-Civita connection in arbitrary frames and
// the curvature of any linear connection.
//
// Curvature convention, fixed by rho^i_j = d w^i_j + w^i_p ^ w^p_j with
// w^i_j = Gamma^i_{kj} w^k and 2-form components alpha_{kl} = alpha(e_k, e_l):
//
//   R^i_{jkl} = e_k(Gamma^i_{lj}) - e_l(Gamma^i_{kj})
//             + Gamma^i_{kp} Gamma^p_{lj} - Gamma^i_{lp} Gamma^p_{kj}
//             - C^p_{kl} Gamma^i_{pj}
//
// i.e. R(e_k, e_l) e_j = R^i_{jkl} e_i, and Ricci R_{ij} = R^p_{ipj}.

#include <optional>
#include <span>
#include <vector>

#include "mag/chart_frame.hpp"
#include "mag/connection_field.hpp"
#include "mag/metric_field.hpp"

namespace mag {

/// Unique torsion-free metric connection, via the frame Koszul formula.
ConnectionField levi_civita(const MetricField& g, const Frame& frame);

struct CurvatureSuite {
  TensorField riemann;  // [up i, down j, down k, down l]
  TensorField ricci;    // R_{ij} = R^p_{ipj}
  std::optional<TensorField> scalar;  // g^{ij} R_{ij}, when a metric is given
};

CurvatureSuite curvature_suite(const ConnectionField& connection,
                               const MetricField* metric = nullptr);

/// (nabla g)_{kij}; vanishes for the Levi-Civita connection of g.
TensorField metricity_residual(const MetricField& g, const ConnectionField& connection);

struct MetricDiagnostics {
  double max_asymmetry = 0.0;
  double min_abs_det = 0.0;
  double inverse_defect = 0.0;
  bool signature_ok = true;
};

/// Checks the MetricField invariants on the points; throws SingularMetric if
/// |det g| <= 1e-10 anywhere.
MetricDiagnostics validate_metric(const MetricField& g, std::span<const std::vector<double>> points);

/// Frame components e_i^mu e_j^nu g_{mu nu} of a coordinate-component metric.
MetricField metric_in_frame(const MetricField& coordinate_metric, const Frame& frame);

}  // namespace mag
