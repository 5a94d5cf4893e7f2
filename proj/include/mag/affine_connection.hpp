#pragma once

// General linear connections: covariant derivative, torsion, the displacement
// tensor N = Gamma - hatGamma and Cartan structure-equation cross-checks.

#include "mag/connection_field.hpp"
#include "mag/metric_field.hpp"
#include "mag/metric_geometry.hpp"

namespace mag {

/// Adds a leftmost down slot k: (nabla_{e_k} t). Throws FrameMismatch when t
/// is tagged with another frame.
TensorField covariant_derivative(const ConnectionField& connection, const TensorField& t);

/// T^i_{jk} = Gamma^i_{jk} - Gamma^i_{kj} - C^i_{jk}; exactly antisymmetric.
TensorField torsion(const ConnectionField& connection);

/// T_i = T^p_{pi}.
TensorField contracted_torsion(const TensorField& torsion_field);

DisplacementField displacement(const ConnectionField& connection, const MetricField& g);

/// Connection with coefficients hatGamma + N on the same frame.
ConnectionField connection_from_displacement(const ConnectionField& levi_civita,
                                             const TensorField& n);

struct StructureResiduals {
  TensorField first;   // theta^i - (d w^i + w^i_p ^ w^p), components on (e_k, e_l)
  TensorField second;  // rho^i_j - (d w^i_j + w^i_p ^ w^p_j)
};

/// Residuals of both structure equations. theta and rho come from the
/// component formulas (holonomy based); the exterior derivatives are taken in
/// coordinates and evaluated on the frame, an independent route.
StructureResiduals structure_equation_residuals(const ConnectionField& connection);

/// The same connection expressed in the coordinate frame of its chart.
ConnectionField to_coordinate_frame(const ConnectionField& connection);

}  // namespace mag
