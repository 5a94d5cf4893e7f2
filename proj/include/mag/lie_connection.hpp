#pragma once

// Lie derivative of a linear connection along a vector field.

#include <span>
#include <vector>

#include "mag/connection_field.hpp"
#include "mag/tensor_field.hpp"

namespace mag {

/// (L_X nabla)^r_ks = (X^r_||s + X^p T^r_ps)_||k + X^p R^r_spk, in the
/// connection's frame. Slots follow the connection: [up r, down k, down s].
/// `x` holds frame components.
TensorField lie_derivative(const ConnectionField& connection, const TensorField& x);

/// Coordinate expression
/// X^p d_p G^r_ks - G^p_ks d_p X^r + G^r_ps d_k X^p + G^r_kp d_s X^p + d_k d_s X^r.
/// Throws AnholonomicFrameUnsupported unless the frame is the coordinate frame.
TensorField lie_derivative_coordinate(const ConnectionField& connection, const TensorField& x);

/// L_X for X = d/dx^index: the componentwise derivative d_index G^r_ks.
/// Throws AnholonomicFrameUnsupported unless the frame is the coordinate frame.
TensorField lie_derivative_adapted(const ConnectionField& connection, std::size_t index);

/// Frame components of any tensor field re-expressed in chart coordinates.
TensorField to_coordinates(const TensorField& t, const Frame& frame);

/// Flow map of a coordinate vector field with its first and second
/// variations: phi (n), J[a][k] = d phi^a / dx^k, H[a][k][s].
struct FlowMap {
  std::vector<double> phi;
  std::vector<double> jacobian;
  std::vector<double> hessian;
};

/// Classic RK4 with `substeps` fixed steps of size t / substeps. Throws
/// FlowLeftDomain if any stage point leaves the chart interior.
FlowMap integrate_flow(const TensorField& x, const Chart& chart, std::span<const double> point, double t,
                       int substeps = 64);

/// Recomputes L_X nabla in coordinates y = A x + b on a coordinate-frame
/// connection, maps the result back with the tensor law and returns the
/// largest deviation from the direct computation over `points` (x chart).
double linear_change_defect(const ConnectionField& connection, const TensorField& x,
                            std::span<const double> a, std::span<const double> b,
                            std::span<const std::vector<double>> points);

struct FlowOracleOptions {
  std::vector<double> times{1e-2, 5e-3, 2.5e-3};  // strictly decreasing
  int substeps = 64;
  double noise_floor = 1e-10;  // relative; gaps below it count as converged
};

struct FlowOracleResult {
  std::vector<double> value;  // coordinate components, [r][k][s]
  double spread = 0.0;        // gap between the two extrapolated estimates
  double coarse_gap = 0.0;    // max |D(t0) - D(t1)| of the difference quotients
  double fine_gap = 0.0;      // max |D(t1) - D(t2)|
};

/// d/dt of the pulled-back coordinate coefficients along the flow of X at
/// t = 0, from RK4 integration of the flow and its first two variations,
/// central differences in t and Richardson extrapolation. Throws
/// FlowLeftDomain if a trajectory exits the chart and
/// ExtrapolationNonConvergent if, above the noise floor, halving t fails to
/// at least halve the gap between successive difference quotients.
FlowOracleResult lie_derivative_flow(const ConnectionField& connection, const TensorField& x,
                                     std::span<const double> point, const FlowOracleOptions& options = {});

}  // namespace mag
