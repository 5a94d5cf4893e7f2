#pragma once

// Seeded smooth test fields: low-order polynomials plus a damped sinusoid,
// normalized so every component stays within the requested amplitude on the
// box [-1, 1]^n.

#include <cstdint>
#include <string>

#include "mag/chart_frame.hpp"
#include "mag/connection_field.hpp"
#include "mag/metric_field.hpp"
#include "mag/tensor_field.hpp"

namespace mag {

/// Box [-1, 1]^n chart with coordinates x0, x1, ...
Chart unit_box_chart(std::size_t dim, Strategy strategy = Strategy::analytic());

/// Every component an independent random analytic function with |value| <= amplitude
/// on [-1, 1]^n. Equal seeds give identical fields.
TensorField random_tensor(std::size_t dim, Variance variance, std::uint64_t seed, double amplitude,
                          std::string label = "rand");

/// diag(-1, 1, ..., 1) + symmetric perturbation with entries bounded by
/// `amplitude`; Lorentzian signature (n-1, 1).
MetricField random_metric(std::size_t dim, std::uint64_t seed, double amplitude = 0.04);

/// Generic (torsionful, non-metric) connection coefficients in `frame`.
ConnectionField random_connection(const Frame& frame, std::uint64_t seed, double amplitude = 0.5);

/// e_i = d_i + perturbation; coframe by pointwise inversion.
Frame random_frame(const Chart& chart, std::uint64_t seed, double amplitude = 0.15);

/// Random vector field X^i with polynomial components.
TensorField random_vector(std::size_t dim, std::uint64_t seed, double amplitude = 0.5);

}  // namespace mag
