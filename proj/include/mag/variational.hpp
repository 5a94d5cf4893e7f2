#pragma once

// Action density of the metric-affine functional, its divergence
// decomposition, and both Euler-Lagrange residuals.

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "mag/connection_field.hpp"
#include "mag/metric_field.hpp"

namespace mag {

/// direct      = g^ij (R_ij + T_i T_j) sqrt|g|
/// decomposed  = g^ij (hatR_ij + delta^{kr}_{pj} N^p_kq N^q_ri + T_i T_j) sqrt|g|
/// divergence  = g^ij (hatnabla_p N^p_ji - hatnabla_j N^p_pi) sqrt|g|
struct ActionDensityPair {
  TensorField direct;
  TensorField decomposed;
  TensorField divergence;
};

ActionDensityPair action_density(const MetricField& g, const ConnectionField& connection);

/// direct - decomposed - sign * divergence (sign = -1 is the negative control).
TensorField decomposition_defect(const ActionDensityPair& a, double divergence_sign = 1.0);

struct MetricElResidual {
  TensorField e;        // E_ab = sym(R_ab) + T_a T_b - (R + T_p T^p) g_ab / 2
  TensorField reduced;  // sym(R_ab) + T_a T_b
  /// reduced - (E - tr_g(E) g / (n - 2)); zero when n > 2. Invalid for n = 2.
  TensorField trace_inversion_defect;
};

MetricElResidual metric_el_residual(const MetricField& g, const ConnectionField& connection);

/// Projections E_ab dg^ab onto each [up, up] generator. Throws
/// GeneratorShapeMismatch.
std::vector<TensorField> constrained_metric_el_residual(const MetricField& g,
                                                        const ConnectionField& connection,
                                                        std::span<const TensorField> generators);

struct GradientCheck {
  double max_abs_error = 0.0;
  double max_abs_value = 0.0;
  double relative = 0.0;
};

/// Compares E_ab sqrt|g| with the central difference of the action density
/// along symmetric perturbations of g^ab, connection held fixed.
GradientCheck metric_gradient_check(const MetricField& g, const ConnectionField& connection,
                                    std::span<const double> point, double eps = 1e-6);

/// E_a^{bc}(N) at a point: the linear map from N^a_bc to the connection
/// Euler-Lagrange coefficient, with vec index flat(a, b, c).
struct ConnectionElOperator {
  std::size_t n = 0;
  std::vector<double> g;     // g_ab at the assembly point
  std::vector<double> ginv;  // g^ab
  Eigen::MatrixXd matrix;
};

ConnectionElOperator connection_el_assemble(std::span<const double> g_point, std::size_t n);
ConnectionElOperator connection_el_assemble(const MetricField& g, std::span<const double> point);

/// E_a^{bc} evaluated directly from the formula (no matrix).
std::vector<double> connection_el_apply(std::span<const double> g, std::span<const double> ginv,
                                        std::size_t n, std::span<const double> nvec);

/// Quadratic N-part of the decomposed integrand (without sqrt|g|):
/// g^ij (delta^{kr}_{pj} N^p_kq N^q_ri + T_i T_j).
double connection_quadratic_form(std::span<const double> ginv, std::size_t n,
                                 std::span<const double> nvec);

struct KernelReport {
  std::size_t kernel_dim = 0;
  double smallest_singular_value = 0.0;
  double largest_singular_value = 0.0;
  double ratio = 0.0;  // smallest / largest
};

/// SVD rank analysis. Singular values below 1e-8 * largest count as zero;
/// values within a factor 10 of that threshold raise NumericalRankAmbiguity.
KernelReport connection_el_kernel(const Eigen::MatrixXd& op);
KernelReport connection_el_kernel(const ConnectionElOperator& op);

/// Basis of torsionless displacements N^a_bc = N^a_cb (columns, n^3 rows).
Eigen::MatrixXd symmetric_displacement_basis(std::size_t n);

/// B^T M B on the torsionless subspace.
Eigen::MatrixXd palatini_operator(const ConnectionElOperator& op);

struct ClosedFormCheck {
  double relation = 0.0;       // N_cab + N_bca - g_ab X_c - g_bc Y_a
  double trace_chain = 0.0;    // 2 g^ac N_cab - (X_b + n (Y_b - X_b) + X_b)
  double torsion_trace = 0.0;  // g^bc (N_cab - N_cba) - (n - 1) X_a
  std::vector<double> n_lowered;  // N_cab, flat(c, a, b)
};

ClosedFormCheck closed_form_solution_check(std::span<const double> g, std::size_t n,
                                           std::span<const double> x, std::span<const double> y);

}  // namespace mag
