#include "mag/variational.hpp"

#include <algorithm>
#include <cmath>

#include "mag/affine_connection.hpp"
#include "mag/error.hpp"
#include "mag/linalg.hpp"
#include "mag/metric_geometry.hpp"
#include "mag/tensor_ops.hpp"

namespace mag {

namespace {

constexpr double kKernelThreshold = 1e-8;
constexpr double kAmbiguityBand = 10.0;

inline double delta2(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
  return (a == c && b == d ? 1.0 : 0.0) - (a == d && b == c ? 1.0 : 0.0);
}

TensorField scalar_from(const TensorField& sym2, const TensorField& ginv, const TensorField& vol,
                        std::string label) {
  const std::size_t n = sym2.dim();
  return TensorField::make(
      n, {}, std::move(label),
      [sym2, ginv, vol, n](auto x) {
        using S = scalar_of<decltype(x)>;
        const std::vector<S> a = sym2(x);
        const std::vector<S> gi = ginv(x);
        S s(0.0);
        for (std::size_t k = 0; k < n * n; ++k) s += gi[k] * a[k];
        return std::vector<S>{s * vol(x)[0]};
      },
      sym2.frame_id());
}

TensorField outer_torsion(const TensorField& t) { return tensor_product(t, t).relabeled("T(x)T"); }

}  // namespace

ActionDensityPair action_density(const MetricField& g, const ConnectionField& connection) {
  const std::size_t n = connection.dim();
  if (g.dim() != n) throw Error(ErrorCode::InvalidDimension, "metric and connection dims differ");
  const TensorField ginv = g.inverse();
  const TensorField vol = g.volume_density();
  const TensorField tt = outer_torsion(contracted_torsion(torsion(connection)));
  const TensorField ric = curvature_suite(connection).ricci;
  const DisplacementField d = displacement(connection, g);
  const TensorField ric_hat = curvature_suite(d.levi_civita).ricci;

  // delta^{kr}_{pj} N^p_kq N^q_ri: NN = [p up, k, r, i]; bind k, r upper and p lower.
  const TensorField nn = contract(tensor_product(d.n, d.n), {{3, 2}});
  KroneckerBinding bind;
  bind.upper = {1, 2};
  bind.lower = {std::size_t{0}, std::nullopt};
  const TensorField quad = gk_apply(2, nn, bind).tensor;  // [i][j]

  const TensorField dn = covariant_derivative(d.levi_civita, d.n);  // [q][p][j][i]
  const TensorField div1 = contract(dn, {{1, 0}});                   // hatnabla_p N^p_ji -> [j][i]
  const TensorField div2 = contract(dn, {{1, 2}});                   // hatnabla_j N^p_pi -> [j][i]

  ActionDensityPair out;
  out.direct = scalar_from(add(ric, tt), ginv, vol, "L_direct");
  out.decomposed = scalar_from(add(add(ric_hat, quad), tt), ginv, vol, "L_decomposed");
  out.divergence = scalar_from(subtract(div1, div2), ginv, vol, "L_divergence");
  return out;
}

TensorField decomposition_defect(const ActionDensityPair& a, double divergence_sign) {
  return linear_combination(1.0, subtract(a.direct, a.decomposed), -divergence_sign, a.divergence)
      .relabeled("identity-defect");
}

MetricElResidual metric_el_residual(const MetricField& g, const ConnectionField& connection) {
  const std::size_t n = connection.dim();
  if (g.dim() != n) throw Error(ErrorCode::InvalidDimension, "metric and connection dims differ");
  const TensorField ginv = g.inverse();
  const TensorField gg = g.g();
  const TensorField t = contracted_torsion(torsion(connection));
  const TensorField ric = curvature_suite(connection).ricci;
  MetricElResidual res;
  res.reduced = TensorField::make(
      n, {Slot::down, Slot::down}, "Ric+TT",
      [ric, t, n](auto x) {
        using S = scalar_of<decltype(x)>;
        const std::vector<S> r = ric(x);
        const std::vector<S> tv = t(x);
        std::vector<S> out(n * n);
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b)
            out[a * n + b] = (r[a * n + b] + r[b * n + a]) * 0.5 + tv[a] * tv[b];
        return out;
      },
      connection.frame.id());
  const TensorField reduced = res.reduced;
  res.e = TensorField::make(
      n, {Slot::down, Slot::down}, "E_metric",
      [reduced, ginv, gg, n](auto x) {
        using S = scalar_of<decltype(x)>;
        std::vector<S> r = reduced(x);
        const std::vector<S> gi = ginv(x);
        const std::vector<S> gv = gg(x);
        S tr(0.0);
        for (std::size_t k = 0; k < n * n; ++k) tr += gi[k] * r[k];
        for (std::size_t k = 0; k < n * n; ++k) r[k] -= tr * gv[k] * 0.5;
        return r;
      },
      connection.frame.id());
  if (n > 2) {
    const TensorField e = res.e;
    const double inv = 1.0 / (static_cast<double>(n) - 2.0);
    res.trace_inversion_defect = TensorField::make(
        n, {Slot::down, Slot::down}, "trace-inversion",
        [reduced, e, ginv, gg, n, inv](auto x) {
          using S = scalar_of<decltype(x)>;
          const std::vector<S> r = reduced(x);
          const std::vector<S> ev = e(x);
          const std::vector<S> gi = ginv(x);
          const std::vector<S> gv = gg(x);
          S tr(0.0);
          for (std::size_t k = 0; k < n * n; ++k) tr += gi[k] * ev[k];
          std::vector<S> out(n * n);
          for (std::size_t k = 0; k < n * n; ++k) out[k] = r[k] - (ev[k] - tr * gv[k] * inv);
          return out;
        },
        connection.frame.id());
  }
  return res;
}

std::vector<TensorField> constrained_metric_el_residual(const MetricField& g,
                                                        const ConnectionField& connection,
                                                        std::span<const TensorField> generators) {
  const std::size_t n = connection.dim();
  const TensorField e = metric_el_residual(g, connection).e;
  std::vector<TensorField> out;
  out.reserve(generators.size());
  for (const TensorField& gen : generators) {
    if (gen.dim() != n || gen.variance() != Variance{Slot::up, Slot::up}) {
      throw Error(ErrorCode::GeneratorShapeMismatch,
                  "deformation generator '" + gen.label() + "' must be an [up, up] field of dim " +
                      std::to_string(n));
    }
    out.push_back(TensorField::make(
        n, {}, "E.d" + gen.label(),
        [e, gen, n](auto x) {
          using S = scalar_of<decltype(x)>;
          const std::vector<S> ev = e(x);
          const std::vector<S> gv = gen(x);
          S s(0.0);
          for (std::size_t k = 0; k < n * n; ++k) s += ev[k] * gv[k];
          return std::vector<S>{s};
        },
        connection.frame.id()));
  }
  return out;
}

GradientCheck metric_gradient_check(const MetricField& g, const ConnectionField& connection,
                                    std::span<const double> point, double eps) {
  const std::size_t n = connection.dim();
  const std::vector<double> ric = curvature_suite(connection).ricci.at(point);
  const std::vector<double> t = contracted_torsion(torsion(connection)).at(point);
  const std::vector<double> ginv0 = g.inverse().at(point);
  const std::vector<double> e = metric_el_residual(g, connection).e.at(point);
  const double vol = g.volume_density().at(point)[0];

  std::vector<double> q(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) q[a * n + b] = ric[a * n + b] + t[a] * t[b];
  auto density = [&](const std::vector<double>& gi) {
    double s = 0.0;
    for (std::size_t k = 0; k < n * n; ++k) s += gi[k] * q[k];
    return s / std::sqrt(std::abs(determinant<double>(gi, n)));
  };
  GradientCheck out;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      std::vector<double> plus = ginv0, minus = ginv0;
      const double w = a == b ? 1.0 : 0.5;
      plus[a * n + b] += eps * w;
      minus[a * n + b] -= eps * w;
      if (a != b) {
        plus[b * n + a] += eps * w;
        minus[b * n + a] -= eps * w;
      }
      const double fd = (density(plus) - density(minus)) / (2.0 * eps);
      const double an = e[a * n + b] * vol;
      out.max_abs_error = std::max(out.max_abs_error, std::abs(fd - an));
      out.max_abs_value = std::max(out.max_abs_value, std::abs(an));
    }
  out.relative = out.max_abs_value > 0.0 ? out.max_abs_error / out.max_abs_value : out.max_abs_error;
  return out;
}

std::vector<double> connection_el_apply(std::span<const double> g, std::span<const double> ginv,
                                        std::size_t n, std::span<const double> nv) {
  (void)g;
  const std::size_t nn = n * n;
  std::vector<double> nup(n * nn, 0.0);  // N^c_r^j
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += nv[c * nn + r * n + k] * ginv[k * n + j];
        nup[c * nn + r * n + j] = s;
      }
  std::vector<double> tup(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t q = 0; q < n; ++q) {
      double tq = 0.0;
      for (std::size_t p = 0; p < n; ++p) tq += nv[p * nn + p * n + q] - nv[p * nn + q * n + p];
      tup[i] += ginv[i * n + q] * tq;
    }
  std::vector<double> e(n * nn, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t j = 0; j < n; ++j) {
            const double d1 = delta2(b, r, a, j);
            if (d1 != 0.0) s += d1 * nup[c * nn + r * n + j];
          }
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t p = 0; p < n; ++p)
            for (std::size_t j = 0; j < n; ++j) {
              const double d2 = delta2(k, b, p, j);
              if (d2 != 0.0) s += d2 * nv[p * nn + k * n + a] * ginv[j * n + c];
            }
        for (std::size_t i = 0; i < n; ++i) s += 2.0 * delta2(b, c, a, i) * tup[i];
        e[a * nn + b * n + c] = s;
      }
  return e;
}

double connection_quadratic_form(std::span<const double> ginv, std::size_t n,
                                 std::span<const double> nv) {
  const std::size_t nn = n * n;
  std::vector<double> t(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = 0; p < n; ++p) t[i] += nv[p * nn + p * n + i] - nv[p * nn + i * n + p];
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double inner = t[i] * t[j];
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t p = 0; p < n; ++p) {
            const double d = delta2(k, r, p, j);
            if (d == 0.0) continue;
            for (std::size_t q = 0; q < n; ++q) inner += d * nv[p * nn + k * n + q] * nv[q * nn + r * n + i];
          }
      s += ginv[i * n + j] * inner;
    }
  return s;
}

ConnectionElOperator connection_el_assemble(std::span<const double> g_point, std::size_t n) {
  if (g_point.size() != n * n) throw Error(ErrorCode::InvalidDimension, "metric sample has wrong size");
  ConnectionElOperator op;
  op.n = n;
  op.g.assign(g_point.begin(), g_point.end());
  op.ginv = inverse<double>(op.g, n);
  const std::size_t m = n * n * n;
  op.matrix.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  std::vector<double> unit(m, 0.0);
  for (std::size_t col = 0; col < m; ++col) {
    unit[col] = 1.0;
    const std::vector<double> e = connection_el_apply(op.g, op.ginv, n, unit);
    for (std::size_t row = 0; row < m; ++row)
      op.matrix(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = e[row];
    unit[col] = 0.0;
  }
  return op;
}

ConnectionElOperator connection_el_assemble(const MetricField& g, std::span<const double> point) {
  const std::vector<double> gv = g.g().at(point);
  return connection_el_assemble(gv, g.dim());
}

KernelReport connection_el_kernel(const Eigen::MatrixXd& op) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(op);
  const Eigen::VectorXd s = svd.singularValues();
  KernelReport rep;
  if (s.size() == 0) return rep;
  rep.largest_singular_value = s(0);
  rep.smallest_singular_value = s(s.size() - 1);
  rep.ratio = rep.largest_singular_value > 0.0 ? rep.smallest_singular_value / rep.largest_singular_value : 0.0;
  const double thr = kKernelThreshold * rep.largest_singular_value;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > thr / kAmbiguityBand && s(k) < thr * kAmbiguityBand) {
      throw Error(ErrorCode::NumericalRankAmbiguity,
                  "singular value " + std::to_string(s(k)) + " lies in the threshold band");
    }
    if (s(k) < thr) ++rep.kernel_dim;
  }
  return rep;
}

KernelReport connection_el_kernel(const ConnectionElOperator& op) { return connection_el_kernel(op.matrix); }

Eigen::MatrixXd symmetric_displacement_basis(std::size_t n) {
  const std::size_t m = n * n * n;
  const std::size_t cols = n * n * (n + 1) / 2;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(cols));
  Eigen::Index col = 0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        const double w = i == j ? 1.0 : 1.0 / std::sqrt(2.0);
        b(static_cast<Eigen::Index>(a * n * n + i * n + j), col) += w;
        if (i != j) b(static_cast<Eigen::Index>(a * n * n + j * n + i), col) += w;
        ++col;
      }
  return b;
}

Eigen::MatrixXd palatini_operator(const ConnectionElOperator& op) {
  const Eigen::MatrixXd b = symmetric_displacement_basis(op.n);
  return b.transpose() * op.matrix * b;
}

ClosedFormCheck closed_form_solution_check(std::span<const double> g, std::size_t n,
                                           std::span<const double> x, std::span<const double> y) {
  if (g.size() != n * n || x.size() != n || y.size() != n) {
    throw Error(ErrorCode::InvalidDimension, "closed-form inputs have inconsistent sizes");
  }
  const std::vector<double> gi = inverse<double>(g, n);
  const std::size_t nn = n * n;
  ClosedFormCheck out;
  out.n_lowered.assign(n * nn, 0.0);
  auto& nl = out.n_lowered;
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        nl[c * nn + a * n + b] = 0.5 * (g[a * n + b] * (x[c] - y[c]) + g[a * n + c] * (y[b] - x[b]) +
                                        g[b * n + c] * (y[a] + x[a]));
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        const double r = nl[c * nn + a * n + b] + nl[b * nn + c * n + a] - g[a * n + b] * x[c] -
                         g[b * n + c] * y[a];
        out.relation = std::max(out.relation, std::abs(r));
      }
  const double dn = static_cast<double>(n);
  for (std::size_t b = 0; b < n; ++b) {
    double tr = 0.0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t c = 0; c < n; ++c) tr += 2.0 * gi[a * n + c] * nl[c * nn + a * n + b];
    out.trace_chain = std::max(out.trace_chain, std::abs(tr - (x[b] + dn * (y[b] - x[b]) + x[b])));
  }
  for (std::size_t a = 0; a < n; ++a) {
    double tr = 0.0;
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        tr += gi[b * n + c] * (nl[c * nn + a * n + b] - nl[c * nn + b * n + a]);
    out.torsion_trace = std::max(out.torsion_trace, std::abs(tr - (dn - 1.0) * x[a]));
  }
  return out;
}

}  // namespace mag
