#include "mag/metric_geometry.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "mag/affine_connection.hpp"
#include "mag/error.hpp"
#include "mag/tensor_ops.hpp"
#include "mag/linalg.hpp"

namespace mag {

ConnectionField make_connection(Frame frame, TensorField coefficients) {
  const Variance want{Slot::up, Slot::down, Slot::down};
  if (coefficients.variance() != want || coefficients.dim() != frame.dim()) {
    throw Error(ErrorCode::SlotVarianceMismatch, "connection coefficients must be [up, down, down]");
  }
  if (coefficients.frame_id() != 0 && coefficients.frame_id() != frame.id()) {
    throw Error(ErrorCode::FrameMismatch, "coefficients belong to another frame");
  }
  ConnectionField c;
  c.coefficients = coefficients.on_frame(frame.id());
  c.frame = std::move(frame);
  return c;
}

ConnectionField levi_civita(const MetricField& g, const Frame& frame) {
  const std::size_t n = frame.dim();
  if (g.dim() != n) throw Error(ErrorCode::InvalidDimension, "metric and frame dimensions differ");
  if (g.frame_id() != 0 && g.frame_id() != frame.id()) {
    throw Error(ErrorCode::FrameMismatch, "metric components belong to another frame");
  }
  const TensorField gf = g.g();
  const TensorField ginv = g.inverse();
  const TensorField holonomy = frame_holonomy(frame);
  const bool holo = frame.holonomic();
  TensorField coeffs = TensorField::make(
      n, {Slot::up, Slot::down, Slot::down}, "LC(" + g.label() + ")",
      [gf, ginv, holonomy, frame, holo, n](auto x) {
        using S = scalar_of<decltype(x)>;
        const std::size_t nn = n * n;
        const std::vector<S> gv = gf(x);
        const std::vector<S> gi = ginv(x);
        const std::vector<S> dg = frame.derivatives(gf, x);  // dg[k][i][j] = e_k g_ij
        std::vector<S> c;
        if (!holo) c = holonomy(x);
        // Lowered Koszul: K_{ijk} = g(nabla_{e_i} e_j, e_k).
        std::vector<S> lowered(n * nn);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
              S s = dg[i * nn + j * n + k] + dg[j * nn + i * n + k] - dg[k * nn + i * n + j];
              if (!holo) {
                for (std::size_t m = 0; m < n; ++m) {
                  s += c[m * nn + i * n + j] * gv[m * n + k] - c[m * nn + j * n + k] * gv[m * n + i] +
                       c[m * nn + k * n + i] * gv[m * n + j];
                }
              }
              lowered[i * nn + j * n + k] = s * 0.5;
            }
        std::vector<S> out(n * nn, S(0.0));
        for (std::size_t l = 0; l < n; ++l)
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
              S s(0.0);
              for (std::size_t k = 0; k < n; ++k) s += gi[l * n + k] * lowered[i * nn + j * n + k];
              out[l * nn + i * n + j] = s;
            }
        return out;
      },
      frame.id());
  ConnectionField lc = make_connection(frame, std::move(coeffs));
  lc.levi_civita_of = g.label();
  return lc;
}

CurvatureSuite curvature_suite(const ConnectionField& connection, const MetricField* metric) {
  const std::size_t n = connection.dim();
  const Frame frame = connection.frame;
  const TensorField gamma = connection.coefficients;
  const TensorField holonomy = frame_holonomy(frame);
  const bool holo = frame.holonomic();
  CurvatureSuite out;
  out.riemann = TensorField::make(
      n, {Slot::up, Slot::down, Slot::down, Slot::down}, "R[" + gamma.label() + "]",
      [frame, gamma, holonomy, holo, n](auto x) {
        using S = scalar_of<decltype(x)>;
        const std::size_t nn = n * n;
        const std::size_t n3 = nn * n;
        const std::vector<S> G = gamma(x);
        const std::vector<S> dG = frame.derivatives(gamma, x);  // dG[k][i][l][j] = e_k Gamma^i_{lj}
        std::vector<S> c;
        if (!holo) c = holonomy(x);
        std::vector<S> R(n * n3, S(0.0));
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
              for (std::size_t l = k + 1; l < n; ++l) {
                S s = dG[k * n3 + i * nn + l * n + j] - dG[l * n3 + i * nn + k * n + j];
                for (std::size_t p = 0; p < n; ++p) {
                  s += G[i * nn + k * n + p] * G[p * nn + l * n + j] -
                       G[i * nn + l * n + p] * G[p * nn + k * n + j];
                  if (!holo) s -= c[p * nn + k * n + l] * G[i * nn + p * n + j];
                }
                R[i * n3 + j * nn + k * n + l] = s;
                R[i * n3 + j * nn + l * n + k] = -s;
              }
        return R;
      },
      frame.id());
  out.riemann = out.riemann.with_symmetry({2, 3, true});
  out.ricci = contract(out.riemann, {{0, 2}}).relabeled("Ric[" + gamma.label() + "]");
  if (metric != nullptr) {
    if (metric->dim() != n) throw Error(ErrorCode::InvalidDimension, "metric dimension differs");
    const TensorField ginv = metric->inverse();
    const TensorField ricci = out.ricci;
    out.scalar = TensorField::make(
        n, {}, "R",
        [ginv, ricci, n](auto x) {
          using S = scalar_of<decltype(x)>;
          const std::vector<S> gi = ginv(x);
          const std::vector<S> r = ricci(x);
          S s(0.0);
          for (std::size_t a = 0; a < n * n; ++a) s += gi[a] * r[a];
          return std::vector<S>{s};
        },
        frame.id());
  }
  return out;
}

TensorField metricity_residual(const MetricField& g, const ConnectionField& connection) {
  return covariant_derivative(connection, g.g()).relabeled("nabla " + g.label());
}

MetricDiagnostics validate_metric(const MetricField& g, std::span<const std::vector<double>> points) {
  const std::size_t n = g.dim();
  MetricDiagnostics d;
  d.min_abs_det = std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    const std::vector<double> gv = g.g().at(p);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        d.max_asymmetry = std::max(d.max_asymmetry, std::abs(gv[i * n + j] - gv[j * n + i]));
    const double det = determinant<double>(gv, n);
    d.min_abs_det = std::min(d.min_abs_det, std::abs(det));
    if (!(std::abs(det) > kSingularDet)) {
      throw Error(ErrorCode::SingularMetric, "metric '" + g.label() + "' is singular at a sample point");
    }
    const std::vector<double> gi = inverse<double>(gv, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += gi[i * n + k] * gv[k * n + j];
        d.inverse_defect = std::max(d.inverse_defect, std::abs(s - (i == j ? 1.0 : 0.0)));
      }
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = 0.5 * (gv[i * n + j] + gv[j * n + i]);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues();
    Signature s;
    for (Eigen::Index k = 0; k < ev.size(); ++k) (ev(k) > 0 ? s.positive : s.negative) += 1;
    if (!(s == g.signature())) d.signature_ok = false;
  }
  return d;
}

MetricField metric_in_frame(const MetricField& coordinate_metric, const Frame& frame) {
  const std::size_t n = frame.dim();
  const TensorField gc = coordinate_metric.g();
  TensorField gf = TensorField::make(
      n, {Slot::down, Slot::down}, coordinate_metric.label(),
      [gc, frame, n](auto x) {
        using S = scalar_of<decltype(x)>;
        const std::vector<S> g = gc(x);
        const std::vector<S> e = frame.basis_at(x);
        std::vector<S> tmp(n * n, S(0.0)), out(n * n, S(0.0));
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t nu = 0; nu < n; ++nu) {
            S s(0.0);
            for (std::size_t mu = 0; mu < n; ++mu) s += e[i * n + mu] * g[mu * n + nu];
            tmp[i * n + nu] = s;
          }
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            S s(0.0);
            for (std::size_t nu = 0; nu < n; ++nu) s += tmp[i * n + nu] * e[j * n + nu];
            out[i * n + j] = s;
          }
        return out;
      },
      frame.id());
  return MetricField(std::move(gf), coordinate_metric.signature());
}

}  // namespace mag
