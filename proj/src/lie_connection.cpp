#include "mag/lie_connection.hpp"

#include <algorithm>
#include <cmath>

#include "mag/affine_connection.hpp"
#include "mag/error.hpp"
#include "mag/linalg.hpp"
#include "mag/metric_geometry.hpp"
#include "mag/tensor_ops.hpp"

namespace mag {

namespace {

void require_vector(const ConnectionField& c, const TensorField& x) {
  if (x.dim() != c.dim() || x.variance() != Variance{Slot::up}) {
    throw Error(ErrorCode::SlotVarianceMismatch, "Lie derivative needs an [up] vector field");
  }
  if (x.frame_id() != 0 && x.frame_id() != c.frame.id()) {
    throw Error(ErrorCode::FrameMismatch, "vector field lives on another frame");
  }
}

}  // namespace

TensorField lie_derivative(const ConnectionField& connection, const TensorField& x) {
  require_vector(connection, x);
  const std::size_t n = connection.dim();
  const TensorField xf = x.on_frame(connection.frame.id());
  const TensorField tors = torsion(connection);
  const TensorField riem = curvature_suite(connection).riemann;
  const TensorField dx = covariant_derivative(connection, xf);  // [s][r]
  // A^r_s = X^r_||s + X^p T^r_ps, stored [r][s]
  const TensorField a = TensorField::make(
      n, {Slot::up, Slot::down}, "A",
      [dx, tors, xf, n](auto p) {
        using S = scalar_of<decltype(p)>;
        const std::vector<S> d = dx(p);
        const std::vector<S> t = tors(p);
        const std::vector<S> xv = xf(p);
        std::vector<S> out(n * n);
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t s = 0; s < n; ++s) {
            S v = d[s * n + r];
            for (std::size_t q = 0; q < n; ++q) v += xv[q] * t[r * n * n + q * n + s];
            out[r * n + s] = v;
          }
        return out;
      },
      connection.frame.id());
  const TensorField da = covariant_derivative(connection, a);  // [k][r][s]
  return TensorField::make(
      n, {Slot::up, Slot::down, Slot::down}, "L_X(" + connection.label() + ")",
      [da, riem, xf, n](auto p) {
        using S = scalar_of<decltype(p)>;
        const std::size_t nn = n * n;
        const std::vector<S> d = da(p);
        const std::vector<S> r4 = riem(p);
        const std::vector<S> xv = xf(p);
        std::vector<S> out(n * nn);
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t k = 0; k < n; ++k)
            for (std::size_t s = 0; s < n; ++s) {
              S v = d[k * nn + r * n + s];
              for (std::size_t q = 0; q < n; ++q) v += xv[q] * r4[r * nn * n + s * nn + q * n + k];
              out[r * nn + k * n + s] = v;
            }
        return out;
      },
      connection.frame.id());
}

TensorField lie_derivative_coordinate(const ConnectionField& connection, const TensorField& x) {
  if (!connection.frame.holonomic()) {
    throw Error(ErrorCode::AnholonomicFrameUnsupported,
                "coordinate Lie derivative formula needs a coordinate frame");
  }
  require_vector(connection, x);
  const std::size_t n = connection.dim();
  const Strategy st = connection.frame.chart().strategy();
  const TensorField gamma = connection.coefficients;
  const TensorField dx = TensorField::make(n, {Slot::down, Slot::up}, "dX",
                                           [x, st](auto p) { return partials(x, st, p); });
  return TensorField::make(
      n, {Slot::up, Slot::down, Slot::down}, "L_X(" + connection.label() + ")",
      [gamma, x, dx, st, n](auto p) {
        using S = scalar_of<decltype(p)>;
        const std::size_t nn = n * n;
        const std::vector<S> g = gamma(p);
        const std::vector<S> dg = partials(gamma, st, p);  // [q][r][k][s]
        const std::vector<S> xv = x(p);
        const std::vector<S> d1 = dx(p);                   // [q][r] = d_q X^r
        const std::vector<S> d2 = partials(dx, st, p);     // [k][s][r] = d_k d_s X^r
        std::vector<S> out(n * nn);
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t k = 0; k < n; ++k)
            for (std::size_t s = 0; s < n; ++s) {
              S v = d2[k * nn + s * n + r];
              for (std::size_t q = 0; q < n; ++q) {
                v += xv[q] * dg[q * n * nn + r * nn + k * n + s];
                v -= g[q * nn + k * n + s] * d1[q * n + r];
                v += g[r * nn + q * n + s] * d1[k * n + q];
                v += g[r * nn + k * n + q] * d1[s * n + q];
              }
              out[r * nn + k * n + s] = v;
            }
        return out;
      },
      connection.frame.id());
}

TensorField lie_derivative_adapted(const ConnectionField& connection, std::size_t index) {
  if (!connection.frame.holonomic()) {
    throw Error(ErrorCode::AnholonomicFrameUnsupported,
                "adapted Lie derivative needs a coordinate frame");
  }
  const std::size_t n = connection.dim();
  if (index >= n) throw Error(ErrorCode::InvalidDimension, "coordinate index out of range");
  const Strategy st = connection.frame.chart().strategy();
  const TensorField gamma = connection.coefficients;
  const std::size_t m = gamma.size();
  return TensorField::make(
      n, {Slot::up, Slot::down, Slot::down}, "d_" + std::to_string(index) + "(" + connection.label() + ")",
      [gamma, st, index, m](auto p) {
        using S = scalar_of<decltype(p)>;
        const std::vector<S> d = partials(gamma, st, p);
        return std::vector<S>(d.begin() + static_cast<std::ptrdiff_t>(index * m),
                              d.begin() + static_cast<std::ptrdiff_t>((index + 1) * m));
      },
      connection.frame.id());
}

TensorField to_coordinates(const TensorField& t, const Frame& frame) {
  if (frame.holonomic()) return t.on_frame(0);
  const std::size_t n = t.dim();
  const std::size_t rank = t.rank();
  const Variance v = t.variance();
  return TensorField::make(
      n, v, t.label(),
      [t, frame, n, rank, v](auto p) {
        using S = scalar_of<decltype(p)>;
        std::vector<S> cur = t(p);
        const std::vector<S> e = frame.basis_at(p);
        const std::vector<S> w = frame.coframe_at(p);
        std::vector<std::size_t> idx(rank);
        for (std::size_t slot = 0; slot < rank; ++slot) {
          std::vector<S> next(cur.size(), S(0.0));
          for (std::size_t o = 0; o < cur.size(); ++o) {
            unflatten(n, o, idx);
            const std::size_t mu = idx[slot];
            S acc(0.0);
            for (std::size_t a = 0; a < n; ++a) {
              idx[slot] = a;
              const S& m = v[slot] == Slot::up ? e[a * n + mu] : w[a * n + mu];
              acc += m * cur[flat_index(n, idx)];
            }
            next[o] = acc;
          }
          cur = std::move(next);
        }
        return cur;
      },
      0);
}

double linear_change_defect(const ConnectionField& connection, const TensorField& x,
                            std::span<const double> a_in, std::span<const double> b_in,
                            std::span<const std::vector<double>> points) {
  if (!connection.frame.holonomic()) {
    throw Error(ErrorCode::AnholonomicFrameUnsupported, "linear coordinate change needs a coordinate frame");
  }
  require_vector(connection, x);
  const std::size_t n = connection.dim();
  if (a_in.size() != n * n || b_in.size() != n) {
    throw Error(ErrorCode::InvalidDimension, "coordinate change has the wrong size");
  }
  const std::vector<double> a(a_in.begin(), a_in.end());
  const std::vector<double> b(b_in.begin(), b_in.end());
  const std::vector<double> ai = inverse<double>(a, n, ErrorCode::DegenerateFrame);
  const std::size_t nn = n * n;
  auto to_x = [ai, b, n](auto y) {
    using S = scalar_of<decltype(y)>;
    std::vector<S> out(n, S(0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out[i] += ai[i * n + j] * (y[j] - b[j]);
    return out;
  };
  const TensorField gamma = connection.coefficients;
  const TensorField gy = TensorField::make(n, {Slot::up, Slot::down, Slot::down}, "G'", [=](auto y) {
    using S = scalar_of<decltype(y)>;
    const std::vector<S> xs = to_x(y);
    const std::vector<S> g = gamma(std::span<const S>(xs));
    std::vector<S> out(n * nn, S(0.0));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t s = 0; s < n; ++s)
          for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q)
              for (std::size_t t = 0; t < n; ++t)
                out[r * nn + k * n + s] += a[r * n + p] * g[p * nn + q * n + t] * ai[q * n + k] * ai[t * n + s];
    return out;
  });
  const TensorField xy = TensorField::make(n, {Slot::up}, "X'", [=](auto y) {
    using S = scalar_of<decltype(y)>;
    const std::vector<S> xs = to_x(y);
    const std::vector<S> v = x(std::span<const S>(xs));
    std::vector<S> out(n, S(0.0));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t q = 0; q < n; ++q) out[r] += a[r * n + q] * v[q];
    return out;
  });
  const Chart& cx = connection.frame.chart();
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("y" + std::to_string(i));
  // Any box works here: the fields are evaluated only at images of `points`.
  const Chart cy = make_chart(n, names, std::vector<Interval>(n, Interval{-1e6, 1e6}), cx.strategy());
  const TensorField ly = lie_derivative(make_connection(Frame::coordinate(cy), gy), xy);
  const TensorField lx = lie_derivative(connection, x);
  double worst = 0.0;
  std::vector<double> y(n);
  for (const auto& p : points) {
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = b[i];
      for (std::size_t j = 0; j < n; ++j) y[i] += a[i * n + j] * p[j];
    }
    const std::vector<double> vy = ly.at(y);
    const std::vector<double> vx = lx.at(p);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t s = 0; s < n; ++s) {
          double back = 0.0;
          for (std::size_t p2 = 0; p2 < n; ++p2)
            for (std::size_t q = 0; q < n; ++q)
              for (std::size_t t = 0; t < n; ++t)
                back += ai[r * n + p2] * vy[p2 * nn + q * n + t] * a[q * n + k] * a[t * n + s];
          worst = std::max(worst, std::abs(back - vx[r * nn + k * n + s]));
        }
  }
  return worst;
}

FlowMap integrate_flow(const TensorField& x, const Chart& chart, std::span<const double> point, double t,
                       int substeps) {
  const std::size_t n = chart.dim();
  const std::size_t nn = n * n;
  if (x.dim() != n || x.variance() != Variance{Slot::up} || point.size() != n) {
    throw Error(ErrorCode::InvalidDimension, "flow needs an [up] field and a point of the chart");
  }
  if (substeps < 1) throw Error(ErrorCode::NonPositiveStep, "flow needs at least one step");
  const Strategy st = chart.strategy();
  const TensorField dx = TensorField::make(n, {Slot::down, Slot::up}, "dX",
                                           [x, st](auto p) { return partials(x, st, p); });
  const double margin = chart.sample_margin();

  // y' for y = (phi, J, H).
  auto rhs = [&](const std::vector<double>& y) {
    const std::span<const double> phi(y.data(), n);
    if (!chart.contains(phi, margin)) {
      throw Error(ErrorCode::FlowLeftDomain, "flow trajectory left the chart domain");
    }
    const std::vector<double> xv = x.at(phi);
    const std::vector<double> d1 = dx.at(phi);                     // [b][a] = d_b X^a
    const std::vector<double> d2 = partials<double>(dx, st, phi);  // [c][b][a]
    std::vector<double> out(y.size(), 0.0);
    const double* jac = y.data() + n;
    const double* hes = y.data() + n + nn;
    for (std::size_t a = 0; a < n; ++a) out[a] = xv[a];
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t b = 0; b < n; ++b) s += d1[b * n + a] * jac[b * n + k];
        out[n + a * n + k] = s;
      }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t s = 0; s < n; ++s) {
          double v = 0.0;
          for (std::size_t b = 0; b < n; ++b) {
            v += d1[b * n + a] * hes[b * nn + k * n + s];
            for (std::size_t c = 0; c < n; ++c) v += d2[c * nn + b * n + a] * jac[b * n + k] * jac[c * n + s];
          }
          out[n + nn + a * nn + k * n + s] = v;
        }
    return out;
  };

  std::vector<double> y(n + nn + n * nn, 0.0);
  std::copy(point.begin(), point.end(), y.begin());
  for (std::size_t a = 0; a < n; ++a) y[n + a * n + a] = 1.0;
  const double h = t / substeps;
  auto axpy = [](const std::vector<double>& a, double c, const std::vector<double>& b) {
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + c * b[i];
    return r;
  };
  for (int step = 0; step < substeps && t != 0.0; ++step) {
    const auto k1 = rhs(y);
    const auto k2 = rhs(axpy(y, h / 2, k1));
    const auto k3 = rhs(axpy(y, h / 2, k2));
    const auto k4 = rhs(axpy(y, h, k3));
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  if (!chart.contains(std::span<const double>(y.data(), n), margin)) {
    throw Error(ErrorCode::FlowLeftDomain, "flow trajectory left the chart domain");
  }
  FlowMap out;
  out.phi.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
  out.jacobian.assign(y.begin() + static_cast<std::ptrdiff_t>(n), y.begin() + static_cast<std::ptrdiff_t>(n + nn));
  out.hessian.assign(y.begin() + static_cast<std::ptrdiff_t>(n + nn), y.end());
  return out;
}

FlowOracleResult lie_derivative_flow(const ConnectionField& connection, const TensorField& x,
                                     std::span<const double> point, const FlowOracleOptions& options) {
  require_vector(connection, x);
  const auto& ts = options.times;
  if (ts.size() != 3 || options.substeps < 1 || !(ts[0] > ts[1] && ts[1] > ts[2] && ts[2] > 0.0)) {
    throw Error(ErrorCode::ConfigParseError,
                "flow oracle needs three strictly decreasing positive times and positive substeps");
  }
  const std::size_t n = connection.dim();
  const std::size_t nn = n * n;
  const Chart chart = connection.frame.chart();
  const TensorField gamma = to_coordinate_frame(connection).coefficients;
  const TensorField xc = to_coordinates(x.on_frame(connection.frame.id()), connection.frame);

  // (phi_t^* Gamma)^r_ks = (J^-1)^r_a (H^a_ks + Gamma^a_bc(phi) J^b_k J^c_s)
  auto pulled_back = [&](double t) {
    const FlowMap fm = integrate_flow(xc, chart, point, t, options.substeps);
    const std::vector<double> jinv = inverse<double>(fm.jacobian, n, ErrorCode::ExtrapolationNonConvergent);
    const std::vector<double> g = gamma.at(fm.phi);
    const std::vector<double>& jac = fm.jacobian;
    std::vector<double> inner(n * nn, 0.0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t s = 0; s < n; ++s) {
          double v = fm.hessian[a * nn + k * n + s];
          for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) v += g[a * nn + b * n + c] * jac[b * n + k] * jac[c * n + s];
          inner[a * nn + k * n + s] = v;
        }
    std::vector<double> out(n * nn, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t ks = 0; ks < nn; ++ks) out[r * nn + ks] += jinv[r * n + a] * inner[a * nn + ks];
    return out;
  };

  std::vector<std::vector<double>> central;
  for (double t : options.times) {
    const auto plus = pulled_back(t);
    const auto minus = pulled_back(-t);
    std::vector<double> d(plus.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (plus[i] - minus[i]) / (2 * t);
    central.push_back(std::move(d));
  }
  auto richardson = [](const std::vector<double>& coarse, const std::vector<double>& fine, double ratio) {
    const double w = ratio * ratio;
    std::vector<double> r(coarse.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = (w * fine[i] - coarse[i]) / (w - 1.0);
    return r;
  };
  const auto r1 = richardson(central[0], central[1], ts[0] / ts[1]);
  const auto r2 = richardson(central[1], central[2], ts[1] / ts[2]);
  FlowOracleResult res;
  res.value = r2;
  double scale = 1.0;
  for (std::size_t i = 0; i < r1.size(); ++i) {
    res.spread = std::max(res.spread, std::abs(r1[i] - r2[i]));
    res.coarse_gap = std::max(res.coarse_gap, std::abs(central[0][i] - central[1][i]));
    res.fine_gap = std::max(res.fine_gap, std::abs(central[1][i] - central[2][i]));
    scale = std::max(scale, std::abs(r2[i]));
  }
  const double floor = options.noise_floor * scale;
  if (!std::isfinite(res.fine_gap) || (res.fine_gap > floor && res.fine_gap > 0.5 * res.coarse_gap)) {
    throw Error(ErrorCode::ExtrapolationNonConvergent,
                "difference quotients are not shrinking (" + std::to_string(res.coarse_gap) + " then " +
                    std::to_string(res.fine_gap) + ")");
  }
  return res;
}

}  // namespace mag
