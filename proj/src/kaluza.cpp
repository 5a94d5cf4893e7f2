#include "mag/kaluza.hpp"

#include "mag/affine_connection.hpp"
#include "mag/error.hpp"
#include "mag/metric_geometry.hpp"
#include "mag/tensor_ops.hpp"

namespace mag {

namespace {

constexpr std::size_t kBase = 4;
constexpr std::size_t kLift = 5;

template <class S>
std::vector<S> base_point(std::span<const S> x5) {
  return std::vector<S>(x5.begin() + 1, x5.end());
}

void require_4d(const KaluzaConfiguration& c) {
  if (c.base_chart.dim() != kBase || c.base_metric.dim() != kBase || c.gamma.dim() != kBase ||
      c.psi.dim() != kBase) {
    throw Error(ErrorCode::InvalidDimension, "Kaluza configurations live over a 4D base");
  }
  if (c.gamma.variance() != Variance{Slot::down} || c.psi.rank() != 0) {
    throw Error(ErrorCode::SlotVarianceMismatch, "gamma must be a covector and psi a scalar");
  }
}

/// 4D fields reused by every closed form.
struct BaseGeometry {
  TensorField g, ginv, christoffel, riemann, ricci, omega, omega_cov;
};

BaseGeometry base_geometry(const KaluzaConfiguration& c) {
  BaseGeometry b;
  const Frame f4 = Frame::coordinate(c.base_chart);
  const MetricField g(c.base_metric.g().on_frame(0), c.base_metric.signature());
  const ConnectionField lc = levi_civita(g, f4);
  const CurvatureSuite cs = curvature_suite(lc);
  b.g = g.g();
  b.ginv = g.inverse();
  b.christoffel = lc.coefficients;
  b.riemann = cs.riemann;
  b.ricci = cs.ricci;
  b.omega = em_fields(c).omega;
  b.omega_cov = covariant_derivative(lc, b.omega.on_frame(f4.id()));  // [p][i][j] = Omega_ij||p
  return b;
}

}  // namespace

Chart kaluza_chart(const Chart& base) {
  std::vector<std::string> names{"u"};
  names.insert(names.end(), base.names().begin(), base.names().end());
  std::vector<Interval> dom{Interval{-1.0, 1.0}};
  dom.insert(dom.end(), base.domain().begin(), base.domain().end());
  return make_chart(base.dim() + 1, std::move(names), std::move(dom), base.strategy());
}

Frame kaluza_frame(const KaluzaConfiguration& config) {
  require_4d(config);
  const TensorField gamma = config.gamma;
  TensorField basis = TensorField::make(kLift, {Slot::up, Slot::down}, "E_kaluza", [gamma](auto x) {
    using S = scalar_of<decltype(x)>;
    const std::vector<S> gm = gamma(base_point(x));
    std::vector<S> e(kLift * kLift, S(0.0));
    for (std::size_t a = 0; a < kLift; ++a) e[a * kLift + a] = S(1.0);
    for (std::size_t i = 1; i < kLift; ++i) e[i * kLift] = -gm[i - 1];
    return e;
  });
  TensorField coframe = TensorField::make(kLift, {Slot::up, Slot::down}, "W_kaluza", [gamma](auto x) {
    using S = scalar_of<decltype(x)>;
    const std::vector<S> gm = gamma(base_point(x));
    std::vector<S> w(kLift * kLift, S(0.0));
    for (std::size_t a = 0; a < kLift; ++a) w[a * kLift + a] = S(1.0);
    for (std::size_t i = 1; i < kLift; ++i) w[i] = gm[i - 1];
    return w;
  });
  return Frame::from_fields(kaluza_chart(config.base_chart), std::move(basis), std::move(coframe));
}

KaluzaLift assemble(const KaluzaConfiguration& config) {
  require_4d(config);
  KaluzaLift lift;
  lift.frame = kaluza_frame(config);
  const TensorField g4 = config.base_metric.g();
  const Signature s4 = config.base_metric.signature();
  const Signature s5{s4.positive + 1, s4.negative};
  TensorField hat = TensorField::make(
      kLift, {Slot::down, Slot::down}, "g_hat",
      [g4](auto x) {
        using S = scalar_of<decltype(x)>;
        const std::vector<S> g = g4(base_point(x));
        std::vector<S> out(kLift * kLift, S(0.0));
        out[0] = S(1.0);
        for (std::size_t i = 0; i < kBase; ++i)
          for (std::size_t j = 0; j < kBase; ++j) out[(i + 1) * kLift + j + 1] = g[i * kBase + j];
        return out;
      },
      lift.frame.id());
  lift.metric = MetricField(std::move(hat), s5);
  const TensorField gamma = config.gamma;
  TensorField coord = TensorField::make(kLift, {Slot::down, Slot::down}, "g_hat_coord",
                                        [g4, gamma](auto x) {
                                          using S = scalar_of<decltype(x)>;
                                          const auto xb = base_point(x);
                                          const std::vector<S> g = g4(xb);
                                          const std::vector<S> gm = gamma(xb);
                                          std::vector<S> out(kLift * kLift, S(0.0));
                                          out[0] = S(1.0);
                                          for (std::size_t i = 0; i < kBase; ++i) {
                                            out[i + 1] = gm[i];
                                            out[(i + 1) * kLift] = gm[i];
                                            for (std::size_t j = 0; j < kBase; ++j)
                                              out[(i + 1) * kLift + j + 1] =
                                                  g[i * kBase + j] + gm[i] * gm[j];
                                          }
                                          return out;
                                        });
  lift.coordinate_metric = MetricField(std::move(coord), s5);
  lift.levi_civita = levi_civita(lift.metric, lift.frame);
  lift.levi_civita.u_invariant = true;
  return lift;
}

TensorField pad_to_5d(const TensorField& base_field) {
  if (base_field.dim() != kBase) throw Error(ErrorCode::InvalidDimension, "expected a 4D field");
  const std::size_t r = base_field.rank();
  const TensorField t = base_field;
  return TensorField::make(kLift, base_field.variance(), base_field.label(), [t, r](auto x) {
    using S = scalar_of<decltype(x)>;
    const std::vector<S> v = t(base_point(x));
    std::vector<S> out(ipow_size(kLift, r), S(0.0));
    std::vector<std::size_t> idx(r);
    for (std::size_t off = 0; off < v.size(); ++off) {
      unflatten(kBase, off, idx);
      for (auto& i : idx) ++i;
      out[flat_index(kLift, idx)] = v[off];
    }
    return out;
  });
}

TensorField slice_to_base(const TensorField& field5, std::vector<bool> base_slots, Variance variance) {
  if (field5.dim() != kLift) throw Error(ErrorCode::InvalidDimension, "expected a 5D field");
  if (base_slots.size() != field5.rank()) {
    throw Error(ErrorCode::SlotVarianceMismatch, "slot mask does not match the field rank");
  }
  const std::size_t r = field5.rank();
  const std::size_t out_rank = variance.size();
  const TensorField t = field5;
  return TensorField::make(kBase, std::move(variance), field5.label(), [t, base_slots, r, out_rank](auto x) {
    using S = scalar_of<decltype(x)>;
    std::vector<S> x5{S(0.0)};
    x5.insert(x5.end(), x.begin(), x.end());
    const std::vector<S> v = t(x5);
    std::vector<S> out(ipow_size(kBase, out_rank));
    std::vector<std::size_t> idx(out_rank), full(r);
    for (std::size_t off = 0; off < out.size(); ++off) {
      unflatten(kBase, off, idx);
      std::size_t k = 0;
      for (std::size_t s = 0; s < r; ++s) full[s] = base_slots[s] ? idx[k++] + 1 : 0;
      out[off] = v[flat_index(kLift, full)];
    }
    return out;
  });
}

TensorField restrict_to_base(const TensorField& field5) {
  return slice_to_base(field5, std::vector<bool>(field5.rank(), true), field5.variance());
}

EmFields em_fields(const KaluzaConfiguration& config) {
  require_4d(config);
  const TensorField gamma = config.gamma;
  const TensorField psi = config.psi;
  const Strategy st = config.base_chart.strategy();
  const double inv_kappa = 1.0 / config.kappa;
  EmFields em;
  em.omega = TensorField::make(kBase, {Slot::down, Slot::down}, "Omega", [gamma, st](auto x) {
                using S = scalar_of<decltype(x)>;
                const std::vector<S> dg = partials(gamma, st, x);  // dg[i][j] = d_i gamma_j
                std::vector<S> out(kBase * kBase, S(0.0));
                for (std::size_t i = 0; i < kBase; ++i)
                  for (std::size_t j = i + 1; j < kBase; ++j) {
                    const S w = (dg[i * kBase + j] - dg[j * kBase + i]) * 0.5;
                    out[i * kBase + j] = w;
                    out[j * kBase + i] = -w;
                  }
                return out;
              }).with_symmetry({0, 1, true});
  em.f = scale(em.omega, inv_kappa).relabeled("F").with_symmetry({0, 1, true});
  em.a = TensorField::make(kBase, {Slot::down}, "A", [gamma, psi, st, inv_kappa](auto x) {
    using S = scalar_of<decltype(x)>;
    const std::vector<S> dpsi = partials(psi, st, x);
    std::vector<S> a = gamma(x);
    for (std::size_t i = 0; i < kBase; ++i) a[i] = (a[i] + dpsi[i]) * inv_kappa;
    return a;
  });
  return em;
}

KaluzaConfiguration gauge_transform(const KaluzaConfiguration& config, const TensorField& f) {
  require_4d(config);
  if (f.dim() != kBase || f.rank() != 0) {
    throw Error(ErrorCode::SlotVarianceMismatch, "gauge function must be a 4D scalar");
  }
  KaluzaConfiguration out = config;
  const TensorField gamma = config.gamma;
  const Strategy st = config.base_chart.strategy();
  out.gamma = TensorField::make(kBase, {Slot::down}, gamma.label() + "-df", [gamma, f, st](auto x) {
    using S = scalar_of<decltype(x)>;
    std::vector<S> g = gamma(x);
    const std::vector<S> df = partials(f, st, x);
    for (std::size_t i = 0; i < kBase; ++i) g[i] -= df[i];
    return g;
  });
  out.psi = add(config.psi, f).relabeled(config.psi.label() + "+f");
  out.label = config.label + "+gauge";
  return out;
}

ConnectionField hat_connection_forms(const KaluzaConfiguration& config) {
  const BaseGeometry b = base_geometry(config);
  const Frame frame = kaluza_frame(config);
  TensorField coeffs = TensorField::make(
      kLift, {Slot::up, Slot::down, Slot::down}, "Gamma_hat_closed", [b](auto x) {
        using S = scalar_of<decltype(x)>;
        const auto xb = base_point(x);
        const std::vector<S> gi = b.ginv(xb);
        const std::vector<S> cs = b.christoffel(xb);
        const std::vector<S> om = b.omega(xb);
        constexpr std::size_t n = kLift;
        constexpr std::size_t m = kBase;
        std::vector<S> out(n * n * n, S(0.0));
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j) {
            S up(0.0);  // Omega^i_j
            for (std::size_t k = 0; k < m; ++k) up += gi[i * m + k] * om[k * m + j];
            out[(i + 1) * n * n + 0 * n + (j + 1)] = -up;
            out[(i + 1) * n * n + (j + 1) * n + 0] = -up;
            out[0 * n * n + (j + 1) * n + (i + 1)] = om[i * m + j];
            for (std::size_t k = 0; k < m; ++k)
              out[(i + 1) * n * n + (k + 1) * n + (j + 1)] = cs[i * m * m + k * m + j];
          }
        return out;
      });
  ConnectionField c = make_connection(frame, std::move(coeffs));
  c.levi_civita_of = "g_hat";
  c.u_invariant = true;
  return c;
}

TensorField hat_ricci(const KaluzaConfiguration& config) {
  const BaseGeometry b = base_geometry(config);
  return TensorField::make(kLift, {Slot::down, Slot::down}, "Ric_hat_closed", [b](auto x) {
    using S = scalar_of<decltype(x)>;
    constexpr std::size_t n = kLift;
    constexpr std::size_t m = kBase;
    const auto xb = base_point(x);
    const std::vector<S> gi = b.ginv(xb);
    const std::vector<S> ric = b.ricci(xb);
    const std::vector<S> om = b.omega(xb);
    const std::vector<S> dom = b.omega_cov(xb);
    std::vector<S> mixed(m * m, S(0.0));  // Omega^p_i
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t q = 0; q < m; ++q) mixed[p * m + i] += gi[p * m + q] * om[q * m + i];
    std::vector<S> out(n * n, S(0.0));
    S sq(0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        S s = ric[i * m + j];
        for (std::size_t p = 0; p < m; ++p) s -= mixed[p * m + i] * om[p * m + j] * 2.0;
        out[(i + 1) * n + j + 1] = s;
        // Omega^rs Omega_rs = -Omega^r_s Omega^s_r
        sq -= mixed[i * m + j] * mixed[j * m + i];
      }
    out[0] = sq;
    for (std::size_t i = 0; i < m; ++i) {
      S div(0.0);  // g^pq Omega_iq||p
      for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = 0; q < m; ++q) div += gi[p * m + q] * dom[p * m * m + i * m + q];
      out[(i + 1) * n] = div;
      out[i + 1] = div;
    }
    return out;
  });
}

TensorField hat_riemann(const KaluzaConfiguration& config) {
  const BaseGeometry b = base_geometry(config);
  return TensorField::make(
      kLift, {Slot::up, Slot::down, Slot::down, Slot::down}, "Riem_hat_closed", [b](auto x) {
        using S = scalar_of<decltype(x)>;
        constexpr std::size_t n = kLift;
        constexpr std::size_t m = kBase;
        const auto xb = base_point(x);
        const std::vector<S> gi = b.ginv(xb);
        const std::vector<S> riem = b.riemann(xb);
        const std::vector<S> om = b.omega(xb);
        const std::vector<S> dom = b.omega_cov(xb);  // [a][j][b] = Omega_jb||a
        std::vector<S> mixed(m * m, S(0.0));          // Omega^i_j
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j)
            for (std::size_t q = 0; q < m; ++q) mixed[i * m + j] += gi[i * m + q] * om[q * m + j];
        auto at = [](std::size_t a, std::size_t bb, std::size_t c, std::size_t d) {
          return ((a * n + bb) * n + c) * n + d;
        };
        std::vector<S> out(n * n * n * n, S(0.0));
        // rho^0_j = (Omega_jb||a - Omega_ja||b) on (e_a, e_b), and -Omega^k_j Omega_ka on (e_a, e_0).
        std::vector<S> r0(m * m * m, S(0.0));  // R^0_{jab}
        std::vector<S> r00(m * m, S(0.0));     // R^0_{ja0}
        for (std::size_t j = 0; j < m; ++j)
          for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t bb = 0; bb < m; ++bb)
              r0[(j * m + a) * m + bb] = dom[(a * m + j) * m + bb] - dom[(bb * m + j) * m + a];
            S s(0.0);
            for (std::size_t k = 0; k < m; ++k) s -= mixed[k * m + j] * om[k * m + a];
            r00[j * m + a] = s;
          }
        for (std::size_t j = 0; j < m; ++j)
          for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t bb = 0; bb < m; ++bb) out[at(0, j + 1, a + 1, bb + 1)] = r0[(j * m + a) * m + bb];
            out[at(0, j + 1, a + 1, 0)] = r00[j * m + a];
            out[at(0, j + 1, 0, a + 1)] = -r00[j * m + a];
          }
        // Metric compatibility: R^i_0CD = -g^ik R^0_kCD.
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t a = 0; a < m; ++a) {
            S s0(0.0);
            for (std::size_t k = 0; k < m; ++k) s0 -= gi[i * m + k] * r00[k * m + a];
            out[at(i + 1, 0, a + 1, 0)] = s0;
            out[at(i + 1, 0, 0, a + 1)] = -s0;
            for (std::size_t bb = 0; bb < m; ++bb) {
              S s(0.0);
              for (std::size_t k = 0; k < m; ++k) s -= gi[i * m + k] * r0[(k * m + a) * m + bb];
              out[at(i + 1, 0, a + 1, bb + 1)] = s;
            }
          }
        // rho^i_j = rho*^i_j - (2 Omega^i_j Omega_ab + Omega^i_a Omega_jb - Omega^i_b Omega_ja)
        // on (e_a, e_b), and -Omega^i_j||a on (e_a, e_0).
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j)
            for (std::size_t a = 0; a < m; ++a) {
              for (std::size_t bb = 0; bb < m; ++bb) {
                out[at(i + 1, j + 1, a + 1, bb + 1)] =
                    riem[((i * m + j) * m + a) * m + bb] -
                    (mixed[i * m + j] * om[a * m + bb] * 2.0 + mixed[i * m + a] * om[j * m + bb] -
                     mixed[i * m + bb] * om[j * m + a]);
              }
              S d(0.0);
              for (std::size_t q = 0; q < m; ++q) d += gi[i * m + q] * dom[(a * m + q) * m + j];
              out[at(i + 1, j + 1, a + 1, 0)] = -d;
              out[at(i + 1, j + 1, 0, a + 1)] = d;
            }
        return out;
      });
}

LiftFieldResiduals lift_field_residuals(const KaluzaConfiguration& config) {
  const KaluzaLift lift = assemble(config);
  const CurvatureSuite cs = curvature_suite(lift.levi_civita, &lift.metric);
  const TensorField ric = cs.ricci;
  const TensorField scalar = *cs.scalar;
  const TensorField ghat = lift.metric.g();
  TensorField einstein5 = TensorField::make(
      kLift, {Slot::down, Slot::down}, "E_hat",
      [ric, scalar, ghat](auto x) {
        using S = scalar_of<decltype(x)>;
        std::vector<S> r = ric(x);
        const S s = scalar(x)[0];
        const std::vector<S> g = ghat(x);
        for (std::size_t a = 0; a < r.size(); ++a) r[a] -= s * g[a] * 0.5;
        return r;
      },
      lift.frame.id());
  LiftFieldResiduals res;
  res.eq_b = slice_to_base(ric, {false, true}, {Slot::down}).relabeled("R_hat_0j");
  res.eq_c = restrict_to_base(einstein5).relabeled("lift_c");
  return res;
}

EinsteinMaxwellResiduals einstein_maxwell_residuals(const KaluzaConfiguration& config) {
  require_4d(config);
  const Frame f4 = Frame::coordinate(config.base_chart);
  const MetricField g(config.base_metric.g().on_frame(0), config.base_metric.signature());
  const ConnectionField lc = levi_civita(g, f4);
  const CurvatureSuite cs = curvature_suite(lc, &g);
  const TensorField f = em_fields(config).f.on_frame(f4.id());
  const TensorField df = covariant_derivative(lc, f);  // [p][i][q]
  const TensorField ginv = g.inverse();
  const TensorField gg = g.g();
  const TensorField ric = cs.ricci;
  const TensorField scalar = *cs.scalar;
  const double coupling = 8.0 * std::numbers::pi * config.newton_g / std::pow(config.light_c, 4);
  EinsteinMaxwellResiduals res;
  res.maxwell = TensorField::make(kBase, {Slot::down}, "maxwell", [df, ginv](auto x) {
    using S = scalar_of<decltype(x)>;
    constexpr std::size_t m = kBase;
    const std::vector<S> d = df(x);
    const std::vector<S> gi = ginv(x);
    std::vector<S> out(m, S(0.0));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = 0; q < m; ++q) out[i] += gi[p * m + q] * d[(p * m + i) * m + q];
    return out;
  });
  res.einstein = TensorField::make(
      kBase, {Slot::down, Slot::down}, "einstein", [f, ginv, gg, ric, scalar, coupling](auto x) {
        using S = scalar_of<decltype(x)>;
        constexpr std::size_t m = kBase;
        const std::vector<S> fv = f(x);
        const std::vector<S> gi = ginv(x);
        const std::vector<S> g = gg(x);
        const std::vector<S> r = ric(x);
        const S rs = scalar(x)[0];
        std::vector<S> fup(m * m, S(0.0));  // F^p_i
        for (std::size_t p = 0; p < m; ++p)
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t q = 0; q < m; ++q) fup[p * m + i] += gi[p * m + q] * fv[q * m + i];
        S f2(0.0);  // F^rs F_rs = -F^r_s F^s_r
        for (std::size_t r1 = 0; r1 < m; ++r1)
          for (std::size_t s1 = 0; s1 < m; ++s1) f2 -= fup[r1 * m + s1] * fup[s1 * m + r1];
        std::vector<S> out(m * m);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j) {
            S t(0.0);
            for (std::size_t p = 0; p < m; ++p) t += fup[p * m + i] * fv[p * m + j];
            t -= f2 * g[i * m + j] * 0.25;
            out[i * m + j] = r[i * m + j] - rs * g[i * m + j] * 0.5 - t * coupling;
          }
        return out;
      });
  return res;
}

ReducedAction reduced_action_density(const KaluzaConfiguration& config) {
  const KaluzaLift lift = assemble(config);
  const CurvatureSuite cs5 = curvature_suite(lift.levi_civita, &lift.metric);
  const Frame f4 = Frame::coordinate(config.base_chart);
  const MetricField g(config.base_metric.g().on_frame(0), config.base_metric.signature());
  const CurvatureSuite cs4 = curvature_suite(levi_civita(g, f4), &g);
  const TensorField f = em_fields(config).f;
  const TensorField ginv = g.inverse();
  const TensorField scalar = *cs4.scalar;
  const double coupling = 4.0 * std::numbers::pi * config.newton_g / std::pow(config.light_c, 4);
  ReducedAction ra;
  ra.lifted = restrict_to_base(*cs5.scalar).relabeled("R_hat");
  ra.reduced = TensorField::make(kBase, {}, "R-k2F2", [f, ginv, scalar, coupling](auto x) {
    using S = scalar_of<decltype(x)>;
    constexpr std::size_t m = kBase;
    const std::vector<S> fv = f(x);
    const std::vector<S> gi = ginv(x);
    S f2(0.0);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        for (std::size_t c = 0; c < m; ++c)
          for (std::size_t d = 0; d < m; ++d)
            f2 += gi[a * m + c] * gi[b * m + d] * fv[a * m + b] * fv[c * m + d];
    return std::vector<S>{scalar(x)[0] - f2 * coupling};
  });
  return ra;
}

std::vector<TensorField> deformation_basis(const KaluzaConfiguration& config) {
  require_4d(config);
  std::vector<TensorField> out;
  for (std::size_t i = 0; i < kBase; ++i)
    for (std::size_t j = i; j < kBase; ++j) {
      std::vector<double> v(kLift * kLift, 0.0);
      v[(i + 1) * kLift + j + 1] += 0.5;
      v[(j + 1) * kLift + i + 1] += 0.5;
      out.push_back(TensorField::constant(kLift, {Slot::up, Slot::up}, v,
                                          "dg^" + std::to_string(i) + std::to_string(j)));
    }
  const TensorField ginv = config.base_metric.inverse();
  for (std::size_t m = 0; m < kBase; ++m) {
    out.push_back(TensorField::make(kLift, {Slot::up, Slot::up}, "dgamma_" + std::to_string(m),
                                    [ginv, m](auto x) {
                                      using S = scalar_of<decltype(x)>;
                                      const std::vector<S> gi = ginv(base_point(x));
                                      std::vector<S> v(kLift * kLift, S(0.0));
                                      for (std::size_t j = 0; j < kBase; ++j) {
                                        v[j + 1] = -gi[m * kBase + j];
                                        v[(j + 1) * kLift] = -gi[j * kBase + m];
                                      }
                                      return v;
                                    }));
  }
  return out;
}

}  // namespace mag
