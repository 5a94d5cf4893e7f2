#include "mag/affine_connection.hpp"

#include "mag/error.hpp"
#include "mag/tensor_ops.hpp"

namespace mag {

TensorField covariant_derivative(const ConnectionField& connection, const TensorField& t) {
  const Frame frame = connection.frame;
  const std::size_t n = frame.dim();
  if (t.dim() != n) throw Error(ErrorCode::InvalidDimension, "field and connection dims differ");
  if (t.frame_id() != 0 && t.frame_id() != frame.id()) {
    throw Error(ErrorCode::FrameMismatch, "field '" + t.label() + "' lives on another frame");
  }
  const TensorField gamma = connection.coefficients;
  const std::size_t r = t.rank();
  Variance v{Slot::down};
  v.insert(v.end(), t.variance().begin(), t.variance().end());
  const Variance tv = t.variance();
  return TensorField::make(
      n, std::move(v), "nabla(" + t.label() + ")",
      [frame, gamma, t, tv, n, r](auto x) {
        using S = scalar_of<decltype(x)>;
        const std::size_t nn = n * n;
        const std::vector<S> G = gamma(x);
        const std::vector<S> src = t(x);
        std::vector<S> out = frame.derivatives(t, x);
        const std::size_t m = src.size();
        std::vector<std::size_t> idx(r);
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t off = 0; off < m; ++off) {
            unflatten(n, off, idx);
            S acc(0.0);
            for (std::size_t s = 0; s < r; ++s) {
              const std::size_t a = idx[s];
              for (std::size_t p = 0; p < n; ++p) {
                idx[s] = p;
                const S& val = src[flat_index(n, idx)];
                if (tv[s] == Slot::up) {
                  acc += G[a * nn + k * n + p] * val;
                } else {
                  acc -= G[p * nn + k * n + a] * val;
                }
              }
              idx[s] = a;
            }
            out[k * m + off] += acc;
          }
        return out;
      },
      frame.id());
}

TensorField torsion(const ConnectionField& connection) {
  const std::size_t n = connection.dim();
  const TensorField gamma = connection.coefficients;
  const TensorField holonomy = frame_holonomy(connection.frame);
  const bool holo = connection.frame.holonomic();
  return TensorField::make(
             n, {Slot::up, Slot::down, Slot::down}, "T[" + gamma.label() + "]",
             [gamma, holonomy, holo, n](auto x) {
               using S = scalar_of<decltype(x)>;
               const std::size_t nn = n * n;
               const std::vector<S> G = gamma(x);
               std::vector<S> c;
               if (!holo) c = holonomy(x);
               std::vector<S> out(n * nn, S(0.0));
               for (std::size_t i = 0; i < n; ++i)
                 for (std::size_t j = 0; j < n; ++j)
                   for (std::size_t k = j + 1; k < n; ++k) {
                     S s = G[i * nn + j * n + k] - G[i * nn + k * n + j];
                     if (!holo) s -= c[i * nn + j * n + k];
                     out[i * nn + j * n + k] = s;
                     out[i * nn + k * n + j] = -s;
                   }
               return out;
             },
             connection.frame.id())
      .with_symmetry({1, 2, true});
}

TensorField contracted_torsion(const TensorField& torsion_field) {
  return contract(torsion_field, {{0, 1}}).relabeled("tr T");
}

DisplacementField displacement(const ConnectionField& connection, const MetricField& g) {
  DisplacementField d;
  d.connection = connection;
  d.levi_civita = levi_civita(g, connection.frame);
  d.n = subtract(connection.coefficients, d.levi_civita.coefficients).relabeled("N");
  return d;
}

ConnectionField connection_from_displacement(const ConnectionField& levi_civita,
                                             const TensorField& n) {
  if (n.variance() != Variance{Slot::up, Slot::down, Slot::down}) {
    throw Error(ErrorCode::SlotVarianceMismatch, "displacement must be [up, down, down]");
  }
  return make_connection(levi_civita.frame,
                         add(levi_civita.coefficients, n).relabeled("hatGamma+N"));
}

StructureResiduals structure_equation_residuals(const ConnectionField& connection) {
  const Frame frame = connection.frame;
  const std::size_t n = frame.dim();
  const Strategy st = frame.chart().strategy();
  const TensorField gamma = connection.coefficients;
  const TensorField tors = torsion(connection);
  const TensorField riem = curvature_suite(connection).riemann;

  // Coordinate components of the connection 1-forms: A^i_{j nu} = Gamma^i_{mj} W^m_nu.
  const TensorField forms = TensorField::make(
      n, {Slot::up, Slot::down, Slot::down}, "w^i_j", [frame, gamma, n](auto x) {
        using S = scalar_of<decltype(x)>;
        const std::size_t nn = n * n;
        const std::vector<S> G = gamma(x);
        const std::vector<S> w = frame.coframe_at(x);
        std::vector<S> out(n * nn, S(0.0));
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            for (std::size_t nu = 0; nu < n; ++nu) {
              S s(0.0);
              for (std::size_t m = 0; m < n; ++m) s += G[i * nn + m * n + j] * w[m * n + nu];
              out[i * nn + j * n + nu] = s;
            }
        return out;
      });
  const TensorField coframe = frame.holonomic()
                                  ? TensorField::make(n, {Slot::up, Slot::down}, "w",
                                                      [frame](auto x) { return frame.coframe_at(x); })
                                  : frame.coframe();

  StructureResiduals res;
  res.first = TensorField::make(
      n, {Slot::up, Slot::down, Slot::down}, "structure-1",
      [frame, st, gamma, tors, coframe, n](auto x) {
        using S = scalar_of<decltype(x)>;
        const std::size_t nn = n * n;
        const std::vector<S> G = gamma(x);
        const std::vector<S> T = tors(x);
        const std::vector<S> e = frame.basis_at(x);
        const std::vector<S> dw = partials(coframe, st, x);  // dw[mu][i][nu]
        std::vector<S> out(n * nn, S(0.0));
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t k = 0; k < n; ++k)
            for (std::size_t l = 0; l < n; ++l) {
              S d(0.0);
              for (std::size_t mu = 0; mu < n; ++mu)
                for (std::size_t nu = 0; nu < n; ++nu) {
                  d += e[k * n + mu] * e[l * n + nu] *
                       (dw[mu * nn + i * n + nu] - dw[nu * nn + i * n + mu]);
                }
              const S wedge = G[i * nn + k * n + l] - G[i * nn + l * n + k];
              out[i * nn + k * n + l] = T[i * nn + k * n + l] - (d + wedge);
            }
        return out;
      },
      frame.id());
  res.second = TensorField::make(
      n, {Slot::up, Slot::down, Slot::down, Slot::down}, "structure-2",
      [frame, st, gamma, riem, forms, n](auto x) {
        using S = scalar_of<decltype(x)>;
        const std::size_t nn = n * n;
        const std::size_t n3 = nn * n;
        const std::vector<S> G = gamma(x);
        const std::vector<S> R = riem(x);
        const std::vector<S> e = frame.basis_at(x);
        const std::vector<S> dA = partials(forms, st, x);  // dA[mu][i][j][nu]
        std::vector<S> out(n * n3, S(0.0));
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
              for (std::size_t l = 0; l < n; ++l) {
                S d(0.0);
                for (std::size_t mu = 0; mu < n; ++mu)
                  for (std::size_t nu = 0; nu < n; ++nu) {
                    d += e[k * n + mu] * e[l * n + nu] *
                         (dA[mu * n3 + i * nn + j * n + nu] - dA[nu * n3 + i * nn + j * n + mu]);
                  }
                S wedge(0.0);
                for (std::size_t p = 0; p < n; ++p) {
                  wedge += G[i * nn + k * n + p] * G[p * nn + l * n + j] -
                           G[i * nn + l * n + p] * G[p * nn + k * n + j];
                }
                const std::size_t o = i * n3 + j * nn + k * n + l;
                out[o] = R[o] - (d + wedge);
              }
        return out;
      },
      frame.id());
  return res;
}

ConnectionField to_coordinate_frame(const ConnectionField& connection) {
  if (connection.frame.holonomic()) return connection;
  const Frame frame = connection.frame;
  const std::size_t n = frame.dim();
  const Strategy st = frame.chart().strategy();
  const TensorField gamma = connection.coefficients;
  const TensorField coframe = frame.coframe();
  TensorField coeffs = TensorField::make(
      n, {Slot::up, Slot::down, Slot::down}, gamma.label(),
      [frame, st, gamma, coframe, n](auto x) {
        using S = scalar_of<decltype(x)>;
        const std::size_t nn = n * n;
        const std::vector<S> G = gamma(x);
        const std::vector<S> e = frame.basis_at(x);
        const std::vector<S> w = frame.coframe_at(x);
        const std::vector<S> dw = partials(coframe, st, x);  // dw[nu][B][rho]
        std::vector<S> out(n * nn, S(0.0));
        // G2[C][nu][rho] = W^A_nu W^B_rho Gamma^C_{AB}
        std::vector<S> half(n * nn, S(0.0));
        for (std::size_t c = 0; c < n; ++c)
          for (std::size_t a = 0; a < n; ++a)
            for (std::size_t rho = 0; rho < n; ++rho) {
              S s(0.0);
              for (std::size_t b = 0; b < n; ++b) s += G[c * nn + a * n + b] * w[b * n + rho];
              half[c * nn + a * n + rho] = s;
            }
        for (std::size_t mu = 0; mu < n; ++mu)
          for (std::size_t nu = 0; nu < n; ++nu)
            for (std::size_t rho = 0; rho < n; ++rho) {
              S s(0.0);
              for (std::size_t b = 0; b < n; ++b) {
                s += e[b * n + mu] * dw[nu * nn + b * n + rho];
                S t(0.0);
                for (std::size_t a = 0; a < n; ++a) t += w[a * n + nu] * half[b * nn + a * n + rho];
                s += e[b * n + mu] * t;
              }
              out[mu * nn + nu * n + rho] = s;
            }
        return out;
      });
  ConnectionField c = make_connection(Frame::coordinate(frame.chart()), std::move(coeffs));
  c.levi_civita_of = connection.levi_civita_of;
  c.u_invariant = connection.u_invariant;
  return c;
}

}  // namespace mag
