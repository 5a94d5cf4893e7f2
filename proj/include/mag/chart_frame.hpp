#pragma once

// Coordinate charts, local frames and the differentiation strategy shared by
// every derivative in the library.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mag/dual.hpp"
#include "mag/error.hpp"
#include "mag/tensor_field.hpp"

namespace mag {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

enum class DiffKind { analytic, central };

/// How partial derivatives are evaluated. `analytic` uses nested forward-mode
/// duals; `central` uses a symmetric stencil of the given order (2 or 4).
struct Strategy {
  DiffKind kind = DiffKind::analytic;
  int order = 2;
  double step = 1e-3;

  static Strategy analytic() { return {}; }
  static Strategy central(int order, double step);
  /// "analytic", "fd2" or "fd4" (h = 1e-3).
  static Strategy parse(std::string_view name);

  /// Stencil half-width in chart units; zero for analytic.
  double radius() const;
  std::string name() const;
};

class Chart {
 public:
  std::size_t dim() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Interval>& domain() const { return domain_; }
  const Strategy& strategy() const { return strategy_; }

  Chart with_strategy(Strategy s) const;

  /// Interior margin used for sampling: room for nested stencils.
  double sample_margin() const;
  bool contains(std::span<const double> x, double margin = 0.0) const;

  /// Scrambled Halton points, deterministic in `seed`, kept `margin` away from
  /// the domain boundary.
  std::vector<std::vector<double>> sample_points(std::size_t count, std::uint64_t seed) const;
  std::vector<std::vector<double>> sample_points(std::size_t count, std::uint64_t seed,
                                                 double margin) const;

 private:
  friend Chart make_chart(std::size_t, std::vector<std::string>, std::vector<Interval>, Strategy);
  std::vector<std::string> names_;
  std::vector<Interval> domain_;
  Strategy strategy_;
};

/// Validating constructor. Throws InvalidDimension, EmptyDomain or
/// NonPositiveStep.
Chart make_chart(std::size_t dim, std::vector<std::string> names, std::vector<Interval> domain,
                 Strategy strategy = Strategy::analytic());

// ---- partial derivatives ---------------------------------------------------

/// All first partials of `f` at x, laid out as out[mu * f.size() + c].
template <class S>
std::vector<S> partials(const TensorField& f, const Strategy& st, std::span<const S> x) {
  const std::size_t n = x.size();
  const std::size_t m = f.size();
  std::vector<S> out(n * m);
  if (st.kind == DiffKind::analytic) {
    if constexpr (dual_level_v<S> < kMaxDualLevel) {
      using DS = Dual<S>;
      std::vector<DS> xd(n);
      for (std::size_t mu = 0; mu < n; ++mu) xd[mu] = DS::variable(x[mu], mu);
      const std::vector<DS> v = f(std::span<const DS>(xd));
      for (std::size_t mu = 0; mu < n; ++mu)
        for (std::size_t c = 0; c < m; ++c) out[mu * m + c] = v[c].d[mu];
      return out;
    } else {
      throw Error(ErrorCode::StrategyUnavailable,
                  "analytic derivative nesting deeper than supported for '" + f.label() + "'");
    }
  }
  std::vector<S> xs(x.begin(), x.end());
  const double h = st.step;
  for (std::size_t mu = 0; mu < n; ++mu) {
    const S x0 = x[mu];
    auto eval_at = [&](double shift) {
      xs[mu] = x0 + shift;
      return f(std::span<const S>(xs));
    };
    if (st.order == 4) {
      const auto p2 = eval_at(2 * h);
      const auto p1 = eval_at(h);
      const auto m1 = eval_at(-h);
      const auto m2 = eval_at(-2 * h);
      for (std::size_t c = 0; c < m; ++c)
        out[mu * m + c] = (m2[c] - p2[c] + 8.0 * (p1[c] - m1[c])) / (12.0 * h);
    } else {
      const auto p1 = eval_at(h);
      const auto m1 = eval_at(-h);
      for (std::size_t c = 0; c < m; ++c) out[mu * m + c] = (p1[c] - m1[c]) / (2.0 * h);
    }
    xs[mu] = x0;
  }
  return out;
}

// ---- frames ----------------------------------------------------------------

enum class FrameKind { holonomic, anholonomic };

/// A local frame e_i = e_i^mu d_mu with dual coframe w^i = w^i_mu dx^mu.
///
/// Basis and coframe are rank-2 fields whose first slot is the frame index and
/// second slot the coordinate index. The coordinate frame stores neither.
class Frame {
 public:
  static Frame coordinate(Chart chart);
  static Frame from_fields(Chart chart, TensorField basis, TensorField coframe);
  /// Coframe obtained by pointwise inversion of the basis matrix.
  static Frame from_basis(Chart chart, TensorField basis);

  const Chart& chart() const { return chart_; }
  std::size_t dim() const { return chart_.dim(); }
  FrameKind kind() const { return kind_; }
  bool holonomic() const { return kind_ == FrameKind::holonomic; }
  std::uint64_t id() const { return id_; }
  const TensorField& basis() const { return basis_; }
  const TensorField& coframe() const { return coframe_; }

  Frame with_strategy(Strategy s) const;

  /// Basis matrix E[i][mu] at x (identity for the coordinate frame).
  template <class S>
  std::vector<S> basis_at(std::span<const S> x) const {
    if (holonomic()) return identity<S>();
    return basis_(x);
  }
  template <class S>
  std::vector<S> coframe_at(std::span<const S> x) const {
    if (holonomic()) return identity<S>();
    return coframe_(x);
  }

  /// Frame derivatives of every component: out[k * f.size() + c] = e_k(f_c).
  template <class S>
  std::vector<S> derivatives(const TensorField& f, std::span<const S> x) const {
    std::vector<S> d = partials(f, chart_.strategy(), x);
    if (holonomic()) return d;
    const std::size_t n = dim();
    const std::size_t m = f.size();
    const std::vector<S> e = basis_(x);
    std::vector<S> out(n * m, S(0.0));
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t mu = 0; mu < n; ++mu) {
        const S& ekm = e[k * n + mu];
        for (std::size_t c = 0; c < m; ++c) out[k * m + c] += ekm * d[mu * m + c];
      }
    return out;
  }

 private:
  template <class S>
  std::vector<S> identity() const {
    const std::size_t n = dim();
    std::vector<S> id(n * n, S(0.0));
    for (std::size_t i = 0; i < n; ++i) id[i * n + i] = S(1.0);
    return id;
  }

  Chart chart_;
  FrameKind kind_ = FrameKind::holonomic;
  std::uint64_t id_ = 0;
  TensorField basis_;
  TensorField coframe_;
};

/// Gradient along the frame, prepended as a new leftmost down slot.
TensorField frame_gradient(const TensorField& f, const Frame& frame);

/// Holonomy C^i_{jk} = <[e_j, e_k], w^i> as a field (zero for coordinate frames).
TensorField frame_holonomy(const Frame& frame);

/// Holonomy at one point; throws DegenerateFrame if duality fails there.
std::vector<double> frame_holonomy(const Frame& frame, std::span<const double> point);

/// max |<w^i, e_j> - delta^i_j| over the points.
double duality_defect(const Frame& frame, std::span<const std::vector<double>> points);

/// Frame derivative e_direction(f) of a scalar field at a point. Throws
/// PointTooCloseToBoundary when the stencil would leave the domain.
double differentiate(const TensorField& scalar, const Frame& frame, std::size_t direction,
                     std::span<const double> point);

/// Largest |analytic - central(order 2)| partial derivative discrepancy over
/// the points; the consistency gate requires it to stay below 10 h^2.
double strategy_discrepancy(const TensorField& f, const Chart& chart,
                            std::span<const std::vector<double>> points, double h = 1e-3);

}  // namespace mag
