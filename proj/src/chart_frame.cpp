#include "mag/chart_frame.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <random>

#include "mag/linalg.hpp"

namespace mag {

namespace {

std::uint64_t next_frame_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter++;
}

constexpr std::array<int, 8> kHaltonBases = {2, 3, 5, 7, 11, 13, 17, 19};

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

Strategy Strategy::central(int order, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::NonPositiveStep, "finite-difference step must be > 0");
  if (order != 2 && order != 4) {
    throw Error(ErrorCode::StrategyUnavailable, "central stencil order must be 2 or 4");
  }
  Strategy s;
  s.kind = DiffKind::central;
  s.order = order;
  s.step = step;
  return s;
}

Strategy Strategy::parse(std::string_view name) {
  if (name == "analytic") return analytic();
  if (name == "fd2") return central(2, 1e-3);
  if (name == "fd4") return central(4, 1e-3);
  throw Error(ErrorCode::StrategyUnavailable, "unknown strategy '" + std::string(name) + "'");
}

double Strategy::radius() const {
  if (kind == DiffKind::analytic) return 0.0;
  return order == 4 ? 2.0 * step : step;
}

std::string Strategy::name() const {
  if (kind == DiffKind::analytic) return "analytic";
  return order == 4 ? "fd4" : "fd2";
}

Chart make_chart(std::size_t dim, std::vector<std::string> names, std::vector<Interval> domain,
                 Strategy strategy) {
  if (dim < 2 || dim > kMaxDim) {
    throw Error(ErrorCode::InvalidDimension,
                "chart dimension must lie in [2, " + std::to_string(kMaxDim) + "]");
  }
  if (names.size() != dim || domain.size() != dim) {
    throw Error(ErrorCode::InvalidDimension, "names/domain do not match the chart dimension");
  }
  for (const Interval& iv : domain) {
    if (!(iv.hi > iv.lo)) throw Error(ErrorCode::EmptyDomain, "coordinate interval is empty");
  }
  if (strategy.kind == DiffKind::central && !(strategy.step > 0.0)) {
    throw Error(ErrorCode::NonPositiveStep, "finite-difference step must be > 0");
  }
  Chart c;
  c.names_ = std::move(names);
  c.domain_ = std::move(domain);
  c.strategy_ = strategy;
  return c;
}

Chart Chart::with_strategy(Strategy s) const {
  return make_chart(dim(), names_, domain_, s);
}

double Chart::sample_margin() const {
  // Up to three nested stencils plus slack.
  return std::max(4.0 * strategy_.radius(), 1e-6);
}

bool Chart::contains(std::span<const double> x, double margin) const {
  if (x.size() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (x[i] < domain_[i].lo + margin || x[i] > domain_[i].hi - margin) return false;
  }
  return true;
}

std::vector<std::vector<double>> Chart::sample_points(std::size_t count,
                                                      std::uint64_t seed) const {
  return sample_points(count, seed, sample_margin());
}

std::vector<std::vector<double>> Chart::sample_points(std::size_t count, std::uint64_t seed,
                                                      double margin) const {
  const std::size_t n = dim();
  for (const Interval& iv : domain_) {
    if (!(iv.hi - iv.lo > 2.0 * margin)) {
      throw Error(ErrorCode::EmptyDomain, "domain narrower than the sampling margin");
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> shift(n);
  for (double& s : shift) s = uni(rng);
  const std::uint64_t skip = 1 + (rng() % 1024);
  std::vector<std::vector<double>> pts(count, std::vector<double>(n));
  for (std::size_t k = 0; k < count; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      double u = radical_inverse(k + skip, kHaltonBases[i]) + shift[i];
      u -= std::floor(u);
      const Interval& iv = domain_[i];
      pts[k][i] = iv.lo + margin + u * (iv.hi - iv.lo - 2.0 * margin);
    }
  }
  return pts;
}

// ---- frames ----------------------------------------------------------------

Frame Frame::coordinate(Chart chart) {
  Frame f;
  f.chart_ = std::move(chart);
  f.kind_ = FrameKind::holonomic;
  f.id_ = next_frame_id();
  return f;
}

Frame Frame::from_fields(Chart chart, TensorField basis, TensorField coframe) {
  const std::size_t n = chart.dim();
  if (basis.dim() != n || basis.rank() != 2 || coframe.dim() != n || coframe.rank() != 2) {
    throw Error(ErrorCode::InvalidDimension, "frame fields must be n x n matrices");
  }
  Frame f;
  f.chart_ = std::move(chart);
  f.kind_ = FrameKind::anholonomic;
  f.id_ = next_frame_id();
  f.basis_ = std::move(basis);
  f.coframe_ = std::move(coframe);
  return f;
}

Frame Frame::from_basis(Chart chart, TensorField basis) {
  const std::size_t n = chart.dim();
  TensorField coframe = TensorField::make(n, {Slot::up, Slot::down}, "coframe", [basis, n](auto x) {
    using S = scalar_of<decltype(x)>;
    const std::vector<S> e = basis(x);
    // w = E^{-T}: w^i_mu e_j^mu = delta^i_j.
    const std::vector<S> inv = inverse<S>(e, n, ErrorCode::DegenerateFrame);
    std::vector<S> w(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t mu = 0; mu < n; ++mu) w[i * n + mu] = inv[mu * n + i];
    return w;
  });
  return from_fields(std::move(chart), std::move(basis), std::move(coframe));
}

Frame Frame::with_strategy(Strategy s) const {
  Frame f = *this;
  f.chart_ = chart_.with_strategy(s);
  return f;
}

TensorField frame_gradient(const TensorField& f, const Frame& frame) {
  Variance v;
  v.reserve(f.rank() + 1);
  v.push_back(Slot::down);
  v.insert(v.end(), f.variance().begin(), f.variance().end());
  return TensorField::make(
      f.dim(), std::move(v), "d(" + f.label() + ")",
      [f, frame](auto x) { return frame.derivatives(f, x); }, frame.id());
}

TensorField frame_holonomy(const Frame& frame) {
  const std::size_t n = frame.dim();
  if (frame.holonomic()) {
    return TensorField::zero(n, {Slot::up, Slot::down, Slot::down}, "C").on_frame(frame.id());
  }
  const TensorField basis = frame.basis();
  const Strategy st = frame.chart().strategy();
  return TensorField::make(
             n, {Slot::up, Slot::down, Slot::down}, "C",
             [frame, basis, st, n](auto x) {
               using S = scalar_of<decltype(x)>;
               const std::vector<S> e = frame.basis_at(x);
               const std::vector<S> w = frame.coframe_at(x);
               const std::vector<S> de = partials(basis, st, x);  // de[nu][k][mu]
               const std::size_t nn = n * n;
               std::vector<S> c(n * nn, S(0.0));
               std::vector<S> bracket(n);
               for (std::size_t j = 0; j < n; ++j) {
                 for (std::size_t k = j + 1; k < n; ++k) {
                   for (std::size_t mu = 0; mu < n; ++mu) {
                     S b(0.0);
                     for (std::size_t nu = 0; nu < n; ++nu) {
                       b += e[j * n + nu] * de[nu * nn + k * n + mu] -
                            e[k * n + nu] * de[nu * nn + j * n + mu];
                     }
                     bracket[mu] = b;
                   }
                   for (std::size_t i = 0; i < n; ++i) {
                     S s(0.0);
                     for (std::size_t mu = 0; mu < n; ++mu) s += w[i * n + mu] * bracket[mu];
                     c[i * nn + j * n + k] = s;
                     c[i * nn + k * n + j] = -s;
                   }
                 }
               }
               return c;
             },
             frame.id())
      .with_symmetry({1, 2, true});
}

double duality_defect(const Frame& frame, std::span<const std::vector<double>> points) {
  if (frame.holonomic()) return 0.0;
  const std::size_t n = frame.dim();
  double worst = 0.0;
  for (const auto& p : points) {
    const auto e = frame.basis().at(p);
    const auto w = frame.coframe().at(p);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t mu = 0; mu < n; ++mu) s += w[i * n + mu] * e[j * n + mu];
        worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
      }
  }
  return worst;
}

std::vector<double> frame_holonomy(const Frame& frame, std::span<const double> point) {
  const std::vector<std::vector<double>> pts{std::vector<double>(point.begin(), point.end())};
  if (duality_defect(frame, pts) > 1e-10) {
    throw Error(ErrorCode::DegenerateFrame, "coframe/frame pairing fails the duality gate");
  }
  return frame_holonomy(frame).at(point);
}

double differentiate(const TensorField& scalar, const Frame& frame, std::size_t direction,
                     std::span<const double> point) {
  if (scalar.rank() != 0) throw Error(ErrorCode::SlotVarianceMismatch, "expected a scalar field");
  if (direction >= frame.dim()) throw Error(ErrorCode::InvalidDimension, "bad frame direction");
  if (!frame.chart().contains(point, frame.chart().strategy().radius())) {
    throw Error(ErrorCode::PointTooCloseToBoundary,
                "stencil would leave the chart domain at this point");
  }
  return frame.derivatives(scalar, point)[direction];
}

double strategy_discrepancy(const TensorField& f, const Chart& chart,
                            std::span<const std::vector<double>> points, double h) {
  const Strategy exact = Strategy::analytic();
  const Strategy fd = Strategy::central(2, h);
  double worst = 0.0;
  for (const auto& p : points) {
    if (!chart.contains(p, h)) {
      throw Error(ErrorCode::PointTooCloseToBoundary, "consistency gate point too close to edge");
    }
    const auto a = partials<double>(f, exact, p);
    const auto b = partials<double>(f, fd, p);
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace mag
