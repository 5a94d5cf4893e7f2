#include <cmath>

#include "doctest.h"
#include "mag/chart_frame.hpp"
#include "mag/random_fields.hpp"
#include "support.hpp"

using namespace mag;

namespace {

Chart box(std::size_t n, Strategy st = Strategy::analytic()) { return unit_box_chart(n, st); }

TensorField scalar_fn(std::size_t n, int which) {
  return TensorField::make(n, {}, "f", [which](auto x) {
    using S = scalar_of<decltype(x)>;
    using std::sin;
    if (which == 0) return std::vector<S>{x[0] * x[0]};
    if (which == 1) return std::vector<S>{sin(x[0])};
    if (which == 2) return std::vector<S>{S(3.5)};
    return std::vector<S>{x[0]};
  });
}

}  // namespace

TEST_CASE("make_chart validates its inputs") {
  const Chart c = make_chart(4, {"t", "x", "y", "z"}, std::vector<Interval>(4, {0.0, 1.0}));
  CHECK(c.dim() == 4);
  CHECK(c.names()[2] == "y");
  CHECK_THROWS_AS(make_chart(1, {"x"}, {{0.0, 1.0}}), Error);
  try {
    make_chart(1, {"x"}, {{0.0, 1.0}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidDimension);
  }
  try {
    make_chart(2, {"x", "y"}, {{0.0, 1.0}, {1.0, 1.0}});
    FAIL("expected EmptyDomain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyDomain);
  }
  try {
    Strategy::central(2, 0.0);
    FAIL("expected NonPositiveStep");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositiveStep);
  }
}

TEST_CASE("central stencil differentiates x^2 exactly up to rounding") {
  const Chart c = make_chart(4, {"t", "x", "y", "z"}, std::vector<Interval>(4, {-2.0, 2.0}),
                             Strategy::central(2, 1e-3));
  const Frame f = Frame::coordinate(c);
  const std::vector<double> p{1.0, 0.0, 0.0, 0.0};
  CHECK(std::abs(differentiate(scalar_fn(4, 0), f, 0, p) - 2.0) <= 1e-9);
}

TEST_CASE("differentiate elementary cases") {
  const Frame fa = Frame::coordinate(box(3));
  const std::vector<double> p{0.2, -0.1, 0.4};
  CHECK(differentiate(scalar_fn(3, 2), fa, 1, p) == doctest::Approx(0.0));
  CHECK(differentiate(scalar_fn(3, 3), fa, 0, p) == doctest::Approx(1.0));
  const Frame fd = Frame::coordinate(box(3, Strategy::central(2, 1e-3)));
  const std::vector<double> origin{0.0, 0.0, 0.0};
  CHECK(std::abs(differentiate(scalar_fn(3, 1), fd, 0, origin) - 1.0) <= 1e-6);
  const std::vector<double> edge{1.0 - 1e-4, 0.0, 0.0};
  try {
    differentiate(scalar_fn(3, 1), fd, 0, edge);
    FAIL("expected PointTooCloseToBoundary");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PointTooCloseToBoundary);
  }
}

TEST_CASE("analytic nesting depth is bounded") {
  const Chart c = box(2);
  const TensorField f = scalar_fn(2, 1);
  const std::vector<D3> x{D3(0.1), D3(0.2)};
  CHECK_THROWS_AS(partials<D3>(f, c.strategy(), std::span<const D3>(x)), Error);
  const std::vector<D2> y{D2(0.1), D2(0.2)};
  const auto d = partials<D2>(f, c.strategy(), std::span<const D2>(y));
  CHECK(value_of(d[0]) == doctest::Approx(std::cos(0.1)));
}

TEST_CASE("holonomy of coordinate and simple anholonomic frames") {
  const Frame coord = Frame::coordinate(box(3));
  const std::vector<double> p{0.1, 0.2, 0.3};
  for (double c : frame_holonomy(coord, p)) CHECK(c == 0.0);

  const Chart c2 = make_chart(2, {"x", "y"}, {{1.0, 3.0}, {-1.0, 1.0}});
  TensorField basis = TensorField::make(2, {Slot::up, Slot::down}, "E", [](auto x) {
    using S = scalar_of<decltype(x)>;
    return std::vector<S>{S(1.0), S(0.0), S(0.0), x[0]};
  });
  const Frame f = Frame::from_basis(c2, basis);
  const std::vector<double> q{2.0, 0.0};
  const auto c = frame_holonomy(f, q);
  // [e1, e2] = d_y = (1/x) e2
  for (std::size_t i = 0; i < 8; ++i) {
    const double want = (i == flat_index(2, {1, 0, 1})) ? 0.5 : (i == flat_index(2, {1, 1, 0})) ? -0.5 : 0.0;
    CHECK(c[i] == doctest::Approx(want).epsilon(1e-14));
  }
}

TEST_CASE("holonomy is exactly antisymmetric and duality holds for random frames") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Chart c = box(4);
    const Frame f = random_frame(c, seed);
    const auto pts = c.sample_points(20, seed);
    CHECK(duality_defect(f, pts) <= 1e-10);
    CHECK(symmetry_violation(frame_holonomy(f), pts) == 0.0);
  }
}

TEST_CASE("broken coframe fails the duality gate") {
  const Chart c = box(2);
  TensorField e = TensorField::constant(2, {Slot::up, Slot::down}, {1, 0, 0, 1});
  TensorField w = TensorField::constant(2, {Slot::up, Slot::down}, {1, 0.1, 0, 1});
  const Frame f = Frame::from_fields(c, e, w);
  const std::vector<double> p{0.0, 0.0};
  try {
    frame_holonomy(f, p);
    FAIL("expected DegenerateFrame");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::DegenerateFrame);
  }
}

TEST_CASE("analytic and fd2 derivatives agree within 10 h^2") {
  const Chart c = box(4);
  const auto pts = c.sample_points(100, 7);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const TensorField f = random_tensor(4, {Slot::down, Slot::down}, seed, 1.0);
    CHECK(strategy_discrepancy(f, c, pts, 1e-3) <= 10 * 1e-6);
  }
}

TEST_CASE("sample points are deterministic and interior") {
  const Chart c = box(3, Strategy::central(4, 1e-3));
  const auto a = c.sample_points(50, 11);
  const auto b = c.sample_points(50, 11);
  const auto d = c.sample_points(50, 12);
  CHECK(a == b);
  CHECK(a != d);
  for (const auto& p : a) CHECK(c.contains(p, c.sample_margin()));
}
