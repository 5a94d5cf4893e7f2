#include <cmath>

#include "doctest.h"
#include "mag/affine_connection.hpp"
#include "mag/catalog.hpp"
#include "mag/kaluza.hpp"
#include "mag/linalg.hpp"
#include "mag/lie_connection.hpp"
#include "mag/random_fields.hpp"
#include "mag/tensor_ops.hpp"
#include "support.hpp"

using namespace mag;
using testing::max_abs;
using testing::max_diff;

namespace {

TensorField frame_components(const TensorField& xc, const Frame& f) {
  const std::size_t n = xc.dim();
  return TensorField::make(
      n, {Slot::up}, xc.label(),
      [xc, f, n](auto p) {
        using S = scalar_of<decltype(p)>;
        const auto w = f.coframe_at(p);
        const auto v = xc(p);
        std::vector<S> out(n, S(0.0));
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t mu = 0; mu < n; ++mu) out[r] += w[r * n + mu] * v[mu];
        return out;
      },
      f.id());
}

double worst_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double w = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(a[i] - b[i]));
  return w;
}

}  // namespace

TEST_CASE("covariant and coordinate Lie derivative formulas agree") {
  for (std::size_t n : {3u, 4u}) {
    const Chart c = unit_box_chart(n);
    const Frame f = Frame::coordinate(c);
    const ConnectionField conn = random_connection(f, 10 + n);
    const TensorField x = random_vector(n, 20 + n);
    const auto pts = c.sample_points(5, n);
    CHECK(max_diff(lie_derivative(conn, x), lie_derivative_coordinate(conn, x), pts) <= 1e-8);
  }
}

TEST_CASE("Lie derivative is a tensor: frame and coordinate results agree") {
  const std::size_t n = 4;
  for (const char* st : {"analytic", "fd4"}) {
    const Chart c = unit_box_chart(n, Strategy::parse(st));
    const Frame f = random_frame(c, 31);
    const ConnectionField conn = random_connection(f, 32);
    const TensorField xc = random_vector(n, 33);
    const TensorField lf = to_coordinates(lie_derivative(conn, frame_components(xc, f)), f);
    const TensorField lc = lie_derivative_coordinate(to_coordinate_frame(conn), xc);
    const double tol = std::string(st) == "analytic" ? 1e-8 : 1e-6;
    CHECK(max_diff(lf, lc, c.sample_points(4, 5)) <= tol);
  }
}

TEST_CASE("coordinate formulas refuse anholonomic frames") {
  const Chart c = unit_box_chart(3);
  const Frame f = random_frame(c, 1);
  const ConnectionField conn = random_connection(f, 2);
  try {
    lie_derivative_coordinate(conn, random_vector(3, 3).on_frame(f.id()));
    FAIL("expected AnholonomicFrameUnsupported");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AnholonomicFrameUnsupported);
  }
  try {
    lie_derivative_adapted(conn, 0);
    FAIL("expected AnholonomicFrameUnsupported");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AnholonomicFrameUnsupported);
  }
}

TEST_CASE("adapted Lie derivative along coordinate lines") {
  const Chart c = unit_box_chart(3);
  const Frame f = Frame::coordinate(c);
  const TensorField g = TensorField::make(3, {Slot::up, Slot::down, Slot::down}, "x1", [](auto p) {
    using S = scalar_of<decltype(p)>;
    std::vector<S> v(27, S(0.0));
    v[flat_index(3, {1, 1, 1})] = p[1];
    return v;
  });
  const auto l = lie_derivative_adapted(make_connection(f, g), 1).at(std::vector<double>{0.1, 0.2, 0.3});
  CHECK(l[flat_index(3, {1, 1, 1})] == 1.0);

  const ConnectionField conn = random_connection(f, 5);
  const auto pts = c.sample_points(5, 1);
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<double> e(3, 0.0);
    e[k] = 1.0;
    const TensorField x = TensorField::constant(3, {Slot::up}, e, "d_k");
    CHECK(max_diff(lie_derivative(conn, x), lie_derivative_adapted(conn, k), pts) <= 1e-8);
    for (const auto& p : c.sample_points(2, 2, 0.2)) {
      CHECK(worst_gap(lie_derivative_flow(conn, x, p).value, lie_derivative_adapted(conn, k).at(p)) <= 1e-6);
    }
  }

  const Spacetime s = build_spacetime("schwarzschild", {}, Strategy::analytic());
  CHECK(max_abs(lie_derivative_adapted(s.connection, 0), s.frame.chart().sample_points(5, 3)) == 0.0);

  const KaluzaLift lift = assemble(build_kaluza("kaluza-random", {{"seed", 1.0}}));
  CHECK(max_abs(lie_derivative_adapted(to_coordinate_frame(lift.levi_civita), 0),
                lift.frame.chart().sample_points(3, 4)) <= 1e-12);
}

TEST_CASE("flow map is the identity at t = 0 and inverts under t -> -t") {
  const Chart c = unit_box_chart(3);
  const TensorField x = random_vector(3, 90);
  for (const auto& p : c.sample_points(4, 5, 0.2)) {
    const FlowMap id = integrate_flow(x, c, p, 0.0);
    CHECK(worst_gap(id.phi, p) == 0.0);
    const FlowMap fwd = integrate_flow(x, c, p, 1e-2);
    const FlowMap back = integrate_flow(x, c, fwd.phi, -1e-2);
    CHECK(worst_gap(back.phi, p) <= 1e-9);
    CHECK(worst_gap(fwd.phi, p) > 1e-4);
  }
  const Chart c4 = unit_box_chart(4);
  const TensorField none = TensorField::zero(4, {Slot::up});
  const auto r = lie_derivative_flow(random_connection(Frame::coordinate(c4), 91), none, std::vector<double>(4, 0.1));
  for (double v : r.value) CHECK(v == 0.0);
}

TEST_CASE("Lie derivative transforms as a tensor under linear coordinate changes") {
  const std::size_t n = 3;
  const Chart c = unit_box_chart(n);
  const ConnectionField conn = random_connection(Frame::coordinate(c), 95);
  const TensorField x = random_vector(n, 96);
  const std::vector<double> a{1.2, 0.3, -0.1, 0.2, 0.9, 0.4, -0.3, 0.1, 1.1};
  const std::vector<double> b{0.1, -0.2, 0.05};
  const auto pts = c.sample_points(5, 6);
  CHECK(linear_change_defect(conn, x, a, b, pts) <= 1e-6);

  // The same change applied to a non-tensor (the coefficients alone) is visible.
  const std::vector<double> id{1, 0, 0, 0, 1, 0, 0, 0, 1};
  CHECK(linear_change_defect(conn, x, id, std::vector<double>(3, 0.0), pts) <= 1e-14);
  const Frame f = random_frame(c, 97);
  CHECK_THROWS_AS(linear_change_defect(random_connection(f, 98), x.on_frame(f.id()), a, b, pts), Error);
}

TEST_CASE("Lie derivative is linear in the vector field but not tensorial in it") {
  const std::size_t n = 3;
  const Chart c = unit_box_chart(n);
  const Frame f = random_frame(c, 70);
  const ConnectionField conn = random_connection(f, 71);
  const TensorField x = random_vector(n, 72).on_frame(f.id());
  const TensorField y = random_vector(n, 73).on_frame(f.id());
  const auto pts = c.sample_points(5, 10);
  const TensorField lhs = lie_derivative(conn, linear_combination(0.7, x, -1.3, y));
  const TensorField rhs = linear_combination(0.7, lie_derivative(conn, x), -1.3, lie_derivative(conn, y));
  CHECK(max_diff(lhs, rhs, pts) <= 1e-12);

  const TensorField phi = random_tensor(n, {}, 74, 1.0);
  const TensorField fx = TensorField::make(n, {Slot::up}, "fX", [phi, x](auto p) {
    auto v = x(p);
    const auto s = phi(p)[0];
    for (auto& e : v) e *= s;
    return v;
  }, f.id());
  const TensorField fl = TensorField::make(n, {Slot::up, Slot::down, Slot::down}, "fL",
                                           [phi, l = lie_derivative(conn, x)](auto p) {
                                             auto v = l(p);
                                             const auto s = phi(p)[0];
                                             for (auto& e : v) e *= s;
                                             return v;
                                           }, f.id());
  CHECK(max_diff(lie_derivative(conn, fx), fl, pts) > 1e-3);
}

TEST_CASE("symmetries have vanishing Lie derivative") {
  const Spacetime s = build_spacetime("schwarzschild", {}, Strategy::analytic());
  const auto pts = s.frame.chart().sample_points(5, 11);
  for (std::size_t axis : {0u, 3u}) {
    std::vector<double> e(4, 0.0);
    e[axis] = 1.0;
    const TensorField k = TensorField::constant(4, {Slot::up}, e, "killing");
    CHECK(max_abs(lie_derivative(s.connection, k), pts) <= 1e-12);
  }
  const TensorField radial = TensorField::make(4, {Slot::up}, "r d_r", [](auto p) {
    using S = scalar_of<decltype(p)>;
    return std::vector<S>{S(0.0), p[1], S(0.0), S(0.0)};
  });
  CHECK(max_abs(lie_derivative(s.connection, radial), pts) > 1e-3);

  const Spacetime m = build_spacetime("minkowski", {}, Strategy::analytic());
  const TensorField affine = TensorField::make(4, {Slot::up}, "Ax+b", [](auto p) {
    using S = scalar_of<decltype(p)>;
    return std::vector<S>{p[1] * 0.3 + 1.0, p[0] * 0.3 - p[2], p[1] + p[3] * 2.0, S(0.5) - p[2] * 2.0};
  });
  CHECK(max_abs(lie_derivative(m.connection, affine), m.frame.chart().sample_points(5, 12)) <= 1e-14);
}

TEST_CASE("flow oracle failure modes") {
  const Chart c = unit_box_chart(3);
  const Frame f = Frame::coordinate(c);
  const ConnectionField conn = random_connection(f, 80);
  const TensorField x = TensorField::constant(3, {Slot::up}, {1.0, 0.0, 0.0}, "d_0");
  FlowOracleOptions far;
  far.times = {0.4, 0.2, 0.1};
  try {
    lie_derivative_flow(conn, x, std::vector<double>{0.8, 0.0, 0.0}, far);
    FAIL("expected FlowLeftDomain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FlowLeftDomain);
  }
  const TensorField wild = TensorField::make(3, {Slot::up}, "wild", [](auto p) {
    using S = scalar_of<decltype(p)>;
    return std::vector<S>{sin(p[1] * 100.0) * 0.5, sin(p[0] * 100.0) * 0.5, S(0.0)};
  });
  FlowOracleOptions coarse;
  coarse.times = {4e-2, 2e-2, 1e-2};
  try {
    lie_derivative_flow(conn, wild, std::vector<double>{0.1, 0.2, 0.0}, coarse);
    FAIL("expected ExtrapolationNonConvergent");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ExtrapolationNonConvergent);
  }
  FlowOracleOptions unordered;
  unordered.times = {1e-3, 2e-3, 4e-3};
  CHECK_THROWS_AS(lie_derivative_flow(conn, x, std::vector<double>{0.0, 0.0, 0.0}, unordered), Error);
}
