#include <cmath>
#include <random>

#include "doctest.h"
#include "mag/affine_connection.hpp"
#include "mag/catalog.hpp"
#include "mag/linalg.hpp"
#include "mag/random_fields.hpp"
#include "mag/tensor_ops.hpp"
#include "mag/variational.hpp"
#include "support.hpp"

using namespace mag;
using testing::max_abs;
using testing::max_diff;

namespace {

std::vector<double> random_values(std::size_t count, std::uint64_t seed, double amp = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-amp, amp);
  std::vector<double> v(count);
  for (double& x : v) x = uni(rng);
  return v;
}

std::vector<double> lorentz_sample(std::size_t n, std::uint64_t seed) {
  const MetricField g = random_metric(n, seed);
  return g.g().at(std::vector<double>(n, 0.1));
}

}  // namespace

TEST_CASE("action density: direct and decomposed forms differ by the divergence") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Chart c = unit_box_chart(4);
    const Frame f = Frame::coordinate(c);
    const MetricField g = random_metric(4, seed);
    const ConnectionField conn = random_connection(f, seed + 10);
    const ActionDensityPair a = action_density(g, conn);
    const auto pts = c.sample_points(6, seed);
    CHECK(max_abs(decomposition_defect(a), pts) <= 1e-8);
    CHECK(max_abs(decomposition_defect(a, -1.0), pts) > 1e-3);
  }
}

TEST_CASE("action density identity holds in an anholonomic frame") {
  const Chart c = unit_box_chart(4);
  const Frame f = random_frame(c, 21);
  const ActionDensityPair a = action_density(random_metric(4, 22), random_connection(f, 23));
  CHECK(max_abs(decomposition_defect(a), c.sample_points(4, 3)) <= 1e-8);
}

TEST_CASE("action density identity with central differences") {
  const Chart c = unit_box_chart(4, Strategy::parse("fd2"));
  const Frame f = Frame::coordinate(c);
  const ActionDensityPair a = action_density(random_metric(4, 31), random_connection(f, 32));
  CHECK(max_abs(decomposition_defect(a), c.sample_points(4, 5)) <= 1e-5);
}

TEST_CASE("zero displacement: decomposed density is the metric scalar curvature") {
  const Chart c = unit_box_chart(3);
  const Frame f = Frame::coordinate(c);
  const MetricField g = random_metric(3, 41);
  const ConnectionField lc = levi_civita(g, f);
  const ActionDensityPair a = action_density(g, lc);
  const auto pts = c.sample_points(6, 6);
  CHECK(max_abs(a.divergence, pts) <= 1e-12);
  const TensorField rv = TensorField::make(
      3, {}, "R sqrt|g|",
      [r = *curvature_suite(lc, &g).scalar, v = g.volume_density()](auto x) {
        using S = scalar_of<decltype(x)>;
        return std::vector<S>{r(x)[0] * v(x)[0]};
      });
  CHECK(max_diff(a.decomposed, rv, pts) <= 1e-10);
  CHECK(max_diff(a.direct, rv, pts) <= 1e-10);
}

TEST_CASE("metric field equations vanish on Schwarzschild") {
  const Spacetime s = build_spacetime("schwarzschild", {}, Strategy::analytic());
  const MetricElResidual r = metric_el_residual(s.metric, s.connection);
  const auto pts = s.frame.chart().sample_points(8, 7);
  CHECK(max_abs(r.e, pts) <= 1e-8);
}

TEST_CASE("metric field equations: trace inversion and contractions") {
  for (std::size_t n : {3u, 4u, 5u}) {
    const Chart c = unit_box_chart(n);
    const Frame f = Frame::coordinate(c);
    const MetricField g = random_metric(n, 50 + n);
    const ConnectionField conn = random_connection(f, 60 + n);
    const MetricElResidual r = metric_el_residual(g, conn);
    const auto pts = c.sample_points(5, n);
    CHECK(max_abs(r.trace_inversion_defect, pts) <= 1e-10);
    CHECK(max_abs(r.e, pts) > 1e-3);

    // g^{ab} E_ab = (1 - n/2) g^{ab}(R_ab + T_a T_b)
    const TensorField ginv = g.inverse();
    const std::vector<TensorField> gens{ginv.relabeled("g^-1")};
    const TensorField proj = constrained_metric_el_residual(g, conn, gens)[0];
    const TensorField reduced = r.reduced;
    const double factor = 1.0 - 0.5 * static_cast<double>(n);
    const TensorField expect = TensorField::make(n, {}, "trace", [ginv, reduced, n, factor](auto x) {
      using S = scalar_of<decltype(x)>;
      const auto gi = ginv(x);
      const auto rr = reduced(x);
      S s(0.0);
      for (std::size_t k = 0; k < n * n; ++k) s += gi[k] * rr[k];
      return std::vector<S>{s * factor};
    });
    CHECK(max_diff(proj, expect, pts) <= 1e-10);
  }
}

TEST_CASE("constrained residuals on the full basis reproduce every component") {
  const std::size_t n = 4;
  const Chart c = unit_box_chart(n);
  const Frame f = random_frame(c, 70);
  const MetricField g = random_metric(n, 71);
  const ConnectionField conn = random_connection(f, 72);
  std::vector<TensorField> gens;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      std::vector<double> v(n * n, 0.0);
      v[a * n + b] += 0.5;
      v[b * n + a] += 0.5;
      gens.push_back(TensorField::constant(n, {Slot::up, Slot::up}, v, "d" + std::to_string(a) + std::to_string(b)));
    }
  const auto proj = constrained_metric_el_residual(g, conn, gens);
  const TensorField e = metric_el_residual(g, conn).e;
  for (const auto& p : c.sample_points(4, 8)) {
    const auto ev = e.at(p);
    std::size_t k = 0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) {
        CHECK(proj[k++].at(p)[0] == doctest::Approx(0.5 * (ev[a * n + b] + ev[b * n + a])).epsilon(1e-12));
      }
  }
  const std::vector<TensorField> bad{TensorField::zero(n, {Slot::down, Slot::down})};
  try {
    constrained_metric_el_residual(g, conn, bad);
    FAIL("expected GeneratorShapeMismatch");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::GeneratorShapeMismatch);
  }
}

TEST_CASE("metric field equations agree with a finite-difference gradient") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Chart c = unit_box_chart(4);
    const Frame f = Frame::coordinate(c);
    const MetricField g = random_metric(4, 80 + seed);
    const ConnectionField conn = random_connection(f, 90 + seed);
    for (const auto& p : c.sample_points(3, seed)) {
      const GradientCheck chk = metric_gradient_check(g, conn, p);
      CHECK(chk.relative <= 1e-4);
      CHECK(chk.max_abs_value > 1e-3);
    }
  }
}

TEST_CASE("connection operator: trace identity and symmetry") {
  for (std::size_t n : {3u, 4u, 5u}) {
    const auto gv = lorentz_sample(n, 100 + n);
    const auto gi = mag::inverse<double>(gv, n);
    const auto nv = random_values(n * n * n, 200 + n);
    const auto e = connection_el_apply(gv, gi, n, nv);
    const std::size_t nn = n * n;
    std::vector<double> tup(n, 0.0);
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t q = 0; q < n; ++q) {
        double t = 0.0;
        for (std::size_t p = 0; p < n; ++p) t += nv[p * nn + p * n + q] - nv[p * nn + q * n + p];
        tup[b] += gi[b * n + q] * t;
      }
    for (std::size_t b = 0; b < n; ++b) {
      double s = 0.0;
      for (std::size_t a = 0; a < n; ++a) s += e[a * nn + b * n + a];
      CHECK(std::abs(s + 2.0 * (static_cast<double>(n) - 1.0) * tup[b]) <= 1e-12);
    }
    const ConnectionElOperator op = connection_el_assemble(gv, n);
    CHECK((op.matrix - op.matrix.transpose()).cwiseAbs().maxCoeff() <= 1e-12);

    // E is the gradient of the quadratic form.
    const double eps = 1e-5;
    double worst = 0.0;
    for (std::size_t k = 0; k < nv.size(); ++k) {
      auto p = nv, m = nv;
      p[k] += eps;
      m[k] -= eps;
      const double fd =
          (connection_quadratic_form(gi, n, p) - connection_quadratic_form(gi, n, m)) / (2 * eps);
      worst = std::max(worst, std::abs(fd - e[k]));
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("connection operator lowered relation for torsion-free displacement") {
  const std::size_t n = 4;
  const std::size_t nn = n * n;
  const auto gv = lorentz_sample(n, 300);
  const auto gi = mag::inverse<double>(gv, n);
  auto nv = random_values(n * nn, 301);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c) {
        const double s = 0.5 * (nv[a * nn + b * n + c] + nv[a * nn + c * n + b]);
        nv[a * nn + b * n + c] = s;
        nv[a * nn + c * n + b] = s;
      }
  const auto e = connection_el_apply(gv, gi, n, nv);
  // N_cab = g_cd N^d_ab, X_c = N^p_pc, Y_c = g^rs N_crs.
  std::vector<double> nl(n * nn, 0.0), x(n, 0.0), y(n, 0.0);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t d = 0; d < n; ++d) nl[c * nn + a * n + b] += gv[c * n + d] * nv[d * nn + a * n + b];
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t p = 0; p < n; ++p) x[c] += nv[p * nn + p * n + c];
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t s = 0; s < n; ++s) y[a] += nl[a * nn + r * n + s] * gi[s * n + r];
  // E_{a}^{bc} lowered on b and c.
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        double low = 0.0;
        for (std::size_t p = 0; p < n; ++p)
          for (std::size_t q = 0; q < n; ++q) low += e[a * nn + p * n + q] * gv[p * n + b] * gv[q * n + c];
        const double expect = -(nl[c * nn + a * n + b] + nl[b * nn + c * n + a] - gv[a * n + b] * y[c] -
                                gv[b * n + c] * x[a]);
        CHECK(std::abs(low - expect) <= 1e-12);
      }
}

TEST_CASE("connection operator has a trivial kernel in dimensions 3 to 5") {
  for (std::size_t n : {3u, 4u, 5u}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const ConnectionElOperator op = connection_el_assemble(lorentz_sample(n, 400 + 10 * n + seed), n);
      const KernelReport k = connection_el_kernel(op);
      CHECK(k.kernel_dim == 0);
      CHECK(k.ratio > 1e-6);
    }
  }
  const Spacetime mink = build_spacetime("minkowski", {}, Strategy::analytic());
  const KernelReport km = connection_el_kernel(connection_el_assemble(mink.metric, std::vector<double>(4, 0.0)));
  CHECK(km.kernel_dim == 0);
}

TEST_CASE("connection operator in two dimensions is reported") {
  const KernelReport k = connection_el_kernel(connection_el_assemble(lorentz_sample(2, 500), 2));
  MESSAGE("n=2 kernel dimension " << k.kernel_dim << ", ratio " << k.ratio);
  CHECK(k.kernel_dim <= 8);
}

TEST_CASE("kernel classification refuses ambiguous singular values") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
  m(3, 3) = 2e-8;
  try {
    connection_el_kernel(m);
    FAIL("expected NumericalRankAmbiguity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NumericalRankAmbiguity);
  }
  m(3, 3) = 1e-14;
  CHECK(connection_el_kernel(m).kernel_dim == 1);
}

TEST_CASE("symmetric displacement basis is orthonormal and Palatini operator is reduced") {
  const std::size_t n = 4;
  const Eigen::MatrixXd b = symmetric_displacement_basis(n);
  CHECK(b.cols() == static_cast<Eigen::Index>(n * n * (n + 1) / 2));
  CHECK((b.transpose() * b - Eigen::MatrixXd::Identity(b.cols(), b.cols())).cwiseAbs().maxCoeff() <= 1e-14);
  const ConnectionElOperator op = connection_el_assemble(lorentz_sample(n, 600), n);
  const Eigen::MatrixXd p = palatini_operator(op);
  CHECK(p.rows() == b.cols());
  CHECK((p - p.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  MESSAGE("Palatini kernel dimension " << connection_el_kernel(p).kernel_dim);
}

TEST_CASE("closed-form displacement solves the lowered relation and its traces") {
  for (std::size_t n : {3u, 4u, 5u}) {
    const auto gv = lorentz_sample(n, 700 + n);
    const auto x = random_values(n, 710 + n);
    const auto y = random_values(n, 720 + n);
    const ClosedFormCheck chk = closed_form_solution_check(gv, n, x, y);
    CHECK(chk.relation <= 1e-12);
    CHECK(chk.trace_chain <= 1e-12);
    CHECK(chk.torsion_trace <= 1e-12);
  }
}
