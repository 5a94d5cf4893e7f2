#include <cmath>

#include "doctest.h"
#include "mag/affine_connection.hpp"
#include "mag/catalog.hpp"
#include "mag/kaluza.hpp"
#include "mag/metric_geometry.hpp"
#include "mag/random_fields.hpp"
#include "mag/tensor_ops.hpp"
#include "mag/variational.hpp"
#include "support.hpp"

using namespace mag;
using testing::max_abs;
using testing::max_diff;

namespace {

std::vector<KaluzaConfiguration> sample_configs() {
  std::vector<KaluzaConfiguration> out;
  out.push_back(build_kaluza("kaluza-uniform-B", {{"B", 0.5}}));
  out.push_back(build_kaluza("kaluza-reissner-nordstrom", {{"M", 1.0}, {"Q", 0.3}}));
  for (double seed = 0; seed < 3; ++seed) out.push_back(build_kaluza("kaluza-random", {{"seed", seed}}));
  return out;
}

}  // namespace

TEST_CASE("lift frame holonomy is minus twice the field strength 2-form") {
  for (const auto& cfg : sample_configs()) {
    const KaluzaLift lift = assemble(cfg);
    const TensorField c = frame_holonomy(lift.frame);
    const TensorField c0 = slice_to_base(c, {false, true, true}, {Slot::down, Slot::down});
    const auto pts = cfg.base_chart.sample_points(5, 1);
    CHECK(max_diff(c0, scale(em_fields(cfg).omega, -2.0), pts) <= 1e-12);
    for (const auto& p : lift.frame.chart().sample_points(3, 2)) {
      const auto cv = c.at(p);
      for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
          for (std::size_t k = 0; k < 5; ++k)
            if (i != 0 || j == 0 || k == 0) CHECK(cv[flat_index(5, {i, j, k})] == 0.0);
    }
  }
}

TEST_CASE("lift metric: determinant, volume form and fiber component") {
  for (const auto& cfg : sample_configs()) {
    const KaluzaLift lift = assemble(cfg);
    for (const auto& p : lift.frame.chart().sample_points(4, 3)) {
      const std::vector<double> x(p.begin() + 1, p.end());
      CHECK(lift.coordinate_metric.determinant().at(p)[0] ==
            doctest::Approx(cfg.base_metric.determinant().at(x)[0]).epsilon(1e-12));
      CHECK(lift.metric.inverse().at(p)[0] == doctest::Approx(1.0).epsilon(1e-14));
      // w^0 ^ pi*(eps) has the single coordinate component w^0_u * eps_0123 = eps_0123.
      CHECK(lift.coordinate_metric.volume_density().at(p)[0] ==
            doctest::Approx(cfg.base_metric.volume_density().at(x)[0]).epsilon(1e-12));
    }
    CHECK(lift.metric.signature() == Signature{4, 1});
  }
}

TEST_CASE("closed-form lift connection matches the generic Koszul result") {
  for (const auto& cfg : sample_configs()) {
    const KaluzaLift lift = assemble(cfg);
    const auto pts = lift.frame.chart().sample_points(5, 4);
    CHECK(max_diff(hat_connection_forms(cfg).coefficients, lift.levi_civita.coefficients, pts) <= 1e-9);
    CHECK(max_abs(metricity_residual(lift.metric, lift.levi_civita), pts) <= 1e-9);
  }
}

TEST_CASE("closed-form lift curvature matches the generic computation") {
  auto configs = sample_configs();
  for (double seed = 3; seed < 10; ++seed) configs.push_back(build_kaluza("kaluza-random", {{"seed", seed}}));
  for (const auto& cfg : configs) {
    const KaluzaLift lift = assemble(cfg);
    const CurvatureSuite cs = curvature_suite(lift.levi_civita);
    const auto pts = lift.frame.chart().sample_points(2, 5);
    CHECK(max_diff(hat_ricci(cfg), cs.ricci, pts) <= 1e-7);
    CHECK(max_diff(hat_riemann(cfg), cs.riemann, pts) <= 1e-7);
  }
}

TEST_CASE("lift geometry does not depend on the fiber coordinate") {
  const KaluzaConfiguration cfg = build_kaluza("kaluza-random", {{"seed", 4.0}});
  const KaluzaLift lift = assemble(cfg);
  const TensorField ric = curvature_suite(lift.levi_civita).ricci;
  for (auto p : lift.frame.chart().sample_points(3, 6)) {
    p[0] = -0.6;
    const auto a = ric.at(p);
    p[0] = 0.7;
    const auto b = ric.at(p);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-12);
  }
  CHECK(lift.levi_civita.u_invariant);
}

TEST_CASE("charged black hole lift satisfies the reduced field equations") {
  const KaluzaConfiguration cfg = build_kaluza("kaluza-reissner-nordstrom", {{"M", 1.0}, {"Q", 0.3}});
  const auto pts = cfg.base_chart.sample_points(6, 7);
  const LiftFieldResiduals p = lift_field_residuals(cfg);
  CHECK(max_abs(p.eq_b, pts) <= 1e-7);
  CHECK(max_abs(p.eq_c, pts) <= 1e-7);
  const EinsteinMaxwellResiduals em = einstein_maxwell_residuals(cfg);
  CHECK(max_abs(em.maxwell, pts) <= 1e-7);
  CHECK(max_abs(em.einstein, pts) <= 1e-7);

  KaluzaConfiguration wrong = cfg;
  wrong.kappa *= 1.1;
  CHECK(max_abs(einstein_maxwell_residuals(wrong).einstein, pts) > 1e-4);
}

TEST_CASE("uniform magnetic field strength") {
  const double b = 0.5;
  const KaluzaConfiguration cfg = build_kaluza("kaluza-uniform-B", {{"B", b}});
  const auto f = em_fields(cfg).f.at(std::vector<double>{0.1, 0.2, -0.3, 0.4});
  CHECK(f[flat_index(4, {1, 2})] == doctest::Approx(b / (2.0 * cfg.kappa)).epsilon(1e-14));
  CHECK(f[flat_index(4, {2, 1})] == doctest::Approx(-b / (2.0 * cfg.kappa)).epsilon(1e-14));
}

TEST_CASE("reduced action equals the lifted scalar curvature") {
  for (const auto& cfg : sample_configs()) {
    const ReducedAction ra = reduced_action_density(cfg);
    CHECK(max_diff(ra.lifted, ra.reduced, cfg.base_chart.sample_points(4, 8)) <= 1e-7);
  }
}

TEST_CASE("five-dimensional equations reproduce Einstein-Maxwell on random configurations") {
  for (double seed = 0; seed < 20; ++seed) {
    const KaluzaConfiguration cfg = build_kaluza("kaluza-random", {{"seed", seed}});
    const auto pts = cfg.base_chart.sample_points(2, 9);
    const LiftFieldResiduals p = lift_field_residuals(cfg);
    const EinsteinMaxwellResiduals em = einstein_maxwell_residuals(cfg);
    CHECK(max_diff(p.eq_c, em.einstein, pts) <= 1e-7);
    CHECK(max_diff(p.eq_b, scale(em.maxwell, cfg.kappa), pts) <= 1e-7);
    CHECK(max_abs(em.einstein, pts) > 1e-4);
  }
}

TEST_CASE("field strength is closed and gauge invariant") {
  const KaluzaConfiguration cfg = build_kaluza("kaluza-random", {{"seed", 11.0}});
  const TensorField f = em_fields(cfg).f;
  const auto pts = cfg.base_chart.sample_points(5, 10);
  for (const auto& p : pts) {
    const auto df = partials<double>(f, Strategy::analytic(), p);  // df[k][i][j]
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t k = 0; k < 4; ++k) {
          const double cyc = df[k * 16 + i * 4 + j] + df[i * 16 + j * 4 + k] + df[j * 16 + k * 4 + i];
          CHECK(std::abs(cyc) <= 1e-12);
        }
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TensorField lambda = random_tensor(4, {}, 500 + seed, 0.7);
    const KaluzaConfiguration t = gauge_transform(cfg, lambda);
    const EmFields a = em_fields(cfg);
    const EmFields b = em_fields(t);
    CHECK(max_diff(a.f, b.f, pts) <= 1e-9);
    CHECK(max_diff(a.a, b.a, pts) <= 1e-9);
    CHECK(max_diff(einstein_maxwell_residuals(cfg).maxwell, einstein_maxwell_residuals(t).maxwell, pts) <= 1e-9);
    CHECK(max_diff(reduced_action_density(cfg).reduced, reduced_action_density(t).reduced, pts) <= 1e-9);
  }

  KaluzaConfiguration pure = build_kaluza("kaluza-flat", {});
  pure = gauge_transform(pure, random_tensor(4, {}, 600, 0.7));
  CHECK(max_abs(em_fields(pure).f, pts) <= 1e-12);
  CHECK(max_abs(em_fields(pure).omega, pts) <= 1e-12);
}

TEST_CASE("constrained deformations project the lifted field equations") {
  const KaluzaConfiguration cfg = build_kaluza("kaluza-random", {{"seed", 2.0}});
  const KaluzaLift lift = assemble(cfg);
  const auto gens = deformation_basis(cfg);
  REQUIRE(gens.size() == 14);
  const auto proj = constrained_metric_el_residual(lift.metric, lift.levi_civita, gens);
  const TensorField e = metric_el_residual(lift.metric, lift.levi_civita).e;
  const TensorField ric = curvature_suite(lift.levi_civita).ricci;
  const TensorField ginv = lift.metric.inverse();
  for (const auto& p : lift.frame.chart().sample_points(2, 11)) {
    const auto ev = e.at(p);
    const auto rv = ric.at(p);
    const auto gi = ginv.at(p);
    std::size_t k = 0;
    for (std::size_t i = 1; i < 5; ++i)
      for (std::size_t j = i; j < 5; ++j) {
        CHECK(proj[k++].at(p)[0] == doctest::Approx(ev[i * 5 + j]).epsilon(1e-10));
      }
    for (std::size_t m = 1; m < 5; ++m) {
      double expect = 0.0;
      for (std::size_t j = 1; j < 5; ++j) expect -= 2.0 * gi[m * 5 + j] * rv[j];
      CHECK(proj[k++].at(p)[0] == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}
