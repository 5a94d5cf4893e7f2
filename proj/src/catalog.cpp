#include "mag/catalog.hpp"

#include <cmath>
#include <numbers>

#include "mag/error.hpp"
#include "mag/metric_geometry.hpp"
#include "mag/random_fields.hpp"

namespace mag {

namespace {

constexpr double kPi = std::numbers::pi;

const CatalogEntry* find_entry(const std::string& name) {
  for (const auto& e : catalog_list())
    if (e.name == name) return &e;
  return nullptr;
}

ParamMap resolve(const CatalogEntry& e, const ParamMap& given) {
  ParamMap out;
  for (const auto& p : e.parameters) out[p.name] = p.default_value;
  for (const auto& [k, v] : given) {
    if (!out.count(k)) {
      throw Error(ErrorCode::ConfigParseError, "catalog entry '" + e.name + "' has no parameter '" + k + "'");
    }
    out[k] = v;
  }
  return out;
}

std::uint64_t as_seed(double v) {
  if (v < 0 || v != std::floor(v)) throw Error(ErrorCode::ConfigParseError, "seed must be a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

double horizon(double m, double q) {
  if (!(m > 0.0)) throw Error(ErrorCode::ConfigParseError, "mass must be positive");
  if (std::abs(q) >= m) throw Error(ErrorCode::ConfigParseError, "charge must satisfy |Q| < M");
  return m + std::sqrt(m * m - q * q);
}

Chart base_box(Strategy st) {
  return make_chart(4, {"t", "x", "y", "z"}, std::vector<Interval>(4, Interval{-1.0, 1.0}), st);
}

TensorField zero_scalar() { return TensorField::zero(4, {}, "psi0"); }

Spacetime metric_spacetime(std::string name, std::string kind, ParamMap params, const Chart& chart,
                           MetricField g) {
  Spacetime s;
  s.name = std::move(name);
  s.kind = std::move(kind);
  s.params = std::move(params);
  s.frame = Frame::coordinate(chart);
  s.metric = MetricField(g.g().on_frame(s.frame.id()), g.signature());
  s.connection = levi_civita(s.metric, s.frame);
  return s;
}

}  // namespace

const std::vector<CatalogEntry>& catalog_list() {
  static const std::vector<CatalogEntry> entries = {
      {"minkowski", "metric", "flat spacetime, Cartesian coordinates (t,x,y,z)", {}, "[-1,1]^4"},
      {"sphere2", "metric", "unit 2-sphere (theta, phi)", {}, "theta in (0.3, pi-0.3), phi in (0, 2pi)"},
      {"schwarzschild", "metric", "Schwarzschild, G=c=1, coordinates (t,r,theta,phi)",
       {{"M", 1.0, "mass"}}, "r > 2M+0.5"},
      {"reissner-nordstrom", "metric", "Reissner-Nordstrom metric, geometrized charge Q",
       {{"M", 1.0, "mass"}, {"Q", 0.3, "charge, |Q| < M"}}, "r > r_+ + 0.5"},
      {"random-analytic", "connection",
       "seeded random metric (eta + perturbation) and torsionful connection",
       {{"seed", 0.0, "generator seed (defaults to the scenario seed)"},
        {"dim", 4.0, "dimension 2..5"},
        {"anholonomic", 0.0, "1 = express fields in a random anholonomic frame"}},
       "[-1,1]^n"},
      {"kaluza-flat", "kaluza", "Minkowski base, gamma = 0", {}, "u in (-1,1), [-1,1]^4"},
      {"kaluza-uniform-B", "kaluza", "Minkowski base, gamma = (B/2)(-y dx + x dy)",
       {{"B", 0.5, "field strength parameter"}}, "u in (-1,1), [-1,1]^4"},
      {"kaluza-reissner-nordstrom", "kaluza",
       "Reissner-Nordstrom base with gamma_t = 2Q/r (Omega_tr = Q/r^2)",
       {{"M", 1.0, "mass"}, {"Q", 0.3, "charge, |Q| < M"}}, "u in (-1,1), r > r_+ + 0.5"},
      {"kaluza-random", "kaluza", "random base metric, gamma and gauge section",
       {{"seed", 0.0, "generator seed (defaults to the scenario seed)"}}, "u in (-1,1), [-1,1]^4"},
  };
  return entries;
}

MetricField minkowski_metric(std::size_t dim) {
  std::vector<double> v(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) v[i * dim + i] = i == 0 ? -1.0 : 1.0;
  return MetricField(TensorField::constant(dim, {Slot::down, Slot::down}, v, "eta"),
                     Signature{static_cast<int>(dim) - 1, 1});
}

MetricField sphere_metric() {
  TensorField g = TensorField::make(2, {Slot::down, Slot::down}, "g_S2", [](auto x) {
    using S = scalar_of<decltype(x)>;
    using std::sin;
    const S s = sin(x[0]);
    return std::vector<S>{S(1.0), S(0.0), S(0.0), s * s};
  });
  return MetricField(std::move(g), Signature{2, 0});
}

MetricField reissner_nordstrom_metric(double mass, double charge) {
  TensorField g = TensorField::make(
      4, {Slot::down, Slot::down}, charge == 0.0 ? "g_schw" : "g_RN", [mass, charge](auto x) {
        using S = scalar_of<decltype(x)>;
        using std::sin;
        const S& r = x[1];
        const S f = S(1.0) - S(2.0 * mass) / r + S(charge * charge) / (r * r);
        const S st = sin(x[2]);
        std::vector<S> g(16, S(0.0));
        g[0] = -f;
        g[5] = S(1.0) / f;
        g[10] = r * r;
        g[15] = r * r * st * st;
        return g;
      });
  return MetricField(std::move(g), Signature{3, 1});
}

Chart spherical_chart(double r_min, double r_max, Strategy strategy) {
  return make_chart(4, {"t", "r", "theta", "phi"},
                    {{-1.0, 1.0}, {r_min, r_max}, {0.3, kPi - 0.3}, {0.0, 2.0 * kPi}}, strategy);
}

KaluzaConfiguration build_kaluza(const std::string& name, const ParamMap& given, Strategy st) {
  const CatalogEntry* e = find_entry(name);
  if (e == nullptr || e->kind != "kaluza") {
    throw Error(ErrorCode::CatalogMiss, "no Kaluza catalog entry named '" + name + "'");
  }
  const ParamMap p = resolve(*e, given);
  KaluzaConfiguration c;
  c.label = name;
  c.psi = zero_scalar();
  if (name == "kaluza-flat") {
    c.base_chart = base_box(st);
    c.base_metric = minkowski_metric(4);
    c.gamma = TensorField::zero(4, {Slot::down}, "gamma0");
  } else if (name == "kaluza-uniform-B") {
    const double b = p.at("B");
    c.base_chart = base_box(st);
    c.base_metric = minkowski_metric(4);
    c.gamma = TensorField::make(4, {Slot::down}, "gamma_B", [b](auto x) {
      using S = scalar_of<decltype(x)>;
      return std::vector<S>{S(0.0), x[2] * (-0.5 * b), x[1] * (0.5 * b), S(0.0)};
    });
  } else if (name == "kaluza-reissner-nordstrom") {
    const double m = p.at("M");
    const double q = p.at("Q");
    const double rp = horizon(m, q);
    c.base_chart = spherical_chart(rp + 0.5, rp + 10.5, st);
    c.base_metric = reissner_nordstrom_metric(m, q);
    c.gamma = TensorField::make(4, {Slot::down}, "gamma_RN", [q](auto x) {
      using S = scalar_of<decltype(x)>;
      return std::vector<S>{S(2.0 * q) / x[1], S(0.0), S(0.0), S(0.0)};
    });
  } else {
    const std::uint64_t seed = as_seed(p.at("seed"));
    c.base_chart = base_box(st);
    c.base_metric = random_metric(4, seed);
    c.gamma = random_tensor(4, {Slot::down}, seed ^ 0x6A7ULL, 0.3, "gamma_rand");
    c.psi = random_tensor(4, {}, seed ^ 0x951ULL, 0.5, "psi_rand");
  }
  return c;
}

Spacetime build_spacetime(const std::string& name, const ParamMap& given, Strategy st) {
  const CatalogEntry* e = find_entry(name);
  if (e == nullptr) throw Error(ErrorCode::CatalogMiss, "no catalog entry named '" + name + "'");
  const ParamMap p = resolve(*e, given);
  if (name == "minkowski") return metric_spacetime(name, e->kind, p, base_box(st), minkowski_metric(4));
  if (name == "sphere2") {
    return metric_spacetime(name, e->kind, p,
                            make_chart(2, {"theta", "phi"}, {{0.3, kPi - 0.3}, {0.0, 2.0 * kPi}}, st),
                            sphere_metric());
  }
  if (name == "schwarzschild" || name == "reissner-nordstrom") {
    const double m = p.at("M");
    const double q = name == "schwarzschild" ? 0.0 : p.at("Q");
    const double rp = horizon(m, q);
    return metric_spacetime(name, e->kind, p, spherical_chart(rp + 0.5, rp + 10.5, st),
                            reissner_nordstrom_metric(m, q));
  }
  if (name == "random-analytic") {
    const std::uint64_t seed = as_seed(p.at("seed"));
    const double dimv = p.at("dim");
    if (dimv < 2 || dimv > 5 || dimv != std::floor(dimv)) {
      throw Error(ErrorCode::ConfigParseError, "dim must be an integer in [2, 5]");
    }
    const auto dim = static_cast<std::size_t>(dimv);
    const Chart chart = unit_box_chart(dim, st);
    Spacetime s;
    s.name = name;
    s.kind = e->kind;
    s.params = p;
    s.frame = p.at("anholonomic") != 0.0 ? random_frame(chart, seed) : Frame::coordinate(chart);
    const MetricField g = random_metric(dim, seed);
    s.metric = MetricField(g.g().on_frame(s.frame.id()), g.signature());
    s.connection = random_connection(s.frame, seed);
    return s;
  }
  const KaluzaConfiguration c = build_kaluza(name, given, st);
  const KaluzaLift lift = assemble(c);
  Spacetime s;
  s.name = name;
  s.kind = e->kind;
  s.params = p;
  s.frame = lift.frame;
  s.metric = lift.metric;
  s.connection = lift.levi_civita;
  s.kaluza = c;
  return s;
}

}  // namespace mag
