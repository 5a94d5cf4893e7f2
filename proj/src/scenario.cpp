#include "mag/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mag/affine_connection.hpp"
#include "mag/kaluza.hpp"
#include "mag/lie_connection.hpp"
#include "mag/metric_geometry.hpp"
#include "mag/random_fields.hpp"
#include "mag/variational.hpp"
#include "mag/version.hpp"

namespace mag {

using json = nlohmann::json;

namespace {

double max_diff(const TensorField& a, const TensorField& b, std::span<const std::vector<double>> pts) {
  double worst = 0.0;
  for (const auto& p : pts) {
    const auto va = a.at(p);
    const auto vb = b.at(p);
    for (std::size_t i = 0; i < va.size(); ++i) worst = std::max(worst, std::abs(va[i] - vb[i]));
  }
  return worst;
}

std::vector<std::vector<double>> head(const std::vector<std::vector<double>>& pts, std::size_t k) {
  return {pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(std::min(k, pts.size()))};
}

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ConfigParseError, what); }

struct Context {
  const Scenario& sc;
  const Spacetime& st;
  std::optional<KaluzaConfiguration> kaluza;
  std::vector<std::vector<double>> pts;       // points of the entry chart
  std::vector<std::vector<double>> base_pts;  // Kaluza base points
};

using CheckFn = std::function<double(const Context&, std::map<std::string, double>&)>;

std::vector<double> random_sample(std::size_t count, std::uint64_t seed, double amp) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-amp, amp);
  std::vector<double> v(count);
  for (double& x : v) x = uni(rng);
  return v;
}

double identity_2_11(const Context& c, std::map<std::string, double>&) {
  return max_abs(decomposition_defect(action_density(c.st.metric, c.st.connection), c.sc.controls.divergence_sign),
                 c.pts);
}

double el_metric(const Context& c, std::map<std::string, double>&) {
  return max_abs(metric_el_residual(c.st.metric, c.st.connection).e, c.pts);
}

double structure_eqs(const Context& c, std::map<std::string, double>& d) {
  const StructureResiduals r = structure_equation_residuals(c.st.connection);
  d["first"] = max_abs(r.first, c.pts);
  d["second"] = max_abs(r.second, c.pts);
  return std::max(d["first"], d["second"]);
}

double el_connection_kernel(const Context& c, std::map<std::string, double>& d) {
  const std::size_t n = c.st.metric.dim();
  const std::size_t nn = n * n;
  double worst_dim = 0.0;
  double min_ratio = std::numeric_limits<double>::infinity();
  double trace_identity = 0.0;
  double closed_form = 0.0;
  std::uint64_t k = 0;
  for (const auto& p : head(c.pts, 10)) {
    const ConnectionElOperator op = connection_el_assemble(c.st.metric, p);
    const KernelReport rep = connection_el_kernel(op);
    worst_dim = std::max(worst_dim, static_cast<double>(rep.kernel_dim));
    min_ratio = std::min(min_ratio, rep.ratio);
    const auto nv = random_sample(n * nn, c.sc.seed * 7919 + k, 1.0);
    const auto e = connection_el_apply(op.g, op.ginv, n, nv);
    for (std::size_t b = 0; b < n; ++b) {
      double s = 0.0, t = 0.0;
      for (std::size_t a = 0; a < n; ++a) s += e[a * nn + b * n + a];
      for (std::size_t q = 0; q < n; ++q) {
        double tq = 0.0;
        for (std::size_t pp = 0; pp < n; ++pp) tq += nv[pp * nn + pp * n + q] - nv[pp * nn + q * n + pp];
        t += op.ginv[b * n + q] * tq;
      }
      trace_identity = std::max(trace_identity, std::abs(s + 2.0 * (static_cast<double>(n) - 1.0) * t));
    }
    const auto x = random_sample(n, c.sc.seed * 7919 + k + 1000003, 1.0);
    const auto y = random_sample(n, c.sc.seed * 7919 + k + 2000003, 1.0);
    const ClosedFormCheck cf = closed_form_solution_check(op.g, n, x, y);
    closed_form = std::max({closed_form, cf.relation, cf.trace_chain, cf.torsion_trace});
    ++k;
  }
  d["min_singular_ratio"] = min_ratio;
  d["trace_identity"] = trace_identity;
  d["closed_form"] = closed_form;
  return worst_dim;
}

double palatini_mode(const Context& c, std::map<std::string, double>& d) {
  double worst_dim = 0.0;
  for (const auto& p : head(c.pts, 10)) {
    const KernelReport rep = connection_el_kernel(palatini_operator(connection_el_assemble(c.st.metric, p)));
    worst_dim = std::max(worst_dim, static_cast<double>(rep.kernel_dim));
  }
  const ConnectionField lc = levi_civita(c.st.metric, c.st.frame);
  d["einstein_residual"] = max_abs(metric_el_residual(c.st.metric, lc).e, c.pts);
  return worst_dim;
}

double metric_mode(const Context& c, std::map<std::string, double>& d) {
  const ConnectionField lc = levi_civita(c.st.metric, c.st.frame);
  const ActionDensityPair a = action_density(c.st.metric, lc);
  const TensorField r = *curvature_suite(lc, &c.st.metric).scalar;
  const TensorField vol = c.st.metric.volume_density();
  double reduction = 0.0;
  for (const auto& p : c.pts) {
    reduction = std::max(reduction, std::abs(a.direct.at(p)[0] - r.at(p)[0] * vol.at(p)[0]));
  }
  d["action_reduction"] = reduction;
  return max_abs(metric_el_residual(c.st.metric, lc).e, c.pts);
}

double lie_a7(const Context& c, std::map<std::string, double>& d) {
  const Chart& chart = c.st.frame.chart();
  double width = std::numeric_limits<double>::infinity();
  for (const auto& iv : chart.domain()) width = std::min(width, iv.hi - iv.lo);
  const auto pts = chart.sample_points(std::min<std::size_t>(c.sc.points, 5), c.sc.seed,
                                       std::max(chart.sample_margin(), 0.05 * width));
  // Random polynomial field in box-normalized coordinates, scaled to the box.
  const TensorField r = random_vector(chart.dim(), c.sc.seed + 17);
  std::vector<double> mid, half;
  for (const auto& iv : chart.domain()) {
    mid.push_back(0.5 * (iv.lo + iv.hi));
    half.push_back(0.5 * (iv.hi - iv.lo));
  }
  const TensorField x = TensorField::make(
      chart.dim(), {Slot::up}, "X",
      [r, mid, half](auto p) {
        using S = scalar_of<decltype(p)>;
        std::vector<S> xi(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) xi[i] = (p[i] - mid[i]) / half[i];
        std::vector<S> v = r(std::span<const S>(xi));
        for (std::size_t i = 0; i < v.size(); ++i) v[i] *= half[i];
        return v;
      },
      c.st.frame.id());
  const TensorField l = to_coordinates(lie_derivative(c.st.connection, x), c.st.frame);
  double worst = 0.0, spread = 0.0;
  for (const auto& p : pts) {
    const FlowOracleResult r = lie_derivative_flow(c.st.connection, x, p);
    const auto v = l.at(p);
    for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(v[i] - r.value[i]));
    spread = std::max(spread, r.spread);
  }
  d["extrapolation_spread"] = spread;
  return worst;
}

double kaluza_3_15(const Context& c, std::map<std::string, double>& d) {
  const KaluzaLift lift = assemble(*c.kaluza);
  const CurvatureSuite cs = curvature_suite(lift.levi_civita);
  d["ricci"] = max_diff(hat_ricci(*c.kaluza), cs.ricci, c.pts);
  d["riemann"] = max_diff(hat_riemann(*c.kaluza), cs.riemann, c.pts);
  return std::max(d["ricci"], d["riemann"]);
}

double fiber_maxwell(const Context& c, std::map<std::string, double>& d) {
  const LiftFieldResiduals r = lift_field_residuals(*c.kaluza);
  d["fiber_mixed"] = max_abs(r.eq_b, c.base_pts);
  d["base"] = max_abs(r.eq_c, c.base_pts);
  return std::max(d["fiber_mixed"], d["base"]);
}

double einstein_maxwell(const Context& c, std::map<std::string, double>& d) {
  const EinsteinMaxwellResiduals r = einstein_maxwell_residuals(*c.kaluza);
  d["maxwell"] = max_abs(r.maxwell, c.base_pts);
  d["einstein"] = max_abs(r.einstein, c.base_pts);
  return std::max(d["maxwell"], d["einstein"]);
}

double reduced_action(const Context& c, std::map<std::string, double>&) {
  const ReducedAction r = reduced_action_density(*c.kaluza);
  return max_diff(r.lifted, r.reduced, c.base_pts);
}

/// Every Kaluza residual field, in a fixed order.
std::vector<std::pair<TensorField, bool>> kaluza_residual_fields(const KaluzaConfiguration& cfg) {
  const KaluzaLift lift = assemble(cfg);
  const CurvatureSuite cs = curvature_suite(lift.levi_civita);
  const LiftFieldResiduals p = lift_field_residuals(cfg);
  const EinsteinMaxwellResiduals em = einstein_maxwell_residuals(cfg);
  const ReducedAction ra = reduced_action_density(cfg);
  const EmFields f = em_fields(cfg);
  return {{hat_ricci(cfg), true},  {hat_riemann(cfg), true}, {cs.ricci, true},   {p.eq_b, false},
          {p.eq_c, false},         {em.maxwell, false},      {em.einstein, false}, {ra.lifted, false},
          {ra.reduced, false},     {f.f, false},             {f.a, false}};
}

double gauge_invariance(const Context& c, std::map<std::string, double>& d) {
  const auto lift_pts = head(c.pts, 10);
  const auto base_pts = head(c.base_pts, 10);
  const auto ref = kaluza_residual_fields(*c.kaluza);
  double worst = 0.0;
  for (int k = 0; k < c.sc.controls.gauge_transforms; ++k) {
    const TensorField f = random_tensor(4, {}, c.sc.seed * 1009 + static_cast<std::uint64_t>(k) + 1, 0.5, "gauge");
    const auto moved = kaluza_residual_fields(gauge_transform(*c.kaluza, f));
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const auto& pts = ref[i].second ? lift_pts : base_pts;
      worst = std::max(worst, max_diff(ref[i].first, moved[i].first, pts));
    }
  }
  d["transforms"] = c.sc.controls.gauge_transforms;
  return worst;
}

struct Registered {
  CheckInfo info;
  CheckFn fn;
  double tol_analytic;
  double tol_fd;
  std::size_t point_cap = 0;  // checks that sample only the first few points
};

const std::vector<Registered>& registry() {
  static const std::vector<Registered> r = {
      {{"identity-2-11", "direct minus decomposed action density minus divergence term", false},
       identity_2_11, 1e-8, 1e-5},
      {{"el-metric", "metric Euler-Lagrange residual E_ab", false}, el_metric, 1e-8, 1e-5},
      {{"el-connection-kernel", "kernel dimension of the connection Euler-Lagrange operator", false},
       el_connection_kernel, 0.0, 0.0, 10},
      {{"palatini-mode", "kernel dimension of the operator on torsionless displacements", false},
       palatini_mode, 0.0, 0.0, 10},
      {{"metric-mode", "field equations with the Levi-Civita ansatz imposed", false}, metric_mode, 1e-8, 1e-5},
      {{"structure-eqs", "Cartan structure equation residuals", false}, structure_eqs, 1e-8, 1e-5},
      {{"lie-A7", "covariant Lie derivative of the connection vs flow oracle", false}, lie_a7, 1e-4, 1e-4, 5},
      {{"kaluza-3-15", "closed-form lift curvature vs generic 5D computation", true}, kaluza_3_15, 1e-7, 1e-5},
      {{"fiber-maxwell", "lifted field equations restricted to the base", true}, fiber_maxwell, 1e-7, 1e-5},
      {{"einstein-maxwell", "Maxwell and Einstein residuals of the reduced fields", true}, einstein_maxwell,
       1e-7, 1e-5},
      {{"reduced-action-3-16", "lifted scalar curvature vs reduced action density", true}, reduced_action,
       1e-7, 1e-5},
      {{"gauge-invariance", "drift of every Kaluza residual under random gauge transforms", true},
       gauge_invariance, 1e-9, 1e-9, 10},
  };
  return r;
}

const Registered* find_check(const std::string& id) {
  for (const auto& r : registry())
    if (r.info.id == id) return &r;
  return nullptr;
}

ParamMap with_seed(const CatalogRef& ref, std::uint64_t seed) {
  ParamMap params = ref.params;
  for (const auto& e : catalog_list()) {
    if (e.name != ref.name) continue;
    for (const auto& p : e.parameters)
      if (p.name == "seed" && !params.count("seed")) params["seed"] = static_cast<double>(seed);
  }
  return params;
}

}  // namespace

const std::vector<CheckInfo>& registered_checks() {
  static const std::vector<CheckInfo> out = [] {
    std::vector<CheckInfo> v;
    for (const auto& r : registry()) v.push_back(r.info);
    return v;
  }();
  return out;
}

double default_tolerance(const std::string& check, const Strategy& strategy) {
  const Registered* r = find_check(check);
  if (!r) throw Error(ErrorCode::ConfigParseError, "unknown check id '" + check + "'");
  return strategy.kind == DiffKind::analytic ? r->tol_analytic : r->tol_fd;
}

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_error(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) parse_error("scenario must be a JSON object");
  static const std::set<std::string> known = {"schema_version", "scenario", "catalog", "checks", "strategy",
                                              "tolerances",     "seed",     "points",  "controls"};
  for (const auto& [k, v] : doc.items())
    if (!known.count(k)) parse_error("unknown scenario key '" + k + "'");
  for (const char* req : {"scenario", "catalog", "checks"})
    if (!doc.contains(req)) parse_error(std::string("scenario is missing '") + req + "'");

  Scenario sc;
  try {
    if (doc.contains("schema_version")) {
      sc.schema_version = doc.at("schema_version").get<int>();
      if (sc.schema_version != kSchemaVersion) {
        parse_error("unsupported schema_version " + std::to_string(sc.schema_version));
      }
    }
    sc.name = doc.at("scenario").get<std::string>();
    if (!doc.at("catalog").is_array() || doc.at("catalog").empty()) parse_error("'catalog' must be a non-empty array");
    for (const auto& e : doc.at("catalog")) {
      CatalogRef ref;
      if (e.is_string()) {
        ref.name = e.get<std::string>();
      } else if (e.is_object()) {
        for (const auto& [k, v] : e.items())
          if (k != "name" && k != "params") parse_error("unknown catalog key '" + k + "'");
        ref.name = e.at("name").get<std::string>();
        if (e.contains("params")) {
          if (!e.at("params").is_object()) parse_error("'params' must be an object");
          for (const auto& [k, v] : e.at("params").items()) {
            if (!v.is_number()) parse_error("parameter '" + k + "' must be a number");
            ref.params[k] = v.get<double>();
          }
        }
      } else {
        parse_error("catalog entries must be names or {name, params} objects");
      }
      sc.catalog.push_back(std::move(ref));
    }
    if (!doc.at("checks").is_array() || doc.at("checks").empty()) parse_error("'checks' must be a non-empty array");
    for (const auto& c : doc.at("checks")) {
      const auto id = c.get<std::string>();
      if (!find_check(id)) parse_error("unknown check id '" + id + "'");
      sc.checks.push_back(id);
    }
    if (doc.contains("strategy")) sc.strategy = Strategy::parse(doc.at("strategy").get<std::string>());
    if (doc.contains("seed")) {
      const auto& s = doc.at("seed");
      if (!s.is_number_unsigned()) parse_error("'seed' must be a non-negative integer");
      sc.seed = s.get<std::uint64_t>();
    }
    if (doc.contains("points")) {
      const auto& p = doc.at("points");
      if (!p.is_number_unsigned() || p.get<std::uint64_t>() == 0) parse_error("'points' must be a positive integer");
      sc.points = p.get<std::size_t>();
    }
    if (doc.contains("tolerances")) {
      if (!doc.at("tolerances").is_object()) parse_error("'tolerances' must be an object");
      for (const auto& [k, v] : doc.at("tolerances").items()) {
        if (!find_check(k)) parse_error("tolerance given for unknown check '" + k + "'");
        if (!v.is_number() || v.get<double>() < 0.0) parse_error("tolerance for '" + k + "' must be >= 0");
        sc.tolerances[k] = v.get<double>();
      }
    }
    if (doc.contains("controls")) {
      if (!doc.at("controls").is_object()) parse_error("'controls' must be an object");
      for (const auto& [k, v] : doc.at("controls").items()) {
        if (!v.is_number()) parse_error("control '" + k + "' must be a number");
        if (k == "kappa_scale") {
          sc.controls.kappa_scale = v.get<double>();
          if (!(sc.controls.kappa_scale > 0.0)) parse_error("kappa_scale must be positive");
        } else if (k == "divergence_sign") {
          sc.controls.divergence_sign = v.get<double>();
        } else if (k == "gauge_transforms") {
          if (!v.is_number_unsigned()) parse_error("gauge_transforms must be a non-negative integer");
          sc.controls.gauge_transforms = v.get<int>();
        } else {
          parse_error("unknown control '" + k + "'");
        }
      }
    }
  } catch (const json::exception& e) {
    parse_error(std::string("scenario field has the wrong type: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::StrategyUnavailable) parse_error(e.what());
    throw;
  }

  // Catalog names and parameters must resolve; Kaluza checks need a Kaluza entry.
  bool any_kaluza = false;
  for (const auto& ref : sc.catalog) {
    const Spacetime s = build_spacetime(ref.name, with_seed(ref, sc.seed), sc.strategy);
    any_kaluza = any_kaluza || s.kaluza.has_value();
  }
  for (const auto& id : sc.checks) {
    if (find_check(id)->info.kaluza_only && !any_kaluza) {
      parse_error("check '" + id + "' needs a kaluza-* catalog entry");
    }
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot read scenario file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

VerificationReport run_scenario(const Scenario& sc) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  VerificationReport rep;
  rep.schema_version = kSchemaVersion;
  rep.scenario = sc.name;
  rep.strategy = sc.strategy.name();
  rep.seed = sc.seed;
  rep.points = sc.points;
  rep.version = kVersion;

  for (const auto& ref : sc.catalog) {
    const Spacetime st = build_spacetime(ref.name, with_seed(ref, sc.seed), sc.strategy);
    std::optional<KaluzaConfiguration> cfg = st.kaluza;
    if (cfg) cfg->kappa *= sc.controls.kappa_scale;
    Context ctx{sc, st, cfg, st.frame.chart().sample_points(sc.points, sc.seed), {}};
    if (cfg) ctx.base_pts = cfg->base_chart.sample_points(sc.points, sc.seed);
    for (const auto& id : sc.checks) {
      const Registered* r = find_check(id);
      if (r->info.kaluza_only && !cfg) continue;
      CheckRecord rec;
      rec.check = id;
      rec.target = ref.name;
      rec.points = r->info.kaluza_only && id != "kaluza-3-15" ? ctx.base_pts.size() : ctx.pts.size();
      if (r->point_cap) rec.points = std::min(rec.points, r->point_cap);
      const auto it = sc.tolerances.find(id);
      rec.tolerance = it != sc.tolerances.end() ? it->second : default_tolerance(id, sc.strategy);
      const auto c0 = clock::now();
      try {
        rec.max_abs_residual = r->fn(ctx, rec.details);
        rec.pass = rec.max_abs_residual <= rec.tolerance;
      } catch (const Error& e) {
        rec.max_abs_residual = std::numeric_limits<double>::infinity();
        rec.error = e.what();
        rec.pass = false;
      }
      rec.wall_time_s = std::chrono::duration<double>(clock::now() - c0).count();
      rep.records.push_back(std::move(rec));
    }
  }
  rep.pass = !rep.records.empty() &&
             std::all_of(rep.records.begin(), rep.records.end(), [](const CheckRecord& r) { return r.pass; });
  rep.wall_time_s = std::chrono::duration<double>(clock::now() - t0).count();
  return rep;
}

namespace {

json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

}  // namespace

std::string report_to_json(const VerificationReport& rep, bool include_timing) {
  json j;
  j["schema_version"] = rep.schema_version;
  j["scenario"] = rep.scenario;
  j["environment"] = {{"strategy", rep.strategy}, {"seed", rep.seed}, {"points", rep.points},
                      {"version", rep.version}};
  j["pass"] = rep.pass;
  json records = json::array();
  for (const auto& r : rep.records) {
    json o{{"check", r.check},
           {"target", r.target},
           {"points", r.points},
           {"max_abs_residual", number(r.max_abs_residual)},
           {"tolerance", r.tolerance},
           {"pass", r.pass}};
    if (!r.details.empty()) {
      json d = json::object();
      for (const auto& [k, v] : r.details) d[k] = number(v);
      o["details"] = d;
    }
    if (!r.error.empty()) o["error"] = r.error;
    if (include_timing) o["wall_time_s"] = r.wall_time_s;
    records.push_back(o);
  }
  j["records"] = records;
  if (include_timing) j["wall_time_s"] = rep.wall_time_s;
  return j.dump(2) + "\n";
}

std::string report_summary(const VerificationReport& rep) {
  std::size_t wc = 5, wt = 6;
  for (const auto& r : rep.records) {
    wc = std::max(wc, r.check.size());
    wt = std::max(wt, r.target.size());
  }
  std::ostringstream os;
  os << "scenario " << rep.scenario << " (strategy " << rep.strategy << ", seed " << rep.seed << ")\n";
  os << std::left << std::setw(static_cast<int>(wc)) << "check" << "  " << std::setw(static_cast<int>(wt))
     << "target" << "  " << std::right << std::setw(6) << "points" << "  " << std::setw(12) << "residual"
     << "  " << std::setw(10) << "tolerance" << "  result\n";
  for (const auto& r : rep.records) {
    os << std::left << std::setw(static_cast<int>(wc)) << r.check << "  " << std::setw(static_cast<int>(wt))
       << r.target << "  " << std::right << std::setw(6) << r.points << "  " << std::setw(12)
       << std::setprecision(3) << std::scientific << r.max_abs_residual << "  " << std::setw(10) << r.tolerance
       << "  " << (r.pass ? "PASS" : "FAIL") << "\n";
    if (!r.error.empty()) os << "    error: " << r.error << "\n";
  }
  os << (rep.pass ? "overall: PASS" : "overall: FAIL") << "\n";
  return os.str();
}

std::string catalog_to_json() {
  json arr = json::array();
  for (const auto& e : catalog_list()) {
    json params = json::array();
    for (const auto& p : e.parameters)
      params.push_back({{"name", p.name}, {"default", p.default_value}, {"description", p.note}});
    arr.push_back({{"name", e.name},
                   {"kind", e.kind},
                   {"description", e.description},
                   {"parameters", params},
                   {"domain", e.domain}});
  }
  return arr.dump(2) + "\n";
}

}  // namespace mag
