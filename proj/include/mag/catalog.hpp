#pragma once

// Named spacetimes, connections and Kaluza configurations used by tests and
// scenarios.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mag/chart_frame.hpp"
#include "mag/connection_field.hpp"
#include "mag/kaluza.hpp"
#include "mag/metric_field.hpp"

namespace mag {

struct CatalogParameter {
  std::string name;
  double default_value = 0.0;
  std::string note;
};

struct CatalogEntry {
  std::string name;
  std::string kind;  // metric | connection | kaluza
  std::string description;
  std::vector<CatalogParameter> parameters;
  std::string domain;
};

const std::vector<CatalogEntry>& catalog_list();

using ParamMap = std::map<std::string, double>;

struct Spacetime {
  std::string name;
  std::string kind;
  ParamMap params;
  Frame frame;                 // frame the metric and connection are expressed in
  MetricField metric;
  ConnectionField connection;  // Levi-Civita of `metric` unless kind == connection
  std::optional<KaluzaConfiguration> kaluza;
};

/// Throws CatalogMiss for unknown names, ConfigParseError for unknown or
/// out-of-range parameters.
Spacetime build_spacetime(const std::string& name, const ParamMap& params,
                          Strategy strategy = Strategy::analytic());

/// Kaluza configurations by name (kaluza-* entries only).
KaluzaConfiguration build_kaluza(const std::string& name, const ParamMap& params,
                                 Strategy strategy = Strategy::analytic());

// Closed-form metrics, coordinate components.
MetricField minkowski_metric(std::size_t dim = 4);
MetricField sphere_metric();
/// f = 1 - 2M/r + Q^2/r^2 on (t, r, theta, phi); Q = 0 is Schwarzschild.
MetricField reissner_nordstrom_metric(double mass, double charge);
Chart spherical_chart(double r_min, double r_max, Strategy strategy);

}  // namespace mag
