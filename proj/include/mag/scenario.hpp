#pragma once

// Scenario files, the check registry and verification reports.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mag/catalog.hpp"
#include "mag/chart_frame.hpp"

namespace mag {

struct CatalogRef {
  std::string name;
  ParamMap params;
};

/// Deliberate perturbations used as negative controls.
struct Controls {
  double kappa_scale = 1.0;      // multiplies kappa of Kaluza entries
  double divergence_sign = 1.0;  // sign of the divergence term in identity-2-11
  int gauge_transforms = 5;      // random gauges tried by gauge-invariance
};

struct Scenario {
  int schema_version = 1;
  std::string name;
  std::vector<CatalogRef> catalog;
  std::vector<std::string> checks;
  Strategy strategy;
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 0;
  std::size_t points = 100;
  Controls controls;
};

struct CheckInfo {
  std::string id;
  std::string description;
  bool kaluza_only = false;
};

const std::vector<CheckInfo>& registered_checks();

/// Default tolerance of a check under a strategy.
double default_tolerance(const std::string& check, const Strategy& strategy);

/// Parses and validates a scenario document. Throws ConfigParseError for
/// malformed documents, unknown keys or check ids, and CatalogMiss for
/// unknown catalog names.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

struct CheckRecord {
  std::string check;
  std::string target;
  std::size_t points = 0;
  double max_abs_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::map<std::string, double> details;
  std::string error;  // numerical failure raised while checking
  double wall_time_s = 0.0;
};

struct VerificationReport {
  int schema_version = 1;
  std::string scenario;
  std::string strategy;
  std::uint64_t seed = 0;
  std::size_t points = 0;
  std::string version;
  std::vector<CheckRecord> records;
  bool pass = false;
  double wall_time_s = 0.0;
};

VerificationReport run_scenario(const Scenario& scenario);

/// `include_timing = false` drops wall-time fields, giving byte-stable output.
std::string report_to_json(const VerificationReport& report, bool include_timing = true);
std::string report_summary(const VerificationReport& report);

/// Catalog listing as a JSON array of {name, kind, description, parameters, domain}.
std::string catalog_to_json();

}  // namespace mag
