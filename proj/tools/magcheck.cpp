#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "mag/error.hpp"
#include "mag/scenario.hpp"
#include "mag/version.hpp"

namespace {

int emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "magcheck: cannot write '" << out_path << "'\n";
    return 2;
  }
  out << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metric-affine identity and field-equation checker"};
  app.set_version_flag("--version", std::string(mag::kVersion));
  app.require_subcommand(1);

  std::string config, out_path, format = "json", strategy;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> points;
  bool no_timing = false;

  CLI::App* run = app.add_subcommand("run", "run a scenario file and report residuals");
  run->add_option("config", config, "scenario file (JSON)")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--strategy", strategy, "override the differentiation strategy")
      ->check(CLI::IsMember({"analytic", "fd2", "fd4"}));
  run->add_option("--points", points, "sample points per check (default 100)")->check(CLI::PositiveNumber);
  run->add_option("--out", out_path, "write the report here instead of stdout");
  run->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "summary"}));
  run->add_flag("--no-timing", no_timing, "omit wall-time fields from JSON reports");

  CLI::App* cat = app.add_subcommand("catalog", "list catalog entries");
  cat->add_option("--format", format, "listing format")->check(CLI::IsMember({"json", "summary"}));

  CLI::App* checks = app.add_subcommand("checks", "list registered check ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*cat) {
    if (format == "json") return emit(mag::catalog_to_json(), "");
    for (const auto& e : mag::catalog_list()) {
      std::cout << e.name << " [" << e.kind << "] " << e.description << "\n";
      for (const auto& p : e.parameters) std::cout << "    " << p.name << " = " << p.default_value << "  " << p.note << "\n";
      std::cout << "    domain: " << e.domain << "\n";
    }
    return 0;
  }
  if (*checks) {
    for (const auto& c : mag::registered_checks()) {
      std::cout << c.id << (c.kaluza_only ? " [kaluza]" : "") << "  " << c.description << "\n";
    }
    return 0;
  }

  mag::Scenario sc;
  try {
    sc = mag::load_scenario(config);
    if (seed) sc.seed = *seed;
    if (points) sc.points = *points;
    if (!strategy.empty()) sc.strategy = mag::Strategy::parse(strategy);
  } catch (const mag::Error& e) {
    std::cerr << "magcheck: " << e.what() << "\n";
    return 2;
  }

  mag::VerificationReport rep;
  try {
    rep = mag::run_scenario(sc);
  } catch (const mag::Error& e) {
    const bool config_error =
        e.code() == mag::ErrorCode::ConfigParseError || e.code() == mag::ErrorCode::CatalogMiss;
    std::cerr << "magcheck: " << e.what() << "\n";
    return config_error ? 2 : 1;
  }
  const std::string text = format == "summary" ? mag::report_summary(rep) : mag::report_to_json(rep, !no_timing);
  if (const int rc = emit(text, out_path); rc != 0) return rc;
  if (!out_path.empty() && format == "json") std::cerr << mag::report_summary(rep);
  return rep.pass ? 0 : 1;
}
