#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace grabforest {

struct ReportRow {
  std::string curve;
  double x = 0.0;
  double value = 0.0;
  std::optional<double> se;
};

struct ReportCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentReport {
  std::string experiment;
  nlohmann::ordered_json parameters;
  std::vector<ReportRow> rows;
  std::vector<ReportCheck> checks;
  std::vector<std::string> warnings;

  void add(std::string curve, double x, double value, std::optional<double> se = std::nullopt) {
    rows.push_back({std::move(curve), x, value, se});
  }
  void check(std::string name, bool passed, std::string detail = {}) {
    checks.push_back({std::move(name), passed, std::move(detail)});
  }

  bool passed() const;
  std::optional<ReportRow> row(const std::string& curve, double x) const;
  std::vector<ReportRow> curve(const std::string& name) const;
};

// Full report document. `metadata` (config, RNG description) is embedded
// verbatim under "metadata".
nlohmann::ordered_json to_json(const ExperimentReport& report,
                               const nlohmann::ordered_json& metadata = {});

// Flat CSV, one row per (curve, x): "curve,x,value,se". Metadata goes into
// leading "# " comment lines.
std::string to_csv(const ExperimentReport& report, const nlohmann::ordered_json& metadata = {});

// Two-column "x,value" CSV per curve, for plotting tools.
std::map<std::string, std::string> plot_csvs(const ExperimentReport& report);

// Shortest round-trip decimal form.
std::string format_number(double x);

}  // namespace grabforest
