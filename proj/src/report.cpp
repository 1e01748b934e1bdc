#include "grabforest/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace grabforest {

bool ExperimentReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ReportCheck& c) { return c.passed; });
}

std::optional<ReportRow> ExperimentReport::row(const std::string& name, double x) const {
  for (const auto& r : rows) {
    if (r.curve == name && r.x == x) return r;
  }
  return std::nullopt;
}

std::vector<ReportRow> ExperimentReport::curve(const std::string& name) const {
  std::vector<ReportRow> out;
  for (const auto& r : rows) {
    if (r.curve == name) out.push_back(r);
  }
  return out;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

nlohmann::ordered_json number_or_string(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

}  // namespace

nlohmann::ordered_json to_json(const ExperimentReport& report,
                               const nlohmann::ordered_json& metadata) {
  nlohmann::ordered_json doc;
  doc["experiment"] = report.experiment;
  if (!metadata.is_null()) doc["metadata"] = metadata;
  doc["parameters"] = report.parameters;
  auto& rows = doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row;
    row["curve"] = r.curve;
    row["x"] = number_or_string(r.x);
    row["value"] = number_or_string(r.value);
    row["se"] = r.se ? number_or_string(*r.se) : nlohmann::ordered_json(nullptr);
    rows.push_back(std::move(row));
  }
  auto& checks = doc["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  doc["warnings"] = report.warnings;
  doc["passed"] = report.passed();
  return doc;
}

std::string to_csv(const ExperimentReport& report, const nlohmann::ordered_json& metadata) {
  std::string out;
  out += "# experiment: " + report.experiment + "\n";
  if (!metadata.is_null()) out += "# metadata: " + metadata.dump() + "\n";
  out += "# parameters: " + report.parameters.dump() + "\n";
  out += "curve,x,value,se\n";
  for (const auto& r : report.rows) {
    out += r.curve + ',' + format_number(r.x) + ',' + format_number(r.value) + ',' +
           (r.se ? format_number(*r.se) : std::string()) + '\n';
  }
  return out;
}

std::map<std::string, std::string> plot_csvs(const ExperimentReport& report) {
  std::map<std::string, std::string> out;
  for (const auto& r : report.rows) {
    auto& csv = out[r.curve];
    if (csv.empty()) csv = "x,value\n";
    csv += format_number(r.x) + ',' + format_number(r.value) + '\n';
  }
  return out;
}

}  // namespace grabforest
