#include "gridshield/cli/report.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gridshield/errors.hpp"

namespace gridshield::cli {

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

SweepReport compute_metrics(const CasList& baseline, std::span<const ProtectionPlan> plans,
                            std::span<const double> runtimes_s) {
  if (baseline.records.empty())
    throw InputError(InputError::Kind::domain, "metrics need a non-empty CAS list");

  SweepReport report;
  report.grid = baseline.source_grid;
  report.baseline_mw = baseline.records.front().lost_load_mw;
  report.cas_count = static_cast<int>(baseline.records.size());

  std::set<std::string> labels;
  for (const auto& rec : baseline.records) {
    std::size_t start = 0;
    const auto& l = rec.configuration_label;
    while (start <= l.size()) {
      const std::size_t end = std::min(l.find('+', start), l.size());
      if (end > start) labels.insert(l.substr(start, end - start));
      start = end + 1;
    }
  }
  report.configurations.assign(labels.begin(), labels.end());

  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& plan = plans[i];
    SweepRow row;
    row.x_max = plan.budget;
    row.excluded_cas_count = plan.total_excluded;
    row.consecutive_excluded = plan.consecutive_excluded;
    row.remaining_worst_case_mw = plan.remaining_worst_case_mw;
    row.runtime_s = i < runtimes_s.size() ? runtimes_s[i] : 0.0;
    if (plan.all_excluded()) {
      row.avoided_lost_load_pct = 100.0;
      if (!baseline.complete) row.annotation = "all listed scenarios excluded; list incomplete";
    } else if (report.baseline_mw > 0.0) {
      const double pct =
          100.0 * (report.baseline_mw - *plan.remaining_worst_case_mw) / report.baseline_mw;
      row.avoided_lost_load_pct = std::clamp(pct, 0.0, 100.0);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string report_to_json(const SweepReport& report) {
  using nlohmann::json;
  json doc = json::object();
  doc["grid"] = report.grid;
  doc["configurations"] = report.configurations;
  doc["baseline_mw"] = report.baseline_mw;
  doc["cas_count"] = report.cas_count;
  doc["rows"] = json::array();
  for (const auto& r : report.rows) {
    json row = {{"x_max", r.x_max},
                {"avoided_lost_load_pct", r.avoided_lost_load_pct},
                {"excluded_cas_count", r.excluded_cas_count},
                {"consecutive_excluded", r.consecutive_excluded},
                {"runtime_s", r.runtime_s}};
    if (r.remaining_worst_case_mw) row["remaining_worst_case_mw"] = *r.remaining_worst_case_mw;
    else row["remaining_worst_case_mw"] = "all-excluded";
    if (!r.annotation.empty()) row["annotation"] = r.annotation;
    doc["rows"].push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

std::string report_to_csv(const SweepReport& report) {
  std::ostringstream out;
  out << "x_max,avoided_lost_load_pct,excluded_cas_count,consecutive_excluded,"
         "remaining_worst_case_mw,runtime_s\n";
  for (const auto& r : report.rows) {
    out << r.x_max << ',' << format_number(r.avoided_lost_load_pct) << ','
        << r.excluded_cas_count << ',' << r.consecutive_excluded << ','
        << (r.remaining_worst_case_mw ? format_number(*r.remaining_worst_case_mw) : "all-excluded")
        << ',' << format_number(r.runtime_s) << '\n';
  }
  return out.str();
}

}  // namespace gridshield::cli
