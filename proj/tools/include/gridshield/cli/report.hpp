#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridshield/cas.hpp"
#include "gridshield/protect.hpp"

namespace gridshield::cli {

struct SweepRow {
  int x_max = 0;
  double avoided_lost_load_pct = 0.0;
  int excluded_cas_count = 0;
  int consecutive_excluded = 0;
  std::optional<double> remaining_worst_case_mw;  // nullopt: all-excluded
  double runtime_s = 0.0;
  std::string annotation;
};

struct SweepReport {
  std::string grid;
  std::vector<std::string> configurations;
  double baseline_mw = 0.0;
  int cas_count = 0;
  std::vector<SweepRow> rows;
};

/// Fills one row per plan. baseline is the rank-1 lost load (the remaining
/// worst case without protection). Throws InputError on an empty list.
SweepReport compute_metrics(const CasList& baseline, std::span<const ProtectionPlan> plans,
                            std::span<const double> runtimes_s = {});

std::string report_to_json(const SweepReport& report);
std::string report_to_csv(const SweepReport& report);

/// Shortest round-trip decimal form, shared by the JSON and CSV writers.
std::string format_number(double value);

}  // namespace gridshield::cli
