#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridshield/cas.hpp"
#include "gridshield/component.hpp"
#include "gridshield/grid_model.hpp"

namespace gridshield {

/// How ties in the number of consecutively excluded scenarios are resolved.
///  - paper:    fewest protected components, then lexicographic ids.
///  - extended: most excluded scenarios overall, then fewest components,
///              then lexicographic ids.
enum class TieBreak { paper, extended };

struct ProtectionPlan {
  ComponentSet protected_components;
  int budget = 0;
  int consecutive_excluded = 0;
  int total_excluded = 0;
  /// Lost load of the first scenario the plan does not exclude; nullopt
  /// means every listed scenario is excluded.
  std::optional<double> remaining_worst_case_mw;
  /// Only set when every scenario is excluded but the list is incomplete:
  /// the smallest listed lost load bounds the unlisted ones from above.
  std::optional<double> remaining_upper_bound_mw;

  bool all_excluded() const { return !remaining_worst_case_mw.has_value(); }
  bool operator==(const ProtectionPlan&) const = default;
};

/// Scores an arbitrary protected set against a scenario list.
ProtectionPlan score_protection(const CasList& cas, const ComponentSet& protected_components,
                                int budget);

/// Protected set of at most x_max components that excludes the longest
/// run of scenarios starting at rank 1 (exact branch-and-bound).
ProtectionPlan optimal_protection(const CasList& cas, int x_max,
                                  TieBreak tie_break = TieBreak::extended);

/// Every plan attaining the optimal run length, best first under the
/// tie-break order, truncated to `limit`. Candidate plans draw from the
/// components that appear in the list.
std::vector<ProtectionPlan> enumerate_optimal_protections(const CasList& cas, int x_max,
                                                          std::size_t limit,
                                                          TieBreak tie_break = TieBreak::extended);

struct ProtectionEvaluation {
  double worst_case_mw = 0.0;
  AttackVector worst_attack;
  int attack_size = 0;
  /// Fewer than z_max unprotected attackable components remained; the
  /// worst case is taken over attacks of attack_size instead.
  bool exhausted = false;
};

/// Ground-truth worst case over all size-z_max attacks that avoid the
/// protected components, using the exhaustive attacker backend.
ProtectionEvaluation evaluate_protection(const GridCase& grid, const ProtectionPlan& plan,
                                         int z_max, unsigned jobs = 0);

/// One optimal plan per budget, in input order.
std::vector<ProtectionPlan> budget_sweep(const CasList& cas, std::span<const int> budgets,
                                         TieBreak tie_break = TieBreak::extended,
                                         unsigned jobs = 0);

std::string plan_to_json(const ProtectionPlan& plan,
                         std::span<const ProtectionPlan> alternatives = {});
ProtectionPlan parse_plan(std::string_view text);

}  // namespace gridshield
