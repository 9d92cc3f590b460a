#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridshield/component.hpp"
#include "gridshield/dcopf.hpp"
#include "gridshield/grid_model.hpp"

namespace gridshield {

/// Lost loads are ranked on a 1e-6 MW grid so that LP round-off cannot
/// reorder scenarios that are equal in exact arithmetic.
inline constexpr double kLostLoadResolution = 1e-6;

double snap_lost_load(double mw);

/// One critical attack scenario.
struct CasRecord {
  int rank = 0;  // 1-based
  AttackVector components;
  double lost_load_mw = 0.0;
  std::string configuration_label;

  bool operator==(const CasRecord&) const = default;
};

/// Scenarios ordered by non-increasing lost load, ties by the sorted
/// component tuple. `complete` means every attack set of size z_max is listed.
struct CasList {
  std::vector<CasRecord> records;
  int z_max = 0;
  std::string source_grid;
  bool complete = false;

  bool operator==(const CasList&) const = default;
};

struct StopRule {
  std::optional<std::size_t> max_scenarios = 500;  // nullopt: unbounded
  double min_lost_load_mw = 0.0;  // stop once the next scenario is strictly below

  static StopRule unbounded() { return {std::nullopt, 0.0}; }
};

struct WorstCase {
  AttackVector attack;
  double lost_load_mw = 0.0;
};

/// Exhaustive attacker backend. Every attack set is scored with the dispatch
/// LP; results are memoized per component subset. Subsets containing a
/// component that alone already sheds all demand are scored without a solve.
class AttackEvaluator {
 public:
  struct Candidate {
    std::vector<int> members;  // sorted indices into universe()
    double lost_load_mw = 0.0;  // snapped
  };

  explicit AttackEvaluator(const GridCase& grid, unsigned jobs = 0);

  const DcopfModel& model() const { return model_; }
  const std::vector<ComponentRef>& universe() const { return universe_; }

  AttackVector to_attack(std::span<const int> members) const;
  /// nullopt if some member is outside the attackable universe.
  std::optional<std::vector<int>> to_indices(const AttackVector& attack) const;

  /// Snapped lost load of one subset (sorted indices).
  double lost_load(std::span<const int> members);

  /// Scores all size-`size` subsets avoiding `forbidden` members, in
  /// lexicographic order of member tuples.
  std::vector<Candidate> evaluate_all(int size, const std::vector<char>& forbidden = {});

  std::size_t lp_solves() const { return lp_solves_; }

 private:
  double solve_subset(std::span<const int> members) const;

  DcopfModel model_;
  std::vector<ComponentRef> universe_;
  std::vector<int> grid_index_;  // branch or generator index per universe entry
  unsigned jobs_;
  double total_demand_;
  std::map<std::vector<int>, double> cache_;
  std::mutex cache_mutex_;
  std::size_t lp_solves_ = 0;
};

/// Sort key for scenarios: higher lost load first, then lexicographically
/// smaller member tuple.
bool ranks_before(const AttackEvaluator::Candidate& a, const AttackEvaluator::Candidate& b);

/// Most damaging size-z_max attack that leaves at least one member of every
/// exclusion unattacked. Throws ExhaustedError if none remains and
/// InputError for z_max outside [0, |attackable|].
WorstCase worst_case_attack(const GridCase& grid, int z_max,
                            std::span<const AttackVector> exclusions, unsigned jobs = 0);

/// Repeated worst-case search with an exclusion cut after each scenario.
CasList enumerate_cas(const GridCase& grid, int z_max, const StopRule& stop = {},
                      unsigned jobs = 0);

/// Union of lists over configurations of the same grid. Duplicate attack
/// sets keep the largest lost load and the union of configuration labels
/// (joined by '+'). Throws InputError on mismatched z_max or source grid.
CasList merge_cas_lists(std::span<const CasList> lists);

/// Empty iff all CasList invariants hold.
std::vector<std::string> check_cas_list(const CasList& list);

std::string cas_list_to_json(const CasList& list);
CasList parse_cas_list(std::string_view text);
CasList load_cas_list(const std::filesystem::path& path);

}  // namespace gridshield
