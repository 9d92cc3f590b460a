#include "gridshield/protect.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "gridshield/errors.hpp"
#include "gridshield/parallel.hpp"
#include "json_util.hpp"

namespace gridshield {

using detail::json;

namespace {

using Word = std::uint64_t;

/// Scenario membership as bitsets: for each component, the set of records
/// containing it. A protected set excludes the union of its members' bits.
class ScenarioIndex {
 public:
  explicit ScenarioIndex(const CasList& cas) : records_(static_cast<int>(cas.records.size())) {
    for (const auto& rec : cas.records) {
      for (const auto& ref : rec.components.sorted()) universe_.push_back(ref);
    }
    std::sort(universe_.begin(), universe_.end());
    universe_.erase(std::unique(universe_.begin(), universe_.end()), universe_.end());

    words_ = (records_ + 63) / 64;
    bits_.assign(universe_.size() * words_, 0);
    members_.resize(records_);
    for (int w = 0; w < records_; ++w) {
      for (const auto& ref : cas.records[w].components.sorted()) {
        const int c = index_of(ref);
        members_[w].push_back(c);
        bits_[c * words_ + w / 64] |= Word{1} << (w % 64);
      }
    }
  }

  int records() const { return records_; }
  int components() const { return static_cast<int>(universe_.size()); }
  int words() const { return words_; }
  const std::vector<ComponentRef>& universe() const { return universe_; }
  const std::vector<int>& members(int record) const { return members_[record]; }
  const Word* bits(int component) const { return &bits_[component * words_]; }

  int index_of(const ComponentRef& ref) const {
    auto it = std::lower_bound(universe_.begin(), universe_.end(), ref);
    if (it == universe_.end() || *it != ref) return -1;
    return static_cast<int>(it - universe_.begin());
  }

  /// Number of leading records covered (first zero bit).
  int prefix(const std::vector<Word>& cover) const {
    for (int i = 0; i < words_; ++i) {
      if (cover[i] != ~Word{0}) {
        return std::min(records_, i * 64 + std::countr_one(cover[i]));
      }
    }
    return records_;
  }

  static int count(const std::vector<Word>& cover) {
    int n = 0;
    for (Word w : cover) n += std::popcount(w);
    return n;
  }

  std::vector<Word> with(const std::vector<Word>& cover, int component) const {
    std::vector<Word> out(cover);
    const Word* b = bits(component);
    for (int i = 0; i < words_; ++i) out[i] |= b[i];
    return out;
  }

  int gain(const std::vector<Word>& cover, int component) const {
    const Word* b = bits(component);
    int n = 0;
    for (int i = 0; i < words_; ++i) n += std::popcount(b[i] & ~cover[i]);
    return n;
  }

  std::vector<Word> empty_cover() const { return std::vector<Word>(words_, 0); }

 private:
  int records_;
  int words_ = 0;
  std::vector<ComponentRef> universe_;
  std::vector<std::vector<int>> members_;
  std::vector<Word> bits_;
};

/// Sort key under a tie-break mode; smaller is better.
struct PlanKey {
  int neg_total = 0;  // 0 in paper mode
  int size = 0;
  std::vector<int> members;

  auto operator<=>(const PlanKey&) const = default;
};

class ProtectionSearch {
 public:
  ProtectionSearch(const ScenarioIndex& index, int budget, TieBreak mode)
      : idx_(index), budget_(budget), extended_(mode == TieBreak::extended) {
    find_best_prefix();
  }

  int best_prefix() const { return best_prefix_; }

  /// Best plan under the full key.
  std::vector<int> optimum() {
    if (extended_) {
      best_total_ = -1;
      best_size_ = std::numeric_limits<int>::max();
      core_search(idx_.empty_cover(), 0);
    } else {
      best_size_ = min_core_size_;
    }
    std::vector<int> chosen;
    lex_first(idx_.empty_cover(), chosen, -1, best_size_);
    return found_;
  }

  /// All plans of optimal run length, best `limit` under the key.
  std::vector<PlanKey> enumerate(std::size_t limit) {
    limit_ = limit;
    collected_.clear();
    std::vector<int> chosen;
    collect(idx_.empty_cover(), chosen, -1);
    return collected_;
  }

 private:
  // Any plan covering records [0, L) contains, for each first-uncovered
  // record met along the way, one of that record's members. Branching on
  // those members therefore enumerates a core of every optimal plan.
  void find_best_prefix() {
    best_prefix_ = -1;
    min_core_size_ = 0;
    hit_dfs(idx_.empty_cover(), 0);
  }

  void hit_dfs(const std::vector<Word>& cover, int depth) {
    const int prefix = idx_.prefix(cover);
    if (prefix > best_prefix_ || (prefix == best_prefix_ && depth < min_core_size_)) {
      best_prefix_ = prefix;
      min_core_size_ = depth;
    }
    if (prefix == idx_.records() || depth == budget_) return;
    for (int c : idx_.members(prefix)) hit_dfs(idx_.with(cover, c), depth + 1);
  }

  /// True if records [0, best_prefix_) can all be covered by adding at most
  /// `remaining` components with index > last.
  bool can_reach_prefix(const std::vector<Word>& cover, int last, int remaining) const {
    const int prefix = idx_.prefix(cover);
    if (prefix >= best_prefix_) return true;
    if (remaining == 0) return false;
    for (int c : idx_.members(prefix)) {
      if (c > last && can_reach_prefix(idx_.with(cover, c), last, remaining - 1)) return true;
    }
    return false;
  }

  /// Upper bound on the coverage reachable by adding `remaining`
  /// components with index > last.
  int coverage_bound(const std::vector<Word>& cover, int last, int remaining) const {
    gains_.clear();
    for (int c = last + 1; c < idx_.components(); ++c) {
      const int g = idx_.gain(cover, c);
      if (g > 0) gains_.push_back(g);
    }
    const int take = std::min<int>(remaining, static_cast<int>(gains_.size()));
    std::partial_sort(gains_.begin(), gains_.begin() + take, gains_.end(), std::greater<>());
    int bound = ScenarioIndex::count(cover);
    for (int i = 0; i < take; ++i) bound += gains_[i];
    return bound;
  }

  // --- extended mode: best (total, size) among plans reaching the prefix ---

  void record_candidate(int total, int size) {
    if (total > best_total_ || (total == best_total_ && size < best_size_)) {
      best_total_ = total;
      best_size_ = size;
    }
  }

  bool bound_fails(int bound, int child_size) const {
    return bound < best_total_ || (bound == best_total_ && child_size >= best_size_);
  }

  void core_search(const std::vector<Word>& cover, int depth) {
    const int prefix = idx_.prefix(cover);
    if (prefix >= best_prefix_) {
      std::vector<int> candidates;
      for (int c = 0; c < idx_.components(); ++c) candidates.push_back(c);
      free_search(cover, depth, candidates);
      return;
    }
    if (depth == budget_) return;
    for (int c : idx_.members(prefix)) core_search(idx_.with(cover, c), depth + 1);
  }

  // Max-coverage branch-and-bound: each subset is generated once, as the
  // sequence of its members in decreasing-gain order at each node.
  void free_search(const std::vector<Word>& cover, int size, const std::vector<int>& candidates) {
    const int total = ScenarioIndex::count(cover);
    record_candidate(total, size);
    const int remaining = budget_ - size;
    if (remaining == 0) return;

    std::vector<std::pair<int, int>> ranked;  // (-gain, component)
    for (int c : candidates) {
      const int g = idx_.gain(cover, c);
      if (g > 0) ranked.push_back({-g, c});
    }
    std::sort(ranked.begin(), ranked.end());

    for (std::size_t i = 0; i < ranked.size(); ++i) {
      int bound = total;
      for (std::size_t j = i; j < ranked.size() && j < i + remaining; ++j) bound -= ranked[j].first;
      if (bound_fails(bound, size + 1)) break;
      std::vector<int> rest;
      rest.reserve(ranked.size() - i - 1);
      for (std::size_t j = i + 1; j < ranked.size(); ++j) rest.push_back(ranked[j].second);
      free_search(idx_.with(cover, ranked[i].second), size + 1, rest);
    }
  }

  // --- lexicographic scan for the first plan of a given size and value ---

  bool qualifies(const std::vector<Word>& cover) const {
    if (idx_.prefix(cover) < best_prefix_) return false;
    return !extended_ || ScenarioIndex::count(cover) == best_total_;
  }

  bool lex_first(const std::vector<Word>& cover, std::vector<int>& chosen, int last, int size) {
    const int remaining = size - static_cast<int>(chosen.size());
    if (remaining == 0) {
      if (!qualifies(cover)) return false;
      found_ = chosen;
      return true;
    }
    if (!can_reach_prefix(cover, last, remaining)) return false;
    if (extended_ && coverage_bound(cover, last, remaining) < best_total_) return false;
    for (int c = last + 1; c <= idx_.components() - remaining; ++c) {
      chosen.push_back(c);
      if (lex_first(idx_.with(cover, c), chosen, c, size)) return true;
      chosen.pop_back();
    }
    return false;
  }

  // --- enumeration of all plans with the optimal run length ---

  void offer(const std::vector<Word>& cover, const std::vector<int>& chosen) {
    PlanKey key;
    key.neg_total = extended_ ? -ScenarioIndex::count(cover) : 0;
    key.size = static_cast<int>(chosen.size());
    key.members = chosen;
    if (collected_.size() == limit_ && !(key < collected_.back())) return;
    collected_.insert(std::upper_bound(collected_.begin(), collected_.end(), key), std::move(key));
    if (collected_.size() > limit_) collected_.pop_back();
  }

  // Pre-order with ascending children visits sets in lexicographic order,
  // so a later set never beats an earlier one on an otherwise equal key.
  void collect(const std::vector<Word>& cover, std::vector<int>& chosen, int last) {
    if (idx_.prefix(cover) >= best_prefix_) offer(cover, chosen);
    const int size = static_cast<int>(chosen.size());
    const int remaining = budget_ - size;
    if (remaining == 0 || limit_ == 0) return;
    if (!can_reach_prefix(cover, last, remaining)) return;
    if (collected_.size() == limit_) {
      const PlanKey& worst = collected_.back();
      if (extended_) {
        const int bound = coverage_bound(cover, last, remaining);
        if (-bound > worst.neg_total) return;
        if (-bound == worst.neg_total && size + 1 >= worst.size) return;
      } else if (size + 1 >= worst.size) {
        return;
      }
    }
    for (int c = last + 1; c < idx_.components(); ++c) {
      chosen.push_back(c);
      collect(idx_.with(cover, c), chosen, c);
      chosen.pop_back();
    }
  }

  const ScenarioIndex& idx_;
  int budget_;
  bool extended_;
  int best_prefix_ = 0;
  int min_core_size_ = 0;
  int best_total_ = 0;
  int best_size_ = 0;
  std::vector<int> found_;
  std::size_t limit_ = 0;
  std::vector<PlanKey> collected_;
  mutable std::vector<int> gains_;
};

ProtectionPlan make_plan(const CasList& cas, const ScenarioIndex& idx,
                         const std::vector<int>& members, int budget) {
  ComponentSet set;
  for (int c : members) set.insert(idx.universe()[c]);
  return score_protection(cas, set, budget);
}

void check_budget(int x_max) {
  if (x_max < 0)
    throw InputError(InputError::Kind::domain,
                     "protection budget must be >= 0, got " + std::to_string(x_max));
}

}  // namespace

ProtectionPlan score_protection(const CasList& cas, const ComponentSet& protected_components,
                                int budget) {
  ProtectionPlan plan;
  plan.protected_components = protected_components;
  plan.budget = budget;
  bool run = true;
  for (const auto& rec : cas.records) {
    const bool excluded = rec.components.intersects(protected_components);
    if (excluded) {
      ++plan.total_excluded;
      if (run) ++plan.consecutive_excluded;
    } else if (run) {
      run = false;
      plan.remaining_worst_case_mw = rec.lost_load_mw;
    }
  }
  if (plan.all_excluded() && !cas.complete && !cas.records.empty())
    plan.remaining_upper_bound_mw = cas.records.back().lost_load_mw;
  return plan;
}

ProtectionPlan optimal_protection(const CasList& cas, int x_max, TieBreak tie_break) {
  check_budget(x_max);
  const ScenarioIndex idx(cas);
  ProtectionSearch search(idx, x_max, tie_break);
  return make_plan(cas, idx, search.optimum(), x_max);
}

std::vector<ProtectionPlan> enumerate_optimal_protections(const CasList& cas, int x_max,
                                                          std::size_t limit,
                                                          TieBreak tie_break) {
  check_budget(x_max);
  if (limit == 0) throw InputError(InputError::Kind::domain, "alternative limit must be >= 1");
  const ScenarioIndex idx(cas);
  ProtectionSearch search(idx, x_max, tie_break);
  std::vector<ProtectionPlan> out;
  for (const auto& key : search.enumerate(limit)) out.push_back(make_plan(cas, idx, key.members, x_max));
  return out;
}

ProtectionEvaluation evaluate_protection(const GridCase& grid, const ProtectionPlan& plan,
                                         int z_max, unsigned jobs) {
  if (z_max < 0) throw InputError(InputError::Kind::domain, "attack budget must be >= 0");
  AttackEvaluator eval(grid, jobs);
  const auto indices = eval.to_indices(plan.protected_components);
  if (!indices)
    throw InputError(InputError::Kind::reference,
                     "plan protects components that are not attackable in grid '" + grid.name + "'");

  const int n = static_cast<int>(eval.universe().size());
  std::vector<char> forbidden(n, 0);
  for (int i : *indices) forbidden[i] = 1;
  const int open = n - static_cast<int>(indices->size());

  ProtectionEvaluation out;
  out.exhausted = open < z_max;
  out.attack_size = std::min(open, z_max);
  const auto candidates = eval.evaluate_all(out.attack_size, forbidden);
  const auto worst = std::min_element(candidates.begin(), candidates.end(), ranks_before);
  if (worst != candidates.end()) {
    out.worst_case_mw = worst->lost_load_mw;
    out.worst_attack = eval.to_attack(worst->members);
  }
  return out;
}

std::vector<ProtectionPlan> budget_sweep(const CasList& cas, std::span<const int> budgets,
                                         TieBreak tie_break, unsigned jobs) {
  if (budgets.empty()) throw InputError(InputError::Kind::domain, "budget list is empty");
  for (int b : budgets) check_budget(b);
  std::vector<ProtectionPlan> plans(budgets.size());
  parallel_for(budgets.size(), jobs,
               [&](std::size_t i) { plans[i] = optimal_protection(cas, budgets[i], tie_break); });
  return plans;
}

namespace {

json plan_object(const ProtectionPlan& plan) {
  json o = json::object();
  o["budget"] = plan.budget;
  o["protected"] = {{"branches", plan.protected_components.branches},
                    {"generators", plan.protected_components.generators}};
  o["consecutive_excluded"] = plan.consecutive_excluded;
  o["total_excluded"] = plan.total_excluded;
  if (plan.remaining_worst_case_mw) o["remaining_worst_case_mw"] = *plan.remaining_worst_case_mw;
  else o["remaining_worst_case_mw"] = "all-excluded";
  if (plan.remaining_upper_bound_mw) o["remaining_upper_bound_mw"] = *plan.remaining_upper_bound_mw;
  return o;
}

ProtectionPlan plan_from_object(const json& o, const std::string& path) {
  ProtectionPlan plan;
  plan.budget = static_cast<int>(detail::as_integer(detail::require(o, "budget", path), path + ".budget"));
  const auto& prot = detail::require(o, "protected", path);
  for (const char* key : {"branches", "generators"}) {
    auto it = prot.find(key);
    if (it == prot.end()) continue;
    const std::string p = path + ".protected." + key;
    const ComponentKind kind =
        std::string_view(key) == "branches" ? ComponentKind::branch : ComponentKind::generator;
    for (const auto& id : detail::as_array(*it, p)) plan.protected_components.insert({kind, detail::as_id(id, p)});
  }
  plan.consecutive_excluded = static_cast<int>(detail::as_integer(
      detail::require(o, "consecutive_excluded", path), path + ".consecutive_excluded"));
  plan.total_excluded = static_cast<int>(
      detail::as_integer(detail::require(o, "total_excluded", path), path + ".total_excluded"));
  const auto& rem = detail::require(o, "remaining_worst_case_mw", path);
  if (rem.is_string()) {
    if (rem.get<std::string>() != "all-excluded")
      detail::field_error(path + ".remaining_worst_case_mw", "expected a number or \"all-excluded\"");
  } else {
    plan.remaining_worst_case_mw = detail::as_number(rem, path + ".remaining_worst_case_mw");
  }
  if (auto it = o.find("remaining_upper_bound_mw"); it != o.end())
    plan.remaining_upper_bound_mw = detail::as_number(*it, path + ".remaining_upper_bound_mw");
  return plan;
}

}  // namespace

std::string plan_to_json(const ProtectionPlan& plan, std::span<const ProtectionPlan> alternatives) {
  json doc = plan_object(plan);
  if (!alternatives.empty()) {
    doc["alternatives"] = json::array();
    for (const auto& alt : alternatives) doc["alternatives"].push_back(plan_object(alt));
  }
  return doc.dump(2) + "\n";
}

ProtectionPlan parse_plan(std::string_view text) {
  const json doc = detail::parse_json(text, "plan");
  return plan_from_object(doc, "plan");
}

}  // namespace gridshield
