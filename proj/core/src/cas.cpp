#include "gridshield/cas.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "gridshield/errors.hpp"
#include "gridshield/parallel.hpp"
#include "json_util.hpp"

namespace gridshield {

using detail::json;

double snap_lost_load(double mw) {
  // dividing by an exact integer gives the double nearest the decimal
  constexpr double kSteps = 1e6;
  static_assert(kSteps * kLostLoadResolution == 1.0);
  const double snapped = std::round(mw * kSteps) / kSteps;
  return snapped == 0.0 ? 0.0 : snapped;  // no negative zero
}

namespace {

/// All size-k index combinations of [0, n) in lexicographic order.
std::vector<std::vector<int>> combinations(int n, int k, const std::vector<char>& forbidden) {
  std::vector<int> pool;
  for (int i = 0; i < n; ++i) {
    if (forbidden.empty() || !forbidden[i]) pool.push_back(i);
  }
  std::vector<std::vector<int>> out;
  const int m = static_cast<int>(pool.size());
  if (k < 0 || k > m) return out;
  std::vector<int> pick(k);
  for (int i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    std::vector<int> combo(k);
    for (int i = 0; i < k; ++i) combo[i] = pool[pick[i]];
    out.push_back(std::move(combo));
    int i = k - 1;
    while (i >= 0 && pick[i] == m - k + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

struct VectorHash {
  std::size_t operator()(const std::vector<int>& v) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (int x : v) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
    return h;
  }
};

/// Exclusion cuts: a candidate is excluded if it contains every member of
/// some previously found set.
class CutSet {
 public:
  CutSet(int size) : size_(size) {}

  void add(std::vector<int> cut) {
    if (static_cast<int>(cut.size()) == size_) same_size_.insert(std::move(cut));
    else other_.push_back(std::move(cut));
  }

  bool excludes(const std::vector<int>& candidate) const {
    if (same_size_.contains(candidate)) return true;
    for (const auto& cut : other_) {
      if (std::includes(candidate.begin(), candidate.end(), cut.begin(), cut.end())) return true;
    }
    return false;
  }

 private:
  int size_;
  std::unordered_set<std::vector<int>, VectorHash> same_size_;
  std::vector<std::vector<int>> other_;
};

/// First admissible candidate at or after `from` in ranking order.
std::size_t next_admissible(const std::vector<AttackEvaluator::Candidate>& ranked,
                            const CutSet& cuts, std::size_t from) {
  while (from < ranked.size() && cuts.excludes(ranked[from].members)) ++from;
  return from;
}

void check_budget(const AttackEvaluator& eval, int z_max) {
  const int n = static_cast<int>(eval.universe().size());
  if (z_max < 0 || z_max > n)
    throw InputError(InputError::Kind::domain,
                     "attack budget " + std::to_string(z_max) + " outside [0, " +
                         std::to_string(n) + "] attackable components");
}

std::vector<AttackEvaluator::Candidate> ranked_candidates(AttackEvaluator& eval, int z_max) {
  auto all = eval.evaluate_all(z_max);
  std::stable_sort(all.begin(), all.end(), ranks_before);
  return all;
}

}  // namespace

AttackEvaluator::AttackEvaluator(const GridCase& grid, unsigned jobs)
    : model_(grid), jobs_(jobs), total_demand_(grid.total_demand_mw()) {
  universe_ = model_.grid().attackable_components();
  for (const auto& ref : universe_) {
    const auto idx = ref.kind == ComponentKind::branch ? model_.grid().find_branch(ref.id)
                                                       : model_.grid().find_generator(ref.id);
    grid_index_.push_back(static_cast<int>(*idx));
  }
}

AttackVector AttackEvaluator::to_attack(std::span<const int> members) const {
  AttackVector a;
  for (int m : members) a.insert(universe_[m]);
  return a;
}

std::optional<std::vector<int>> AttackEvaluator::to_indices(const AttackVector& attack) const {
  std::vector<int> out;
  for (const auto& ref : attack.sorted()) {
    auto it = std::lower_bound(universe_.begin(), universe_.end(), ref);
    if (it == universe_.end() || *it != ref) return std::nullopt;
    out.push_back(static_cast<int>(it - universe_.begin()));
  }
  return out;
}

double AttackEvaluator::solve_subset(std::span<const int> members) const {
  std::vector<int> branches;
  std::vector<int> gens;
  for (int m : members) {
    (universe_[m].kind == ComponentKind::branch ? branches : gens).push_back(grid_index_[m]);
  }
  return snap_lost_load(model_.lost_load(branches, gens));
}

double AttackEvaluator::lost_load(std::span<const int> members) {
  std::vector<int> key(members.begin(), members.end());
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const double v = solve_subset(key);
  std::lock_guard lock(cache_mutex_);
  ++lp_solves_;
  cache_.emplace(std::move(key), v);
  return v;
}

std::vector<AttackEvaluator::Candidate> AttackEvaluator::evaluate_all(
    int size, const std::vector<char>& forbidden) {
  const int n = static_cast<int>(universe_.size());
  auto combos = combinations(n, size, forbidden);

  // Singletons that already shed every MW make any superset a full blackout.
  std::vector<char> blackout(n, 0);
  if (size >= 2 && total_demand_ > 0.0) {
    std::vector<std::vector<int>> singles;
    for (int i = 0; i < n; ++i) {
      if (forbidden.empty() || !forbidden[i]) singles.push_back({i});
    }
    std::vector<double> single_values(singles.size());
    parallel_for(singles.size(), jobs_,
                 [&](std::size_t i) { single_values[i] = lost_load(singles[i]); });
    for (std::size_t i = 0; i < singles.size(); ++i) {
      if (single_values[i] >= snap_lost_load(total_demand_)) blackout[singles[i][0]] = 1;
    }
  }

  std::vector<Candidate> out(combos.size());
  std::vector<std::size_t> pending;
  {
    std::lock_guard lock(cache_mutex_);
    for (std::size_t c = 0; c < combos.size(); ++c) {
      out[c].members = combos[c];
      if (auto it = cache_.find(combos[c]); it != cache_.end()) {
        out[c].lost_load_mw = it->second;
      } else if (std::any_of(combos[c].begin(), combos[c].end(),
                             [&blackout](int m) { return blackout[m] != 0; })) {
        out[c].lost_load_mw = snap_lost_load(total_demand_);
      } else {
        pending.push_back(c);
      }
    }
  }

  parallel_for(pending.size(), jobs_, [&](std::size_t p) {
    const std::size_t c = pending[p];
    out[c].lost_load_mw = solve_subset(out[c].members);
  });

  std::lock_guard lock(cache_mutex_);
  lp_solves_ += pending.size();
  for (const auto& cand : out) cache_.emplace(cand.members, cand.lost_load_mw);
  return out;
}

bool ranks_before(const AttackEvaluator::Candidate& a, const AttackEvaluator::Candidate& b) {
  if (a.lost_load_mw != b.lost_load_mw) return a.lost_load_mw > b.lost_load_mw;
  return a.members < b.members;
}

WorstCase worst_case_attack(const GridCase& grid, int z_max,
                            std::span<const AttackVector> exclusions, unsigned jobs) {
  AttackEvaluator eval(grid, jobs);
  check_budget(eval, z_max);

  CutSet cuts(z_max);
  for (const auto& ex : exclusions) {
    // A cut naming a component outside the universe can never bind.
    if (auto idx = eval.to_indices(ex)) cuts.add(std::move(*idx));
  }
  const auto ranked = ranked_candidates(eval, z_max);
  const std::size_t pick = next_admissible(ranked, cuts, 0);
  if (pick == ranked.size())
    throw ExhaustedError("no admissible attack of size " + std::to_string(z_max) +
                         " remains on grid '" + grid.name + "'");
  return {eval.to_attack(ranked[pick].members), ranked[pick].lost_load_mw};
}

CasList enumerate_cas(const GridCase& grid, int z_max, const StopRule& stop, unsigned jobs) {
  if (z_max < 1) throw InputError(InputError::Kind::domain, "enumeration needs z_max >= 1");
  if (!(std::isfinite(stop.min_lost_load_mw) && stop.min_lost_load_mw >= 0.0))
    throw InputError(InputError::Kind::domain, "min_lost_load_mw must be finite and >= 0");

  AttackEvaluator eval(grid, jobs);
  check_budget(eval, z_max);

  CasList list;
  list.z_max = z_max;
  list.source_grid = grid.name;

  const auto ranked = ranked_candidates(eval, z_max);
  CutSet cuts(z_max);
  std::size_t cursor = next_admissible(ranked, cuts, 0);
  while (cursor < ranked.size()) {
    if (stop.max_scenarios && list.records.size() >= *stop.max_scenarios) break;
    const auto& best = ranked[cursor];
    if (best.lost_load_mw < stop.min_lost_load_mw) break;

    CasRecord rec;
    rec.rank = static_cast<int>(list.records.size()) + 1;
    rec.components = eval.to_attack(best.members);
    rec.lost_load_mw = best.lost_load_mw;
    rec.configuration_label = grid.configuration_label;
    list.records.push_back(std::move(rec));

    cuts.add(best.members);
    cursor = next_admissible(ranked, cuts, cursor);
  }
  list.complete = cursor == ranked.size();
  return list;
}

namespace {

std::string join_labels(const std::set<std::string>& labels) {
  std::string out;
  for (const auto& l : labels) {
    if (!out.empty()) out += '+';
    out += l;
  }
  return out;
}

std::set<std::string> split_labels(const std::string& label) {
  std::set<std::string> out;
  std::size_t start = 0;
  while (start <= label.size()) {
    const std::size_t end = std::min(label.find('+', start), label.size());
    if (end > start) out.insert(label.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

}  // namespace

CasList merge_cas_lists(std::span<const CasList> lists) {
  if (lists.empty()) throw InputError(InputError::Kind::domain, "merge needs at least one CAS list");

  CasList out;
  out.z_max = lists.front().z_max;
  out.source_grid = lists.front().source_grid;
  out.complete = true;

  struct Entry {
    double lost_load_mw = 0.0;
    std::set<std::string> labels;
  };
  std::map<std::vector<ComponentRef>, Entry> merged;
  for (const auto& list : lists) {
    if (list.z_max != out.z_max)
      throw InputError(InputError::Kind::domain,
                       "cannot merge CAS lists with z_max " + std::to_string(out.z_max) + " and " +
                           std::to_string(list.z_max));
    if (list.source_grid != out.source_grid)
      throw InputError(InputError::Kind::reference,
                       "cannot merge CAS lists of grids '" + out.source_grid + "' and '" +
                           list.source_grid + "'");
    out.complete = out.complete && list.complete;
    for (const auto& rec : list.records) {
      auto [it, inserted] = merged.try_emplace(rec.components.sorted());
      Entry& e = it->second;
      e.lost_load_mw = inserted ? rec.lost_load_mw : std::max(e.lost_load_mw, rec.lost_load_mw);
      e.labels.merge(split_labels(rec.configuration_label));
    }
  }

  for (auto& [components, entry] : merged) {
    CasRecord rec;
    rec.components = make_component_set(components);
    rec.lost_load_mw = snap_lost_load(entry.lost_load_mw);
    rec.configuration_label = join_labels(entry.labels);
    out.records.push_back(std::move(rec));
  }
  // std::map iteration is already lexicographic, so a stable sort on lost
  // load alone yields the tie-break order.
  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const CasRecord& a, const CasRecord& b) { return a.lost_load_mw > b.lost_load_mw; });
  for (std::size_t i = 0; i < out.records.size(); ++i) out.records[i].rank = static_cast<int>(i) + 1;
  return out;
}

std::vector<std::string> check_cas_list(const CasList& list) {
  std::vector<std::string> problems;
  if (list.z_max < 0) problems.push_back("z_max must be >= 0");
  std::set<std::vector<ComponentRef>> seen;
  for (std::size_t i = 0; i < list.records.size(); ++i) {
    const auto& r = list.records[i];
    const std::string tag = "record " + std::to_string(i + 1);
    if (r.rank != static_cast<int>(i) + 1) problems.push_back(tag + ": rank is " + std::to_string(r.rank));
    if (!(std::isfinite(r.lost_load_mw) && r.lost_load_mw >= 0.0))
      problems.push_back(tag + ": lost_load_mw must be finite and >= 0");
    if (i > 0 && r.lost_load_mw > list.records[i - 1].lost_load_mw)
      problems.push_back(tag + ": lost load increases with rank");
    if (r.components.empty() || static_cast<int>(r.components.size()) > list.z_max)
      problems.push_back(tag + ": needs between 1 and z_max components");
    if (!seen.insert(r.components.sorted()).second) problems.push_back(tag + ": duplicate component set");
  }
  return problems;
}

std::string cas_list_to_json(const CasList& list) {
  json doc = json::object();
  doc["source_grid"] = list.source_grid;
  doc["z_max"] = list.z_max;
  doc["complete"] = list.complete;
  doc["records"] = json::array();
  for (const auto& r : list.records) {
    doc["records"].push_back({{"rank", r.rank},
                              {"components",
                               {{"branches", r.components.branches},
                                {"generators", r.components.generators}}},
                              {"lost_load_mw", r.lost_load_mw},
                              {"configuration_label", r.configuration_label}});
  }
  return doc.dump(2) + "\n";
}

namespace {

ComponentSet parse_component_set(const json& v, const std::string& path) {
  ComponentSet set;
  if (!v.is_object()) detail::field_error(path, "expected an object");
  for (const char* key : {"branches", "generators"}) {
    auto it = v.find(key);
    if (it == v.end()) continue;
    const std::string p = path + "." + key;
    const auto& arr = detail::as_array(*it, p);
    const ComponentKind kind =
        std::string_view(key) == "branches" ? ComponentKind::branch : ComponentKind::generator;
    for (std::size_t i = 0; i < arr.size(); ++i)
      set.insert({kind, detail::as_id(arr[i], p + "[" + std::to_string(i) + "]")});
  }
  return set;
}

}  // namespace

CasList parse_cas_list(std::string_view text) {
  const json doc = detail::parse_json(text, "CAS list");
  if (!doc.is_object()) detail::field_error("cas", "expected a JSON object");
  CasList list;
  list.source_grid = detail::as_string(detail::require(doc, "source_grid", "cas"), "cas.source_grid");
  list.z_max = static_cast<int>(detail::as_integer(detail::require(doc, "z_max", "cas"), "cas.z_max"));
  list.complete = detail::as_bool(detail::require(doc, "complete", "cas"), "cas.complete");
  const auto& records = detail::as_array(detail::require(doc, "records", "cas"), "cas.records");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string p = "records[" + std::to_string(i) + "]";
    CasRecord r;
    r.rank = static_cast<int>(detail::as_integer(detail::require(records[i], "rank", p), p + ".rank"));
    r.components =
        parse_component_set(detail::require(records[i], "components", p), p + ".components");
    r.lost_load_mw =
        detail::as_number(detail::require(records[i], "lost_load_mw", p), p + ".lost_load_mw");
    if (auto it = records[i].find("configuration_label"); it != records[i].end())
      r.configuration_label = detail::as_string(*it, p + ".configuration_label");
    list.records.push_back(std::move(r));
  }
  if (const auto problems = check_cas_list(list); !problems.empty())
    throw InputError(InputError::Kind::domain, "CAS list: " + problems.front());
  return list;
}

CasList load_cas_list(const std::filesystem::path& path) {
  return parse_cas_list(read_text_file(path));
}

}  // namespace gridshield
