#include "gridshield/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gridshield/dcopf.hpp"
#include "gridshield/errors.hpp"
#include "gridshield/parallel.hpp"
#include "json_util.hpp"

namespace gridshield {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Every subset of {0..n-1} with size <= k, ordered lexicographically.
void subsets_up_to(int n, int k, std::vector<int>& current, int start,
                   std::vector<std::vector<int>>& out) {
  out.push_back(current);
  if (static_cast<int>(current.size()) == k) return;
  for (int i = start; i < n; ++i) {
    current.push_back(i);
    subsets_up_to(n, k, current, i + 1, out);
    current.pop_back();
  }
}

void subsets_of_size(const std::vector<int>& pool, int k, std::size_t start,
                     std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == k) {
    out.push_back(current);
    return;
  }
  for (std::size_t i = start; i < pool.size(); ++i) {
    current.push_back(pool[i]);
    subsets_of_size(pool, k, i + 1, current, out);
    current.pop_back();
  }
}

ComponentSet to_set(const std::vector<ComponentRef>& universe, const std::vector<int>& members) {
  ComponentSet s;
  for (int m : members) s.insert(universe[m]);
  return s;
}

}  // namespace

TrilevelResult brute_force_trilevel(const GridCase& grid, int x_max, int z_max, unsigned jobs) {
  if (x_max < 0 || z_max < 0)
    throw InputError(InputError::Kind::domain, "budgets must be >= 0");
  const auto universe = grid.attackable_components();
  const int n = static_cast<int>(universe.size());
  const double work = binomial(n, std::min(x_max, n)) * binomial(n, std::min(z_max, n));
  if (work > kTrilevelGuard)
    throw GuardError("trilevel brute force refused: C(" + std::to_string(n) + "," +
                     std::to_string(x_max) + ")*C(" + std::to_string(n) + "," +
                     std::to_string(z_max) + ") exceeds " + std::to_string(kTrilevelGuard));

  std::vector<std::vector<int>> protections;
  std::vector<int> scratch;
  subsets_up_to(n, std::min(x_max, n), scratch, 0, protections);

  // Every attack any protection admits: size min(z, n - |P|) subsets of the rest.
  std::map<std::vector<int>, double> lost;
  for (const auto& p : protections) {
    std::vector<int> pool;
    for (int i = 0; i < n; ++i) {
      if (!std::binary_search(p.begin(), p.end(), i)) pool.push_back(i);
    }
    const int size = std::min<int>(z_max, static_cast<int>(pool.size()));
    std::vector<std::vector<int>> attacks;
    subsets_of_size(pool, size, 0, scratch, attacks);
    for (auto& a : attacks) lost.try_emplace(std::move(a), 0.0);
  }
  std::vector<const std::vector<int>*> keys;
  std::vector<double*> slots;
  for (auto& [attack, value] : lost) {
    keys.push_back(&attack);
    slots.push_back(&value);
  }
  parallel_for(keys.size(), jobs, [&](std::size_t i) {
    *slots[i] = snap_lost_load(solve_dcopf(grid, to_set(universe, *keys[i])).lost_load_mw);
  });

  TrilevelResult best;
  bool have_best = false;
  for (const auto& p : protections) {
    // Worst admissible attack; std::map order gives the lexicographic tie-break.
    const std::vector<int>* worst = nullptr;
    double worst_value = -1.0;
    std::size_t worst_size = 0;
    for (const auto& [attack, value] : lost) {
      const bool disjoint = std::none_of(attack.begin(), attack.end(), [&p](int m) {
        return std::binary_search(p.begin(), p.end(), m);
      });
      if (!disjoint) continue;
      // Only attacks of the admissible size for this protection count.
      const std::size_t size = std::min<std::size_t>(z_max, n - p.size());
      if (attack.size() != size) continue;
      if (value > worst_value) {
        worst_value = value;
        worst = &attack;
        worst_size = size;
      }
    }
    if (!have_best || worst_value < best.worst_case_lost_load_mw) {
      best.protected_components = to_set(universe, p);
      best.worst_case_lost_load_mw = worst_value;
      best.worst_attack = worst ? to_set(universe, *worst) : ComponentSet{};
      best.exhausted = static_cast<int>(worst_size) < z_max;
      have_best = true;
    }
  }
  return best;
}

ProtectionIpResult brute_force_protection_ip(const CasList& cas, int x_max) {
  if (x_max < 0) throw InputError(InputError::Kind::domain, "protection budget must be >= 0");
  std::vector<ComponentRef> universe;
  for (const auto& rec : cas.records) {
    for (const auto& ref : rec.components.sorted()) universe.push_back(ref);
  }
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  const int n = static_cast<int>(universe.size());
  const int k = std::min(x_max, n);

  double candidates = 0.0;
  for (int i = 0; i <= k; ++i) candidates += binomial(n, i);
  if (n > 12 && candidates > kProtectionIpGuard)
    throw GuardError("protection IP brute force refused: " + std::to_string(n) +
                     " components, budget " + std::to_string(x_max));

  std::vector<std::vector<int>> sets;
  std::vector<int> scratch;
  subsets_up_to(n, k, scratch, 0, sets);

  ProtectionIpResult out;
  out.objective = -1;
  for (const auto& s : sets) {
    const ComponentSet protect = to_set(universe, s);
    int run = 0;
    for (const auto& rec : cas.records) {
      bool hit = false;
      for (const auto& ref : rec.components.sorted()) hit = hit || protect.contains(ref);
      if (!hit) break;
      ++run;
    }
    if (run > out.objective) {
      out.objective = run;
      out.plans.clear();
    }
    if (run == out.objective) out.plans.push_back(protect);
  }
  return out;
}

std::string trilevel_to_json(const TrilevelResult& result, int x_max, int z_max) {
  detail::json doc = detail::json::object();
  doc["budget"] = x_max;
  doc["z_max"] = z_max;
  doc["protected"] = {{"branches", result.protected_components.branches},
                      {"generators", result.protected_components.generators}};
  doc["remaining_worst_case_mw"] = result.worst_case_lost_load_mw;
  doc["worst_attack"] = {{"branches", result.worst_attack.branches},
                         {"generators", result.worst_attack.generators}};
  doc["exhausted"] = result.exhausted;
  return doc.dump(2) + "\n";
}

}  // namespace gridshield
