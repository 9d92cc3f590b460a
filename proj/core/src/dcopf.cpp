#include "gridshield/dcopf.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

#include "gridshield/errors.hpp"
#include "gridshield/lp.hpp"
#include "json_util.hpp"

namespace gridshield {

namespace {

std::atomic<std::uint64_t> g_solves{0};
std::atomic<double> g_max_balance{0.0};
std::atomic<double> g_max_flow{0.0};

void atomic_max(std::atomic<double>& target, double value) {
  double cur = target.load(std::memory_order_relaxed);
  while (value > cur && !target.compare_exchange_weak(cur, value, std::memory_order_relaxed)) {
  }
}

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

DcopfModel::DcopfModel(const GridCase& grid) : grid_(grid) {
  const auto diags = validate(grid_);
  if (!diags.empty())
    throw InputError(InputError::Kind::domain, "invalid grid: " + to_string(diags.front()));
  for (const auto& br : grid_.branches) {
    from_.push_back(static_cast<int>(*grid_.find_bus(br.from_bus)));
    to_.push_back(static_cast<int>(*grid_.find_bus(br.to_bus)));
  }
  for (const auto& g : grid_.generators) gen_bus_.push_back(static_cast<int>(*grid_.find_bus(g.bus)));
  reference_ = static_cast<int>(*grid_.find_bus(grid_.reference_bus));
}

DispatchResult DcopfModel::solve(const AttackVector& attack) const {
  std::vector<int> branches;
  std::vector<int> gens;
  for (const auto& id : attack.branches) {
    auto idx = grid_.find_branch(id);
    if (!idx) throw InputError(InputError::Kind::reference, "attack: unknown branch '" + id + "'");
    const auto& br = grid_.branches[*idx];
    if (!br.attackable || !br.in_service)
      throw InputError(InputError::Kind::domain,
                       "attack: branch '" + id + "' is not attackable or not in service");
    branches.push_back(static_cast<int>(*idx));
  }
  for (const auto& id : attack.generators) {
    auto idx = grid_.find_generator(id);
    if (!idx)
      throw InputError(InputError::Kind::reference, "attack: unknown generator '" + id + "'");
    if (!grid_.generators[*idx].ict_controlled)
      throw InputError(InputError::Kind::domain,
                       "attack: generator '" + id + "' is not ICT-controlled");
    gens.push_back(static_cast<int>(*idx));
  }
  return solve_indexed(branches, gens, true);
}

double DcopfModel::lost_load(std::span<const int> attacked_branches,
                             std::span<const int> attacked_generators) const {
  return solve_indexed(attacked_branches, attacked_generators, false).lost_load_mw;
}

DispatchResult DcopfModel::solve_indexed(std::span<const int> attacked_branches,
                                         std::span<const int> attacked_generators,
                                         bool fill_maps) const {
  const int nb = static_cast<int>(grid_.buses.size());
  const int nk = static_cast<int>(grid_.branches.size());
  const int ng = static_cast<int>(grid_.generators.size());

  std::vector<char> branch_active(nk, 0);
  for (int k = 0; k < nk; ++k) branch_active[k] = grid_.branches[k].in_service ? 1 : 0;
  for (int k : attacked_branches) branch_active[k] = 0;
  std::vector<char> gen_active(ng, 1);
  for (int g : attacked_generators) gen_active[g] = 0;

  // Each island gets its own angle reference so angles stay determined.
  std::vector<int> parent(nb);
  std::iota(parent.begin(), parent.end(), 0);
  for (int k = 0; k < nk; ++k) {
    if (branch_active[k]) parent[find_root(parent, from_[k])] = find_root(parent, to_[k]);
  }
  std::vector<int> island_ref(nb, -1);
  island_ref[find_root(parent, reference_)] = reference_;
  for (int i = 0; i < nb; ++i) {
    const int r = find_root(parent, i);
    if (island_ref[r] < 0) island_ref[r] = i;
  }

  lp::Problem lp;
  std::vector<int> shed_col(nb);
  std::vector<int> gen_col(ng);
  std::vector<int> flow_col(nk, -1);
  std::vector<int> angle_col(nb);
  for (int i = 0; i < nb; ++i) shed_col[i] = lp.add_variable(1.0, 0.0, grid_.buses[i].demand_mw);
  for (int g = 0; g < ng; ++g)
    gen_col[g] = lp.add_variable(0.0, 0.0, gen_active[g] ? grid_.generators[g].p_max_mw : 0.0);
  for (int k = 0; k < nk; ++k) {
    if (!branch_active[k]) continue;
    const double lim = grid_.branches[k].flow_limit_mw;
    flow_col[k] = lp.add_variable(0.0, -lim, lim);
  }
  for (int i = 0; i < nb; ++i) {
    const bool is_ref = island_ref[find_root(parent, i)] == i;
    angle_col[i] = is_ref ? lp.add_variable(0.0, 0.0, 0.0)
                          : lp.add_variable(0.0, -lp::kInfinity, lp::kInfinity);
  }

  std::vector<std::vector<lp::Term>> balance(nb);
  for (int i = 0; i < nb; ++i) balance[i].push_back({shed_col[i], 1.0});
  for (int g = 0; g < ng; ++g) balance[gen_bus_[g]].push_back({gen_col[g], 1.0});
  for (int k = 0; k < nk; ++k) {
    if (flow_col[k] < 0) continue;
    balance[from_[k]].push_back({flow_col[k], -1.0});
    balance[to_[k]].push_back({flow_col[k], 1.0});
  }
  for (int i = 0; i < nb; ++i) lp.add_equality(balance[i], grid_.buses[i].demand_mw);
  for (int k = 0; k < nk; ++k) {
    if (flow_col[k] < 0) continue;
    const double b = grid_.branches[k].susceptance;
    const lp::Term terms[] = {{flow_col[k], 1.0}, {angle_col[from_[k]], -b}, {angle_col[to_[k]], b}};
    lp.add_equality(terms, 0.0);
  }

  const lp::Solution sol = lp::solve(lp);
  if (sol.status != lp::Status::optimal)
    throw SolverError("dispatch LP for grid '" + grid_.name + "' ended with status " +
                      std::string(lp::to_string(sol.status)));

  const auto& v = sol.values;
  auto clamp_to = [&lp, &v](int col) {
    return std::clamp(v[col], lp.lower()[col], lp.upper()[col]);
  };

  std::vector<double> shed(nb), gen(ng), flow(nk, 0.0), angle(nb);
  for (int i = 0; i < nb; ++i) shed[i] = clamp_to(shed_col[i]);
  for (int g = 0; g < ng; ++g) gen[g] = clamp_to(gen_col[g]);
  for (int k = 0; k < nk; ++k) flow[k] = flow_col[k] < 0 ? 0.0 : clamp_to(flow_col[k]);
  for (int i = 0; i < nb; ++i) angle[i] = v[angle_col[i]];

  DispatchResult out;
  std::vector<double> residual(nb, 0.0);
  for (int i = 0; i < nb; ++i) residual[i] = shed[i] - grid_.buses[i].demand_mw;
  for (int g = 0; g < ng; ++g) residual[gen_bus_[g]] += gen[g];
  for (int k = 0; k < nk; ++k) {
    residual[from_[k]] -= flow[k];
    residual[to_[k]] += flow[k];
    if (flow_col[k] >= 0) {
      const double expect = grid_.branches[k].susceptance * (angle[from_[k]] - angle[to_[k]]);
      out.max_flow_residual_mw = std::max(out.max_flow_residual_mw, std::abs(flow[k] - expect));
    }
  }
  for (double r : residual) out.max_balance_residual_mw = std::max(out.max_balance_residual_mw, std::abs(r));
  out.lost_load_mw = std::accumulate(shed.begin(), shed.end(), 0.0);

  g_solves.fetch_add(1, std::memory_order_relaxed);
  atomic_max(g_max_balance, out.max_balance_residual_mw);
  atomic_max(g_max_flow, out.max_flow_residual_mw);

  if (out.max_balance_residual_mw > kResidualTolerance || out.max_flow_residual_mw > kResidualTolerance)
    throw SolverError("dispatch residual above tolerance on grid '" + grid_.name + "'");
  for (double a : angle) {
    if (!(std::abs(a) <= kAngleBound))
      throw SolverError("voltage angle bound active on grid '" + grid_.name + "'");
  }

  if (fill_maps) {
    for (int i = 0; i < nb; ++i) {
      out.shed_mw[grid_.buses[i].id] = shed[i];
      out.angle_rad[grid_.buses[i].id] = angle[i];
    }
    for (int g = 0; g < ng; ++g) out.gen_mw[grid_.generators[g].id] = gen[g];
    for (int k = 0; k < nk; ++k) out.flow_mw[grid_.branches[k].id] = flow[k];
  }
  return out;
}

DispatchResult solve_dcopf(const GridCase& grid, const AttackVector& attack) {
  return DcopfModel(grid).solve(attack);
}

double total_lost_load(const DispatchResult& result) {
  double total = 0.0;
  for (const auto& [bus, shed] : result.shed_mw) total += shed;
  return total;
}

std::string dispatch_to_json(const DispatchResult& result) {
  detail::json doc = detail::json::object();
  doc["lost_load_mw"] = result.lost_load_mw;
  doc["shed_mw"] = result.shed_mw;
  doc["gen_mw"] = result.gen_mw;
  doc["flow_mw"] = result.flow_mw;
  doc["angle_rad"] = result.angle_rad;
  return doc.dump(2) + "\n";
}

SolveStats solve_stats() {
  return {g_solves.load(), g_max_balance.load(), g_max_flow.load()};
}

void reset_solve_stats() {
  g_solves = 0;
  g_max_balance = 0.0;
  g_max_flow = 0.0;
}

}  // namespace gridshield
