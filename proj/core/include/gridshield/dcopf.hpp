#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>

#include "gridshield/component.hpp"
#include "gridshield/grid_model.hpp"

namespace gridshield {

/// Lower-level response to a fixed attack: minimum total load shedding
/// under DC power flow.
struct DispatchResult {
  std::map<std::string, double> shed_mw;    // per bus
  std::map<std::string, double> gen_mw;     // per generator
  std::map<std::string, double> flow_mw;    // per branch, from -> to
  std::map<std::string, double> angle_rad;  // per bus
  double lost_load_mw = 0.0;

  double max_balance_residual_mw = 0.0;
  double max_flow_residual_mw = 0.0;
};

/// Contract tolerance on bus balance and flow-equation residuals (MW).
inline constexpr double kResidualTolerance = 1e-6;

/// Angles outside this range indicate an ill-posed island; solves that land
/// there are reported as failures.
inline constexpr double kAngleBound = 1e4;

/// Precomputed index structure for repeated solves on one grid. Immutable
/// after construction; solve() is safe to call concurrently.
class DcopfModel {
 public:
  explicit DcopfModel(const GridCase& grid);

  const GridCase& grid() const { return grid_; }

  /// Throws InputError if the attack names non-attackable components.
  DispatchResult solve(const AttackVector& attack) const;

  /// Fast path used by the enumerators: attacked branches and generators
  /// given as indices into grid().branches / grid().generators.
  double lost_load(std::span<const int> attacked_branches,
                   std::span<const int> attacked_generators) const;

 private:
  DispatchResult solve_indexed(std::span<const int> attacked_branches,
                               std::span<const int> attacked_generators,
                               bool fill_maps) const;

  GridCase grid_;
  std::vector<int> from_;
  std::vector<int> to_;
  std::vector<int> gen_bus_;
  int reference_ = 0;
};

/// Solves min sum(shed) s.t. DC balance, flow equations, generator and
/// branch limits with the attacked components removed. Throws SolverError
/// when the LP engine cannot certify an optimum or a contract residual
/// exceeds kResidualTolerance.
DispatchResult solve_dcopf(const GridCase& grid, const AttackVector& attack);

double total_lost_load(const DispatchResult& result);

std::string dispatch_to_json(const DispatchResult& result);

/// Process-wide counters over every dispatch solve.
struct SolveStats {
  std::uint64_t solves = 0;
  double max_balance_residual_mw = 0.0;
  double max_flow_residual_mw = 0.0;
};

SolveStats solve_stats();
void reset_solve_stats();

}  // namespace gridshield
