#pragma once

#include <string>
#include <vector>

#include "gridshield/cas.hpp"
#include "gridshield/component.hpp"
#include "gridshield/grid_model.hpp"

namespace gridshield {

// Slow, obviously-correct reference solvers. They share only the dispatch LP
// with the production path; enumeration and search are re-implemented here
// with plain nested loops.

struct TrilevelResult {
  ComponentSet protected_components;
  double worst_case_lost_load_mw = 0.0;
  AttackVector worst_attack;
  /// The optimal protection leaves fewer than z_max attackable components.
  bool exhausted = false;
};

/// Hard input-size guard for brute_force_trilevel: C(n, x_max) * C(n, z_max).
inline constexpr double kTrilevelGuard = 1e7;
/// Guard for brute_force_protection_ip when more than 12 components appear.
inline constexpr double kProtectionIpGuard = 1e6;

/// min over protected sets (|P| <= x_max) of max over size-z_max attacks
/// avoiding P of the dispatch lost load. Ties: lexicographically smallest
/// protected set, then attack. Throws GuardError beyond kTrilevelGuard.
TrilevelResult brute_force_trilevel(const GridCase& grid, int x_max, int z_max, unsigned jobs = 0);

struct ProtectionIpResult {
  int objective = 0;
  std::vector<ComponentSet> plans;  // every optimal set, in enumeration order
};

/// Scans every subset of at most x_max listed components and counts the
/// leading run of scenarios it intersects.
ProtectionIpResult brute_force_protection_ip(const CasList& cas, int x_max);

/// Plan-style JSON: budget, protected, remaining_worst_case_mw, worst_attack.
std::string trilevel_to_json(const TrilevelResult& result, int x_max, int z_max);

}  // namespace gridshield
