#pragma once

#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace gridshield::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Term {
  int column;
  double coefficient;
};

/// min c'x  s.t.  A x = b,  lower <= x <= upper.
/// Bounds may be infinite; rows are sparse on input and densified by the solver.
class Problem {
 public:
  int add_variable(double cost, double lower, double upper);
  int add_equality(std::span<const Term> terms, double rhs);

  int num_variables() const { return static_cast<int>(cost_.size()); }
  int num_rows() const { return static_cast<int>(rhs_.size()); }

  const std::vector<double>& cost() const { return cost_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<double>& rhs() const { return rhs_; }
  const std::vector<std::vector<Term>>& rows() const { return rows_; }

 private:
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> rhs_;
  std::vector<std::vector<Term>> rows_;
};

enum class Status { optimal, infeasible, unbounded, iteration_limit, numerical_failure };

std::string_view to_string(Status s);

struct Options {
  double primal_tolerance = 1e-9;
  double dual_tolerance = 1e-9;
  double pivot_tolerance = 1e-9;
  int max_iterations = 100000;
  int refactor_interval = 100;
};

struct Solution {
  Status status = Status::numerical_failure;
  double objective = 0.0;
  std::vector<double> values;
  int iterations = 0;
  /// max |A x - b| at the returned point.
  double max_row_residual = 0.0;
};

/// Two-phase bounded primal simplex on a dense tableau. Nonbasic variables
/// may rest at any value inside their bounds (free columns start at zero).
/// The basis is refactorized with LU periodically and before returning, and
/// optimality is re-checked on the refreshed tableau.
Solution solve(const Problem& problem, const Options& options = {});

}  // namespace gridshield::lp
