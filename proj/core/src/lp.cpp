#include "gridshield/lp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace gridshield::lp {

int Problem::add_variable(double cost, double lower, double upper) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper)
    throw std::invalid_argument("lp::Problem: invalid variable bounds");
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  return num_variables() - 1;
}

int Problem::add_equality(std::span<const Term> terms, double rhs) {
  for (const auto& t : terms) {
    if (t.column < 0 || t.column >= num_variables())
      throw std::out_of_range("lp::Problem: term references unknown column");
  }
  rows_.emplace_back(terms.begin(), terms.end());
  rhs_.push_back(rhs);
  return num_rows() - 1;
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration_limit";
    case Status::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

class BoundedSimplex {
 public:
  BoundedSimplex(const Problem& p, const Options& opt) : opt_(opt) {
    m_ = p.num_rows();
    n_ = p.num_variables();
    cols_ = n_ + m_;

    full_ = Eigen::MatrixXd::Zero(m_, cols_);
    for (int i = 0; i < m_; ++i) {
      for (const auto& t : p.rows()[i]) full_(i, t.column) += t.coefficient;
    }
    rhs_ = Eigen::Map<const Eigen::VectorXd>(p.rhs().data(), m_);

    lower_.assign(cols_, 0.0);
    upper_.assign(cols_, kInfinity);
    x_.assign(cols_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lower_[j] = p.lower()[j];
      upper_[j] = p.upper()[j];
      x_[j] = std::clamp(0.0, lower_[j], upper_[j]);
    }
    cost_.assign(cols_, 0.0);
    std::copy(p.cost().begin(), p.cost().end(), cost_.begin());

    // Artificial columns absorb the initial residual with a sign that keeps
    // them nonnegative, which makes the identity basis feasible for phase 1.
    Eigen::VectorXd xs = Eigen::Map<const Eigen::VectorXd>(x_.data(), n_);
    const Eigen::VectorXd r = rhs_ - full_.leftCols(n_) * xs;
    basis_.resize(m_);
    position_.assign(cols_, -1);
    for (int i = 0; i < m_; ++i) {
      const int a = n_ + i;
      full_(i, a) = r(i) >= 0.0 ? 1.0 : -1.0;
      x_[a] = std::abs(r(i));
      basis_[i] = a;
      position_[a] = i;
    }
    tableau_.resize(m_, cols_);
    for (int i = 0; i < m_; ++i) tableau_.row(i) = full_.row(i) * full_(i, n_ + i);
  }

  Solution run() {
    Solution sol;
    std::vector<double> phase1(cols_, 0.0);
    for (int i = 0; i < m_; ++i) phase1[n_ + i] = 1.0;

    Status st = optimize(phase1);
    if (st != Status::optimal) return finish(sol, st);
    double infeasibility = 0.0;
    for (int i = 0; i < m_; ++i) infeasibility += x_[n_ + i];
    if (infeasibility > opt_.primal_tolerance * std::max(1.0, rhs_.lpNorm<Eigen::Infinity>()) * m_)
      return finish(sol, Status::infeasible);

    for (int i = 0; i < m_; ++i) {
      upper_[n_ + i] = 0.0;
      x_[n_ + i] = 0.0;
    }
    if (!refactor()) return finish(sol, Status::numerical_failure);
    st = optimize(cost_);
    return finish(sol, st);
  }

 private:
  Solution& finish(Solution& sol, Status st) {
    sol.status = st;
    sol.iterations = iterations_;
    if (st != Status::optimal) return sol;
    sol.values.assign(x_.begin(), x_.begin() + n_);
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += cost_[j] * x_[j];
    sol.objective = obj;
    Eigen::VectorXd xs = Eigen::Map<const Eigen::VectorXd>(sol.values.data(), n_);
    sol.max_row_residual =
        m_ == 0 ? 0.0 : (full_.leftCols(n_) * xs - rhs_).lpNorm<Eigen::Infinity>();
    return sol;
  }

  bool enterable(int j) const {
    return position_[j] < 0 && upper_[j] > lower_[j] && (j < n_ || upper_[j] > 0.0);
  }

  // Recomputes B^-1 [A|D] and the basic values from the original data.
  bool refactor() {
    if (m_ == 0) return true;
    Eigen::MatrixXd bmat(m_, m_);
    for (int i = 0; i < m_; ++i) bmat.col(i) = full_.col(basis_[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
    if (std::abs(lu.determinant()) < 1e-300) return false;
    tableau_ = lu.solve(full_);
    Eigen::VectorXd nonbasic_rhs = rhs_;
    for (int j = 0; j < cols_; ++j) {
      if (position_[j] < 0 && x_[j] != 0.0) nonbasic_rhs -= full_.col(j) * x_[j];
    }
    const Eigen::VectorXd xb = lu.solve(nonbasic_rhs);
    for (int i = 0; i < m_; ++i) x_[basis_[i]] = xb(i);
    since_refactor_ = 0;
    return tableau_.allFinite();
  }

  Status optimize(const std::vector<double>& cost) {
    Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(cost.data(), cols_);
    Eigen::VectorXd cb(m_);
    int degenerate_streak = 0;
    int clean_checks = 0;

    while (true) {
      if (iterations_ >= opt_.max_iterations) return Status::iteration_limit;
      for (int i = 0; i < m_; ++i) cb(i) = c(basis_[i]);
      const Eigen::VectorXd reduced = c - tableau_.transpose() * cb;

      const bool bland = degenerate_streak > 50;
      int entering = -1;
      int direction = 0;
      double best = 0.0;
      for (int j = 0; j < cols_; ++j) {
        if (!enterable(j)) continue;
        const double d = reduced(j);
        int dir = 0;
        if (d < -opt_.dual_tolerance && x_[j] < upper_[j]) dir = 1;
        else if (d > opt_.dual_tolerance && x_[j] > lower_[j]) dir = -1;
        if (dir == 0) continue;
        if (bland) {
          entering = j;
          direction = dir;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          entering = j;
          direction = dir;
        }
      }

      if (entering < 0) {
        // Confirm optimality on a freshly factorized tableau.
        if (since_refactor_ == 0 || clean_checks > 2) return primal_ok() ? Status::optimal
                                                                           : Status::numerical_failure;
        ++clean_checks;
        if (!refactor()) return Status::numerical_failure;
        continue;
      }

      // Ratio test: x_q moves by direction * t, basic i by -direction * t * alpha_i.
      const auto alpha = tableau_.col(entering);
      double step = direction > 0 ? upper_[entering] - x_[entering]
                                  : x_[entering] - lower_[entering];
      int leaving_row = -1;
      double leaving_pivot = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (std::abs(alpha(i)) <= opt_.pivot_tolerance) continue;
        const double rate = -direction * alpha(i);
        const int b = basis_[i];
        double limit = kInfinity;
        if (rate < 0.0 && std::isfinite(lower_[b]))
          limit = std::max(0.0, (x_[b] - lower_[b]) / -rate);
        else if (rate > 0.0 && std::isfinite(upper_[b]))
          limit = std::max(0.0, (upper_[b] - x_[b]) / rate);
        if (!std::isfinite(limit)) continue;

        bool take = false;
        if (limit < step - 1e-12) {
          take = true;
        } else if (leaving_row >= 0 && limit <= step + 1e-12) {
          take = bland ? b < basis_[leaving_row] : std::abs(alpha(i)) > std::abs(leaving_pivot);
        }
        if (take) {
          step = limit;
          leaving_row = i;
          leaving_pivot = alpha(i);
        }
      }
      if (!std::isfinite(step)) return Status::unbounded;

      ++iterations_;
      degenerate_streak = step <= 1e-12 ? degenerate_streak + 1 : 0;

      x_[entering] += direction * step;
      for (int i = 0; i < m_; ++i) x_[basis_[i]] -= direction * step * alpha(i);

      if (leaving_row < 0) continue;  // bound flip, basis unchanged

      const int leaving = basis_[leaving_row];
      const double rate = -direction * leaving_pivot;
      x_[leaving] = rate < 0.0 ? lower_[leaving] : upper_[leaving];
      pivot(leaving_row, entering);
      position_[leaving] = -1;
      basis_[leaving_row] = entering;
      position_[entering] = leaving_row;
      clean_checks = 0;

      if (++since_refactor_ >= opt_.refactor_interval && !refactor())
        return Status::numerical_failure;
    }
  }

  void pivot(int row, int col) {
    Eigen::VectorXd column = tableau_.col(col);
    tableau_.row(row) /= column(row);
    column(row) = 0.0;
    tableau_.noalias() -= column * tableau_.row(row);
    tableau_(row, col) = 1.0;
  }

  bool primal_ok() const {
    const double scale = std::max(1.0, rhs_.size() ? rhs_.lpNorm<Eigen::Infinity>() : 0.0);
    const double tol = 1e-7 * scale;
    for (int j = 0; j < cols_; ++j) {
      if (x_[j] < lower_[j] - tol || x_[j] > upper_[j] + tol) return false;
    }
    return true;
  }

  Options opt_;
  int m_ = 0;
  int n_ = 0;
  int cols_ = 0;
  Eigen::MatrixXd full_;
  Eigen::MatrixXd tableau_;
  Eigen::VectorXd rhs_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> x_;
  std::vector<double> cost_;
  std::vector<int> basis_;
  std::vector<int> position_;
  int iterations_ = 0;
  int since_refactor_ = 1;
};

}  // namespace

Solution solve(const Problem& problem, const Options& options) {
  BoundedSimplex simplex(problem, options);
  return simplex.run();
}

}  // namespace gridshield::lp
