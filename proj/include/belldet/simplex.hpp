#pragma once

#include <span>
#include <vector>

namespace belldet {

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit, kNumericalFailure };

struct SimplexOptions {
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  int max_pivots = 500000;
  int refactor_every = 64;    // rebuild the basis inverse this often
  int bland_trigger = 64;     // consecutive degenerate pivots before Bland's rule
};

// Dense revised simplex for  min c.z  s.t.  A z = b, z >= 0,  with columns
// added dynamically (column generation). Keeps an explicit basis inverse with
// periodic refactorization; Dantzig pricing, falling back to Bland's rule
// under degeneracy stalls.
class DenseSimplex {
 public:
  explicit DenseSimplex(int rows, SimplexOptions opts = {});

  int rows() const { return rows_; }
  int cols() const { return int(cols_.size()); }

  int add_column(std::span<const double> column, double cost);
  void set_cost(int j, double cost);
  void set_rhs(std::span<const double> b);
  // Banned columns never enter the basis (used to retire artificials).
  void ban_column(int j);

  // basis holds one column id per row and must be feasible (B^-1 b >= -tol);
  // it is updated in place. Returns kInfeasible when the starting basis is
  // not feasible for the current rhs.
  SolveStatus solve(std::vector<int>& basis);

  double objective() const { return objective_; }
  // z values per column, nonbasic entries zero. Valid after solve().
  std::vector<double> primal() const;
  // pi = c_B B^-1. Valid after solve().
  const std::vector<double>& duals() const { return pi_; }
  int pivots() const { return pivots_; }

 private:
  bool factorize();
  void compute_xb();
  void compute_duals();

  int rows_;
  SimplexOptions opts_;
  std::vector<std::vector<double>> cols_;
  std::vector<double> costs_;
  std::vector<char> banned_;
  std::vector<double> b_;
  std::vector<double> binv_;  // rows x rows, row-major
  std::vector<int> basis_;
  std::vector<char> in_basis_;
  std::vector<double> xb_;
  std::vector<double> pi_;
  double objective_ = 0;
  int pivots_ = 0;
};

// max objective.x  s.t.  rows[i].x <= rhs[i], x free. Two-phase standard-form
// driver used by the solver self-tests and other small dense instances.
struct InequalityLpResult {
  SolveStatus status = SolveStatus::kNumericalFailure;
  double objective = 0;
  std::vector<double> x;
};

InequalityLpResult solve_inequality_form(int nvars,
                                         const std::vector<std::vector<double>>& rows,
                                         const std::vector<double>& rhs,
                                         const std::vector<double>& objective,
                                         SimplexOptions opts = {});

}  // namespace belldet
