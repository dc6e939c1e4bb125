#include "belldet/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "belldet/behavior.hpp"  // error types

namespace belldet {

DenseSimplex::DenseSimplex(int rows, SimplexOptions opts)
    : rows_(rows), opts_(opts), b_(rows, 0.0), pi_(rows, 0.0) {
  if (rows < 1) throw InputError("simplex: need at least one row");
}

int DenseSimplex::add_column(std::span<const double> column, double cost) {
  if (int(column.size()) != rows_) throw InputError("simplex: column length mismatch");
  cols_.emplace_back(column.begin(), column.end());
  costs_.push_back(cost);
  banned_.push_back(0);
  in_basis_.push_back(0);
  return int(cols_.size()) - 1;
}

void DenseSimplex::set_cost(int j, double cost) { costs_.at(j) = cost; }

void DenseSimplex::set_rhs(std::span<const double> b) {
  if (int(b.size()) != rows_) throw InputError("simplex: rhs length mismatch");
  b_.assign(b.begin(), b.end());
}

void DenseSimplex::ban_column(int j) { banned_.at(j) = 1; }

// Gauss-Jordan inverse of the basis matrix. A dependent basis column (the
// usual endgame of a long rank-one update drift) is repaired in place by
// swapping in a spare +-e_i column when one is available, instead of giving up.
bool DenseSimplex::factorize() {
  int n = rows_;
  std::vector<double> work(std::size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) work[std::size_t(i) * n + j] = cols_[basis_[j]][i];
  binv_.assign(std::size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i) binv_[std::size_t(i) * n + i] = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(work[std::size_t(col) * n + col]);
    for (int r = col + 1; r < n; ++r) {
      double v = std::abs(work[std::size_t(r) * n + col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best < 1e-12) {
      // Nonbasic unit columns, one candidate per row they cover.
      std::vector<int> unit_col(n, -1);
      for (int j = 0; j < int(cols_.size()); ++j) {
        if (in_basis_[j] || banned_[j]) continue;
        int row = -1;
        bool unit = true;
        for (int i = 0; i < n && unit; ++i) {
          double v = cols_[j][i];
          if (v == 0.0) continue;
          if (row >= 0 || std::abs(v) != 1.0)
            unit = false;
          else
            row = i;
        }
        if (unit && row >= 0 && unit_col[row] < 0) unit_col[row] = j;
      }
      // The transformed column of +-e_p is +-(binv_ column p); pick the
      // (column, pivot row) pair with the largest usable pivot.
      int repl = -1;
      best = 1e-12;
      for (int p = 0; p < n; ++p) {
        if (unit_col[p] < 0) continue;
        for (int r = col; r < n; ++r) {
          double v = std::abs(binv_[std::size_t(r) * n + p]);
          if (v > best) {
            best = v;
            repl = p;
            piv = r;
          }
        }
      }
      if (repl < 0) return false;
      int j_new = unit_col[repl];
      in_basis_[basis_[col]] = 0;
      in_basis_[j_new] = 1;
      basis_[col] = j_new;
      double sgn = 0;
      for (int i = 0; i < n && sgn == 0.0; ++i) sgn = cols_[j_new][i];
      for (int r = 0; r < n; ++r)
        work[std::size_t(r) * n + col] = sgn * binv_[std::size_t(r) * n + repl];
    }
    if (piv != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(work[std::size_t(piv) * n + j], work[std::size_t(col) * n + j]);
        std::swap(binv_[std::size_t(piv) * n + j], binv_[std::size_t(col) * n + j]);
      }
    }
    double inv = 1.0 / work[std::size_t(col) * n + col];
    for (int j = 0; j < n; ++j) {
      work[std::size_t(col) * n + j] *= inv;
      binv_[std::size_t(col) * n + j] *= inv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = work[std::size_t(r) * n + col];
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        work[std::size_t(r) * n + j] -= f * work[std::size_t(col) * n + j];
        binv_[std::size_t(r) * n + j] -= f * binv_[std::size_t(col) * n + j];
      }
    }
  }
  return true;
}

void DenseSimplex::compute_xb() {
  xb_.assign(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double s = 0;
    const double* row = &binv_[std::size_t(i) * rows_];
    for (int j = 0; j < rows_; ++j) s += row[j] * b_[j];
    xb_[i] = s;
  }
}

void DenseSimplex::compute_duals() {
  pi_.assign(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double ci = costs_[basis_[i]];
    if (ci == 0.0) continue;
    const double* row = &binv_[std::size_t(i) * rows_];
    for (int j = 0; j < rows_; ++j) pi_[j] += ci * row[j];
  }
}

SolveStatus DenseSimplex::solve(std::vector<int>& basis) {
  if (int(basis.size()) != rows_) throw InputError("simplex: basis size mismatch");
  basis_ = basis;
  std::fill(in_basis_.begin(), in_basis_.end(), 0);
  for (int j : basis_) in_basis_.at(j) = 1;
  if (!factorize()) return SolveStatus::kNumericalFailure;
  compute_xb();
  for (double v : xb_)
    if (v < -opts_.feas_tol) return SolveStatus::kInfeasible;

  pivots_ = 0;
  int degenerate_run = 0;
  int since_refactor = 0;
  bool bland = false;
  double stall_progress = 0;  // objective decrease since the last counter reset
  std::vector<double> w(rows_);

  for (;;) {
    if (pivots_ >= opts_.max_pivots) {
      basis = basis_;
      compute_duals();
      objective_ = 0;
      for (int i = 0; i < rows_; ++i) objective_ += costs_[basis_[i]] * std::max(xb_[i], 0.0);
      return SolveStatus::kIterationLimit;
    }
    compute_duals();
    int enter = -1;
    double best_red = -opts_.opt_tol;
    for (int j = 0; j < int(cols_.size()); ++j) {
      if (in_basis_[j] || banned_[j]) continue;
      double red = costs_[j];
      const std::vector<double>& col = cols_[j];
      for (int i = 0; i < rows_; ++i) red -= pi_[i] * col[i];
      if (red < best_red) {
        enter = j;
        best_red = red;
        if (bland) break;  // smallest index wins
      }
    }
    if (enter < 0) {
      basis = basis_;
      objective_ = 0;
      for (int i = 0; i < rows_; ++i) objective_ += costs_[basis_[i]] * std::max(xb_[i], 0.0);
      return SolveStatus::kOptimal;
    }

    const std::vector<double>& acol = cols_[enter];
    for (int i = 0; i < rows_; ++i) {
      double s = 0;
      const double* row = &binv_[std::size_t(i) * rows_];
      for (int j = 0; j < rows_; ++j) s += row[j] * acol[j];
      w[i] = s;
    }
    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < rows_; ++i) {
      if (w[i] > 1e-11) {
        double ratio = std::max(xb_[i], 0.0) / w[i];
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 &&
             (leave < 0 || (bland ? basis_[i] < basis_[leave] : w[i] > w[leave])))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) {
      basis = basis_;
      return SolveStatus::kUnbounded;
    }
    // Steps below the feasibility noise floor count as stalled; once Bland's
    // rule engages it stays on until the objective visibly moves again, so a
    // cycle of near-degenerate pivots cannot keep resetting the counter.
    if (best_ratio <= opts_.feas_tol) {
      ++degenerate_run;
      if (degenerate_run >= opts_.bland_trigger) bland = true;
    } else {
      stall_progress += -best_red * best_ratio;
      double obj = 0;
      for (int i = 0; i < rows_; ++i) obj += costs_[basis_[i]] * std::max(xb_[i], 0.0);
      if (stall_progress > opts_.feas_tol * (1.0 + std::abs(obj))) {
        degenerate_run = 0;
        stall_progress = 0;
        bland = false;
      }
    }

    in_basis_[basis_[leave]] = 0;
    in_basis_[enter] = 1;
    basis_[leave] = enter;
    ++pivots_;
    ++since_refactor;

    if (since_refactor >= opts_.refactor_every) {
      if (!factorize()) return SolveStatus::kNumericalFailure;
      compute_xb();
      since_refactor = 0;
      // A repaired or drifted basis can come back visibly infeasible; the
      // walk is corrupt at that point and the caller should restart it.
      for (double v : xb_)
        if (v < -1e-7) return SolveStatus::kNumericalFailure;
    } else {
      // rank-one basis-inverse update: pivot on row `leave`
      double piv = w[leave];
      if (std::abs(piv) < 1e-12) {
        if (!factorize()) return SolveStatus::kNumericalFailure;
        compute_xb();
        since_refactor = 0;
        for (double v : xb_)
          if (v < -1e-7) return SolveStatus::kNumericalFailure;
        continue;
      }
      double* prow = &binv_[std::size_t(leave) * rows_];
      for (int j = 0; j < rows_; ++j) prow[j] /= piv;
      for (int i = 0; i < rows_; ++i) {
        if (i == leave) continue;
        double f = w[i];
        if (f == 0.0) continue;
        double* row = &binv_[std::size_t(i) * rows_];
        for (int j = 0; j < rows_; ++j) row[j] -= f * prow[j];
      }
      for (int i = 0; i < rows_; ++i) {
        if (i == leave) continue;
        xb_[i] -= w[i] * best_ratio;
      }
      xb_[leave] = best_ratio;
    }
  }
}

std::vector<double> DenseSimplex::primal() const {
  std::vector<double> z(cols_.size(), 0.0);
  for (int i = 0; i < rows_; ++i) z[basis_[i]] = std::max(xb_[i], 0.0);
  return z;
}

InequalityLpResult solve_inequality_form(int nvars,
                                         const std::vector<std::vector<double>>& rows,
                                         const std::vector<double>& rhs,
                                         const std::vector<double>& objective,
                                         SimplexOptions opts) {
  if (rows.size() != rhs.size() || int(objective.size()) != nvars)
    throw InputError("solve_inequality_form: shape mismatch");
  int m = int(rows.size());
  // Standard form over x = x+ - x-, slack s, artificials on sign-flipped rows:
  // columns [x+ (nvars)] [x- (nvars)] [s (m)] [artificials...].
  DenseSimplex lp(m, opts);
  std::vector<double> col(m);
  for (int v = 0; v < nvars; ++v) {
    for (int i = 0; i < m; ++i) col[i] = (rhs[i] < 0 ? -1.0 : 1.0) * rows[i][v];
    lp.add_column(col, 0.0);
  }
  for (int v = 0; v < nvars; ++v) {
    for (int i = 0; i < m; ++i) col[i] = (rhs[i] < 0 ? 1.0 : -1.0) * rows[i][v];
    lp.add_column(col, 0.0);
  }
  std::vector<double> b(m);
  for (int i = 0; i < m; ++i) b[i] = std::abs(rhs[i]);
  std::vector<int> slack(m), art(m, -1);
  for (int i = 0; i < m; ++i) {
    std::fill(col.begin(), col.end(), 0.0);
    col[i] = rhs[i] < 0 ? -1.0 : 1.0;
    slack[i] = lp.add_column(col, 0.0);
  }
  std::vector<int> basis(m);
  bool need_phase1 = false;
  for (int i = 0; i < m; ++i) {
    if (rhs[i] < 0) {
      std::fill(col.begin(), col.end(), 0.0);
      col[i] = 1.0;
      art[i] = lp.add_column(col, 1.0);
      basis[i] = art[i];
      need_phase1 = true;
    } else {
      basis[i] = slack[i];
    }
  }
  lp.set_rhs(b);

  InequalityLpResult out;
  if (need_phase1) {
    SolveStatus st = lp.solve(basis);
    if (st != SolveStatus::kOptimal) {
      out.status = st;
      return out;
    }
    if (lp.objective() > 1e-7) {
      out.status = SolveStatus::kInfeasible;
      return out;
    }
  }
  // Phase 2: real costs (min -objective), artificials frozen out.
  for (int v = 0; v < nvars; ++v) {
    lp.set_cost(v, -objective[v]);
    lp.set_cost(nvars + v, objective[v]);
  }
  for (int i = 0; i < m; ++i)
    if (art[i] >= 0) {
      lp.set_cost(art[i], 0.0);
      lp.ban_column(art[i]);
    }
  SolveStatus st = lp.solve(basis);
  out.status = st;
  if (st != SolveStatus::kOptimal && st != SolveStatus::kIterationLimit) return out;
  std::vector<double> z = lp.primal();
  for (int i = 0; i < m; ++i)
    if (art[i] >= 0 && z[art[i]] > 1e-7) {
      out.status = SolveStatus::kNumericalFailure;  // artificial stuck in basis
      return out;
    }
  out.x.resize(nvars);
  for (int v = 0; v < nvars; ++v) out.x[v] = z[v] - z[nvars + v];
  out.objective = -lp.objective();
  return out;
}

}  // namespace belldet
