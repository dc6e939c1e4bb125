#include "belldet/chshn.hpp"

#include <cmath>
#include <string>

#include "belldet/correlation.hpp"

namespace belldet {
namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt5 = std::sqrt(5.0);

// Empirical see-saw bounds for the range where enumeration is out of reach.
double empirical_bound(int n) {
  switch (n) {
    case 4: return 100;
    case 5: return 310;
    case 6: return 1000;
    default: throw InputError("no empirical bound tabulated for n=" + std::to_string(n));
  }
}

}  // namespace

BellFunctional chshn_build(int n) {
  if (n < 1 || n > 6) throw InputError("chshn_build: need 1 <= n <= 6");
  int side = 1 << n;
  BellFunctional c = BellFunctional::zeros(side, side, false);
  for (int x = 0; x < side; ++x)
    for (int y = 0; y < side; ++y) {
      int w = x & y;
      for (int a = 0; a < side; ++a) {
        int b = a ^ w;  // the unique winning response
        c.jat(x, y, a, b) = 1.0;
      }
    }
  c.integral = true;
  // unique-game check: one winning b per (x,y,a)
  for (int x = 0; x < side; ++x)
    for (int y = 0; y < side; ++y)
      for (int a = 0; a < side; ++a) {
        double row = 0;
        for (int b = 0; b < side; ++b) row += c.jat(x, y, a, b);
        if (row != 1.0) throw InvariantError("chshn_build: unique-game property broken");
      }
  return c;
}

double chshn_quantum_value(int n, int tensor_cap) {
  if (n < 1) throw InputError("chshn_quantum_value: n >= 1");
  double closed = std::pow(2.0 + kSqrt2, n);
  if (n <= tensor_cap) {
    MultiCopyDistribution dist = tensor_power(chsh_optimal_single_copy(), n, tensor_cap);
    double direct = evaluate(chshn_build(n), dist.table);
    if (std::abs(direct - closed) > 1e-9)
      throw InvariantError("chshn_quantum_value: tensor evaluation " + std::to_string(direct) +
                           " disagrees with closed form " + std::to_string(closed) +
                           " (composite index codec bug?)");
    return direct;
  }
  return closed;
}

LocalBoundResult chshn_local_bound(int n, bool exact, const LocalBoundOptions& opts) {
  BellFunctional c = chshn_build(n);
  if (exact) return local_bound_exact(c, opts);
  return local_bound_heuristic(c, opts);
}

double chshn_ambainis_bound(int n) {
  if (n < 1) throw InputError("chshn_ambainis_bound: n >= 1");
  return std::pow(1.0 + kSqrt5, n);
}

double chshn_eta_sym(double l, int n) {
  double q = std::pow(2.0 + kSqrt2, n);
  double m = std::pow(2.0, n);
  return (2 * l - 2 * m) / (q + l - 2 * m);
}

double chshn_eta_asym(double l, int n) {
  double q = std::pow(2.0 + kSqrt2, n);
  double m = std::pow(2.0, n);
  return (l - m) / (q - m);
}

std::vector<Table1Row> chshn_table1(const std::vector<int>& n_list) {
  std::vector<Table1Row> rows;
  rows.reserve(n_list.size());
  for (int n : n_list) {
    if (n < 1) throw InputError("table1: n >= 1");
    Table1Row row;
    row.n = n;
    double l;
    if (n <= 3) {
      l = chshn_local_bound(n, true).value;
      row.l_source = "exact";
    } else {
      l = chshn_ambainis_bound(n);
      row.l_source = "ambainis";
    }
    row.eta_sym = chshn_eta_sym(l, n);
    row.eta_asym = chshn_eta_asym(l, n);
    if (n >= 4 && n <= 6) {
      double le = empirical_bound(n);
      row.eta_sym_empirical = chshn_eta_sym(le, n);
      row.eta_asym_empirical = chshn_eta_asym(le, n);
    }
    row.flagged = (n == 9 || n == 12);  // printed reference rows known inconsistent
    rows.push_back(row);
  }
  return rows;
}

}  // namespace belldet
