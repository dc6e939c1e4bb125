#pragma once

#include <optional>
#include <vector>

#include "belldet/functional.hpp"
#include "belldet/local_bound.hpp"
#include "belldet/thresholds.hpp"

namespace belldet {

// Iterated CHSH_n: m = o = 2^n, coefficient at (a,b,x,y) is the product over
// copies of [a_i xor b_i = x_i y_i], i.e. [(a xor b) = (x and y)] bitwise.
// A unique game: for each (x,y,a) exactly one b has coefficient 1.
BellFunctional chshn_build(int n);

// (2+sqrt(2))^n. For n within the tensor cap the value is also computed by
// evaluating the functional on the n-copy tensor and cross-checked against
// the closed form (tolerance 1e-9; mismatch means a codec bug).
double chshn_quantum_value(int n, int tensor_cap = 4);

// Exact bounds for n <= 3 (enumeration), heuristic see-saw beyond.
LocalBoundResult chshn_local_bound(int n, bool exact, const LocalBoundOptions& opts = {});

// Analytic upper bound (1+sqrt(5))^n on the local bound.
double chshn_ambainis_bound(int n);

// One threshold-table row. The formula columns use exact L for n <= 3 and the
// Ambainis bound beyond; for n = 4..6 the parenthesized empirical bounds
// L in {100, 310, 1000} give the companion columns. Rows 9 and 12 of the
// printed reference table are known-inconsistent and arrive flagged.
struct Table1Row {
  int n = 0;
  double eta_sym = 0, eta_asym = 0;
  std::optional<double> eta_sym_empirical, eta_asym_empirical;
  const char* l_source = "exact";  // "exact" | "ambainis"
  bool flagged = false;
};

std::vector<Table1Row> chshn_table1(const std::vector<int>& n_list);

// eta_sym / eta_asym for given (L, n) via the closed forms with
// M_A = M_B = 2^n and Q = (2+sqrt(2))^n.
double chshn_eta_sym(double l, int n);
double chshn_eta_asym(double l, int n);

}  // namespace belldet
