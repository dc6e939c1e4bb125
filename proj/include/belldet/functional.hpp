#pragma once

#include <vector>

#include "belldet/behavior.hpp"

namespace belldet {

// Bell expression C with optional per-party marginal blocks C^A, C^B.
// Value on a behavior P is
//   sum C^A(a|x) P^A(a|x) + sum C^B(b|y) P^B(b|y) + sum C(a,b|x,y) P(a,b|x,y).
// joint uses the Behavior layout (x,y,a,b); marginal blocks use x*o+a.
struct BellFunctional {
  int m = 0, o = 0;
  std::vector<double> joint;
  std::vector<double> marg_a;  // empty when absent
  std::vector<double> marg_b;
  bool integral = false;

  std::size_t jindex(int x, int y, int a, int b) const {
    return ((std::size_t(x) * m + y) * o + a) * o + b;
  }
  double jat(int x, int y, int a, int b) const { return joint[jindex(x, y, a, b)]; }
  double& jat(int x, int y, int a, int b) { return joint[jindex(x, y, a, b)]; }

  bool has_marginals() const { return !marg_a.empty() || !marg_b.empty(); }

  static BellFunctional zeros(int m, int o, bool with_marginals);

  // True when every coefficient is an integer within tol; also updates the
  // integral flag.
  bool refresh_integral_flag(double tol = 1e-9);

  // Zero-extends the output range of all blocks.
  BellFunctional padded(int new_o) const;

  BellFunctional scaled(double c) const;
};

double evaluate(const BellFunctional& c, const Behavior& p);

}  // namespace belldet
