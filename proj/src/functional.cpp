#include "belldet/functional.hpp"

#include <cmath>

namespace belldet {

BellFunctional BellFunctional::zeros(int m, int o, bool with_marginals) {
  BellFunctional c;
  c.m = m;
  c.o = o;
  c.joint.assign(std::size_t(m) * m * o * o, 0.0);
  if (with_marginals) {
    c.marg_a.assign(std::size_t(m) * o, 0.0);
    c.marg_b.assign(std::size_t(m) * o, 0.0);
  }
  return c;
}

bool BellFunctional::refresh_integral_flag(double tol) {
  auto ok = [tol](const std::vector<double>& v) {
    for (double e : v)
      if (std::abs(e - std::round(e)) > tol) return false;
    return true;
  };
  integral = ok(joint) && ok(marg_a) && ok(marg_b);
  return integral;
}

BellFunctional BellFunctional::padded(int new_o) const {
  if (new_o < o) throw InputError("functional: cannot shrink output range");
  if (new_o == o) return *this;
  BellFunctional out = zeros(m, new_o, has_marginals());
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      for (int a = 0; a < o; ++a)
        for (int b = 0; b < o; ++b) out.jat(x, y, a, b) = jat(x, y, a, b);
  if (!marg_a.empty())
    for (int x = 0; x < m; ++x)
      for (int a = 0; a < o; ++a)
        out.marg_a[std::size_t(x) * new_o + a] = marg_a[std::size_t(x) * o + a];
  if (!marg_b.empty())
    for (int y = 0; y < m; ++y)
      for (int b = 0; b < o; ++b)
        out.marg_b[std::size_t(y) * new_o + b] = marg_b[std::size_t(y) * o + b];
  out.integral = integral;
  return out;
}

BellFunctional BellFunctional::scaled(double c) const {
  BellFunctional out = *this;
  for (double& e : out.joint) e *= c;
  for (double& e : out.marg_a) e *= c;
  for (double& e : out.marg_b) e *= c;
  out.refresh_integral_flag();
  return out;
}

double evaluate(const BellFunctional& c, const Behavior& p) {
  if (c.m != p.m() || c.o != p.o())
    throw InputError("evaluate: functional/behavior dimension mismatch");
  double v = 0;
  const auto& joint = c.joint;
  const auto& table = p.raw();
  for (std::size_t i = 0; i < joint.size(); ++i) v += joint[i] * table[i];
  if (!c.marg_a.empty()) {
    auto pa = p.marginal_a();
    for (std::size_t i = 0; i < pa.size(); ++i) v += c.marg_a[i] * pa[i];
  }
  if (!c.marg_b.empty()) {
    auto pb = p.marginal_b();
    for (std::size_t i = 0; i < pb.size(); ++i) v += c.marg_b[i] * pb[i];
  }
  return v;
}

}  // namespace belldet
