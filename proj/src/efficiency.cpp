#include "belldet/efficiency.hpp"

#include <cmath>
#include <string>

namespace belldet {

DeflatedPoint deflate(const MultiCopyDistribution& dist, const EfficiencyModel& model) {
  if (model.eta_a < 0 || model.eta_a > 1 || model.eta_b < 0 || model.eta_b > 1)
    throw InputError("deflate: efficiencies must lie in [0,1]");
  const Behavior& ideal = dist.table;
  int m = ideal.m(), o = ideal.o();
  bool extra = model.policy == NoClickPolicy::kExtraOutcome;
  int ot = extra ? o + 1 : o;
  int assigned = ot - 1;

  auto pa = ideal.marginal_a();
  auto pb = ideal.marginal_b();
  double ea = model.eta_a, eb = model.eta_b;

  Behavior out(m, ot);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) {
      for (int a = 0; a < o; ++a)
        for (int b = 0; b < o; ++b)
          out.at(x, y, a, b) = ea * eb * ideal.at(x, y, a, b);
      for (int a = 0; a < o; ++a)
        out.at(x, y, a, assigned) += ea * (1 - eb) * pa[std::size_t(x) * o + a];
      for (int b = 0; b < o; ++b)
        out.at(x, y, assigned, b) += (1 - ea) * eb * pb[std::size_t(y) * o + b];
      out.at(x, y, assigned, assigned) += (1 - ea) * (1 - eb);
    }
  out.validate(1e-12);
  return DeflatedPoint{std::move(out), model, dist.copies, o};
}

CollinsGisinPoint to_collins_gisin(const DeflatedPoint& point) {
  const Behavior& t = point.table;
  t.validate(1e-10);
  int m = t.m(), o = t.o(), w = o - 1;
  CollinsGisinPoint cg;
  cg.m = m;
  cg.o = o;
  cg.policy = point.model.policy;
  int side = m * w + 1;
  cg.mat.assign(std::size_t(side) * side, 0.0);
  auto pa = t.marginal_a();
  auto pb = t.marginal_b();
  cg.at(0, 0) = 1.0;
  for (int x = 0; x < m; ++x)
    for (int a = 0; a < w; ++a) cg.at(1 + x * w + a, 0) = pa[std::size_t(x) * o + a];
  for (int y = 0; y < m; ++y)
    for (int b = 0; b < w; ++b) cg.at(0, 1 + y * w + b) = pb[std::size_t(y) * o + b];
  for (int x = 0; x < m; ++x)
    for (int a = 0; a < w; ++a)
      for (int y = 0; y < m; ++y)
        for (int b = 0; b < w; ++b)
          cg.at(1 + x * w + a, 1 + y * w + b) = t.at(x, y, a, b);
  return cg;
}

Behavior from_collins_gisin(const CollinsGisinPoint& cg) {
  int m = cg.m, o = cg.o, w = o - 1;
  if (int(cg.mat.size()) != cg.side() * cg.side())
    throw InputError("collins-gisin: matrix size does not match header");
  if (std::abs(cg.at(0, 0) - 1.0) > 1e-10)
    throw InputError("collins-gisin: unit entry is not 1");
  Behavior t(m, o);
  const double lo = -1e-10, hi = 1 + 1e-10;
  auto check = [&](double v, const char* what) {
    if (v < lo || v > hi)
      throw InputError(std::string("collins-gisin: reconstructed ") + what + " entry " +
                       std::to_string(v) + " outside [0,1]");
    return v;
  };
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) {
      double block = 0;
      for (int a = 0; a < w; ++a) {
        double rowsum = 0;
        for (int b = 0; b < w; ++b) {
          double v = check(cg.at(1 + x * w + a, 1 + y * w + b), "joint");
          t.at(x, y, a, b) = v;
          rowsum += v;
        }
        t.at(x, y, a, w) = check(cg.at(1 + x * w + a, 0) - rowsum, "last-column");
        block += rowsum + t.at(x, y, a, w);
      }
      double lastrow = 0;
      for (int b = 0; b < w; ++b) {
        double colsum = 0;
        for (int a = 0; a < w; ++a) colsum += t.at(x, y, a, b);
        t.at(x, y, w, b) = check(cg.at(0, 1 + y * w + b) - colsum, "last-row");
        lastrow += t.at(x, y, w, b);
      }
      t.at(x, y, w, w) = check(1.0 - block - lastrow, "corner");
    }
  return t;
}

}  // namespace belldet
