#include "belldet/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace belldet {
namespace {

const double kNan = std::numeric_limits<double>::quiet_NaN();

Behavior one_sided_table(const std::vector<double>& marg, int m, int o_ideal, int ot,
                         bool alice_clicks) {
  // alice_clicks: P^A(a|x) on the clicking side, the assigned outcome on the
  // other. Otherwise mirrored.
  Behavior t(m, ot);
  int assigned = ot - 1;
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      for (int k = 0; k < o_ideal; ++k) {
        if (alice_clicks)
          t.at(x, y, k, assigned) = marg[std::size_t(x) * o_ideal + k];
        else
          t.at(x, y, assigned, k) = marg[std::size_t(y) * o_ideal + k];
      }
  return t;
}

}  // namespace

ThresholdReport profile(const BellFunctional& c, const MultiCopyDistribution& dist,
                        NoClickPolicy policy, const LocalBoundOptions& opts) {
  const Behavior& ideal = dist.table;
  int m = ideal.m(), o = ideal.o();
  bool extra = policy == NoClickPolicy::kExtraOutcome;
  int ot = extra ? o + 1 : o;

  BellFunctional cp;
  if (c.o == ot)
    cp = c;
  else if (c.o == o && extra)
    cp = c.padded(ot);
  else
    throw InputError("profile: functional outputs (" + std::to_string(c.o) +
                     ") match neither the table (" + std::to_string(o) +
                     ") nor the policy-extended range");
  if (cp.m != m) throw InputError("profile: input count mismatch");

  Behavior ideal_ext = extra ? ideal.padded(ot) : ideal;
  auto pa = ideal.marginal_a();
  auto pb = ideal.marginal_b();
  int assigned = ot - 1;

  ThresholdReport rep;
  rep.n = dist.copies;
  rep.q = evaluate(cp, ideal_ext);
  rep.m_a = evaluate(cp, one_sided_table(pa, m, o, ot, true));
  rep.m_b = evaluate(cp, one_sided_table(pb, m, o, ot, false));
  {
    Behavior both(m, ot);
    for (int x = 0; x < m; ++x)
      for (int y = 0; y < m; ++y) both.at(x, y, assigned, assigned) = 1.0;
    rep.x = evaluate(cp, both);
  }
  std::uint64_t count = strategy_count(m, ot);
  if (count <= opts.exact_cap) {
    LocalBoundResult lb = local_bound_exact(cp, opts);
    rep.l = lb.value;
    rep.l_provenance = BoundProvenance::kExact;
    rep.l_witness = std::move(lb.witness);
  } else {
    LocalBoundResult lb = local_bound_heuristic(cp, opts);
    rep.l = lb.value;
    rep.l_provenance = BoundProvenance::kHeuristic;
    rep.l_witness = std::move(lb.witness);
  }
  rep.eta_sym = kNan;
  rep.eta_asym = kNan;
  return rep;
}

double eta_sym_quadratic(double q, double l, double m_a, double m_b, double x,
                         bool* two_roots) {
  // eta^2 q + eta(1-eta)(m_a+m_b) + (1-eta)^2 x = l, written as
  // A eta^2 + B eta + C = 0.
  double ms = m_a + m_b;
  double a = q - ms + x;
  double b = ms - 2 * x;
  double c = x - l;
  double s = std::max({std::abs(a), std::abs(b), std::abs(c), 1.0});
  a /= s;
  b /= s;
  c /= s;
  if (two_roots) *two_roots = false;
  auto in_range = [](double e) { return e > 1e-12 && e <= 1 + 1e-9; };
  if (std::abs(a) < 1e-14) {
    if (std::abs(b) < 1e-14)
      throw InputError("eta_sym: degenerate threshold equation");
    double e = -c / b;
    if (!in_range(e)) throw InputError("eta_sym: no root in (0,1]");
    return std::min(e, 1.0);
  }
  double disc = b * b - 4 * a * c;
  if (disc < 0) throw InputError("eta_sym: threshold equation has no real root");
  double sq = std::sqrt(disc);
  // Citardauq-style split keeps the subtraction benign.
  double t = -0.5 * (b + (b >= 0 ? sq : -sq));
  double r1 = t / a;
  double r2 = std::abs(t) > 0 ? c / t : r1;
  double best = kNan;
  int hits = 0;
  for (double r : {r1, r2}) {
    if (!in_range(r)) continue;
    ++hits;
    if (std::isnan(best) || r < best) best = r;
  }
  if (hits == 0) throw InputError("eta_sym: no root in (0,1]");
  if (hits == 2 && std::abs(r1 - r2) > 1e-12 && two_roots) *two_roots = true;
  return std::min(best, 1.0);
}

double eta_sym(ThresholdReport& report) {
  if (!(report.q > report.l))
    throw InputError("eta_sym: requires Q > L (got Q=" + std::to_string(report.q) +
                     ", L=" + std::to_string(report.l) + ")");
  double scale = std::max({1.0, std::abs(report.x), std::abs(report.l)});
  double e;
  bool two = false;
  if (std::abs(report.x - report.l) <= 1e-12 * scale) {
    double ms = report.m_a + report.m_b;
    e = (2 * report.l - ms) / (report.q + report.l - ms);
  } else {
    e = eta_sym_quadratic(report.q, report.l, report.m_a, report.m_b, report.x, &two);
  }
  report.eta_sym = e;
  report.two_roots = two;
  return e;
}

double eta_asym(ThresholdReport& report) {
  if (!(report.q > report.m_a))
    throw InputError("eta_asym: requires Q > M_A");
  double e = (report.l - report.m_a) / (report.q - report.m_a);
  report.eta_asym = e;
  return e;
}

CorrelationThresholds correlation_thresholds(double q_over_l) {
  if (!(q_over_l > 1)) throw InputError("correlation_thresholds: ratio must exceed 1");
  return CorrelationThresholds{2.0 / (q_over_l + 1.0), 1.0 / q_over_l};
}

std::string to_string(BoundProvenance p) {
  return p == BoundProvenance::kExact ? "exact" : "heuristic";
}

}  // namespace belldet
