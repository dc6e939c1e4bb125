#include "belldet/separation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>
#include <utility>

#include "belldet/correlation.hpp"

namespace belldet {
namespace {

// Collins-Gisin block coordinates without the unit entry: Alice marginals,
// Bob marginals, then the joint block over the first o-1 outcomes.
struct CgSpace {
  int m = 0, ot = 0, w = 0;
  int b_off = 0, j_off = 0, dim = 0;

  CgSpace(int m_, int ot_) : m(m_), ot(ot_), w(ot_ - 1) {
    b_off = m * w;
    j_off = 2 * m * w;
    dim = j_off + m * w * m * w;
  }
  int ia(int x, int a) const { return x * w + a; }
  int ib(int y, int b) const { return b_off + y * w + b; }
  int ij(int x, int y, int a, int b) const {
    return j_off + ((x * m + y) * w + a) * w + b;
  }
};

std::vector<double> cg_vector(const CgSpace& s, const Behavior& t) {
  std::vector<double> v(s.dim, 0.0);
  auto pa = t.marginal_a();
  auto pb = t.marginal_b();
  for (int x = 0; x < s.m; ++x)
    for (int a = 0; a < s.w; ++a) v[s.ia(x, a)] = pa[std::size_t(x) * s.ot + a];
  for (int y = 0; y < s.m; ++y)
    for (int b = 0; b < s.w; ++b) v[s.ib(y, b)] = pb[std::size_t(y) * s.ot + b];
  for (int x = 0; x < s.m; ++x)
    for (int y = 0; y < s.m; ++y)
      for (int a = 0; a < s.w; ++a)
        for (int b = 0; b < s.w; ++b) v[s.ij(x, y, a, b)] = t.at(x, y, a, b);
  return v;
}

std::vector<double> vertex_column(const CgSpace& s, const DeterministicStrategy& d) {
  std::vector<double> col(s.dim, 0.0);
  for (int x = 0; x < s.m; ++x)
    if (d.alice[x] < s.w) col[s.ia(x, d.alice[x])] = 1.0;
  for (int y = 0; y < s.m; ++y)
    if (d.bob[y] < s.w) col[s.ib(y, d.bob[y])] = 1.0;
  for (int x = 0; x < s.m; ++x) {
    if (d.alice[x] >= s.w) continue;
    for (int y = 0; y < s.m; ++y)
      if (d.bob[y] < s.w) col[s.ij(x, y, d.alice[x], d.bob[y])] = 1.0;
  }
  return col;
}

BellFunctional functional_from_duals(const CgSpace& s, const std::vector<double>& pi) {
  BellFunctional c = BellFunctional::zeros(s.m, s.ot, true);
  for (int x = 0; x < s.m; ++x)
    for (int a = 0; a < s.w; ++a) c.marg_a[std::size_t(x) * s.ot + a] = pi[s.ia(x, a)];
  for (int y = 0; y < s.m; ++y)
    for (int b = 0; b < s.w; ++b) c.marg_b[std::size_t(y) * s.ot + b] = pi[s.ib(y, b)];
  for (int x = 0; x < s.m; ++x)
    for (int y = 0; y < s.m; ++y)
      for (int a = 0; a < s.w; ++a)
        for (int b = 0; b < s.w; ++b) c.jat(x, y, a, b) = pi[s.ij(x, y, a, b)];
  c.refresh_integral_flag();
  return c;
}

// Reusable row-generation master: vertex columns persist across targets, so a
// bisection pays the oracle cost once per facet rather than once per step.
class SeparationEngine {
 public:
  SeparationEngine(int m, int ot, const SeparationOptions& opts)
      : space_(m, ot), opts_(opts), lp_(space_.dim, opts.lp) {
    std::vector<double> col(space_.dim, 0.0);
    for (int i = 0; i < space_.dim; ++i) {
      col[i] = 1.0;
      s_cols_.push_back(lp_.add_column(col, 1.0));
      col[i] = 0.0;
    }
    for (int i = 0; i < space_.dim; ++i) {
      col[i] = -1.0;
      t_cols_.push_back(lp_.add_column(col, opts.bound_floor));
      col[i] = 0.0;
    }
  }

  const CgSpace& space() const { return space_; }
  int vertex_count() const { return int(vertex_keys_.size()); }

  SeparationResult run(const std::vector<double>& target) {
    lp_.set_rhs(target);
    SeparationResult res;
    LocalBoundOptions oracle_opts;
    oracle_opts.restarts = opts_.oracle_restarts;
    oracle_opts.seed = opts_.seed;
    oracle_opts.threads = opts_.threads;

    bool exact_mode = opts_.source == ConstraintSource::kFullEnumeration;
    bool can_enumerate =
        strategy_count(space_.m, space_.ot) <= oracle_opts.exact_cap;
    if (exact_mode && !can_enumerate)
      throw InputError("separate: full enumeration requested beyond the vertex cap");

    std::vector<double> pi;
    BellFunctional functional;
    // Warm start: the optimal basis from the previous master solve stays
    // feasible when a column is added, and usually survives a target change
    // during bisection. Stale bases fall back to the sign-split start.
    bool warm = !warm_basis_.empty();
    std::vector<int> basis = warm ? warm_basis_ : sign_split_basis(target);
    int pool_limit = std::max(1, opts_.batch_columns);
    for (res.iterations = 0; res.iterations < opts_.max_iterations; ++res.iterations) {
      SolveStatus st = lp_.solve(basis);
      if (warm && st != SolveStatus::kOptimal) {
        // stale or drifted basis: restart from the sign-split identity
        basis = sign_split_basis(target);
        warm = false;
        st = lp_.solve(basis);
      }
      if (st == SolveStatus::kInfeasible)
        throw InvariantError("separate: restricted master infeasible");
      if (st != SolveStatus::kOptimal)
        throw InvariantError("separate: LP solve failed with status " +
                             std::to_string(int(st)));
      warm = true;
      warm_basis_ = basis;
      res.objective = lp_.objective();
      pi = lp_.duals();
      functional = functional_from_duals(space_, pi);

      auto pool = oracle_overlap_pool(functional, oracle_opts, exact_mode, pool_limit);
      if (std::getenv("BELLDET_LP_LOG"))
        std::fprintf(stderr, "separate: iter=%d cols=%d pivots=%d obj=%.9g vio=%.3g\n",
                     res.iterations, lp_.cols(), lp_.pivots(), res.objective,
                     pool.front().overlap);
      res.max_violation = pool.front().overlap;
      res.verified_exhaustive = pool.front().exact;
      if (pool.front().overlap <= opts_.violation_tol) {
        // Heuristic oracle satisfied; certify with enumeration when feasible.
        if (!pool.front().exact && can_enumerate) {
          pool = oracle_overlap_pool(functional, oracle_opts, true, pool_limit);
          res.max_violation = pool.front().overlap;
          res.verified_exhaustive = true;
          if (pool.front().overlap > opts_.violation_tol) {
            if (!add_pool(pool)) break;
            continue;
          }
        }
        break;
      }
      if (!add_pool(pool)) break;  // stalling on known vertices: tolerance limit
    }

    res.constraint_count = vertex_count();
    res.functional = std::move(functional);
    bool converged = res.max_violation <= opts_.violation_tol * 10;
    if (!converged)
      res.status = SeparationStatus::kToleranceLimit;
    else if (res.objective > opts_.separated_tol)
      res.status = SeparationStatus::kSeparated;
    else
      res.status = SeparationStatus::kInside;
    if (res.status == SeparationStatus::kInside) {
      auto z = lp_.primal();
      double sum = 0;
      for (std::size_t i = 2 * std::size_t(space_.dim); i < z.size(); ++i) sum += z[i];
      res.decomposition_weight = sum;
    }
    return res;
  }

 private:
  std::vector<int> sign_split_basis(const std::vector<double>& target) const {
    std::vector<int> basis(space_.dim);
    for (int i = 0; i < space_.dim; ++i)
      basis[i] = target[i] >= 0 ? s_cols_[i] : t_cols_[i];
    return basis;
  }

  bool add_vertex(const DeterministicStrategy& d) {
    auto key = std::make_pair(map_lex_index(d.alice, space_.ot),
                              map_lex_index(d.bob, space_.ot));
    if (!vertex_keys_.insert(key).second) return false;
    lp_.add_column(vertex_column(space_, d), 0.0);
    return true;
  }

  bool add_pool(const std::vector<OracleResult>& pool) {
    bool any = false;
    for (const auto& cand : pool)
      if (cand.overlap > opts_.violation_tol && add_vertex(cand.vertex)) any = true;
    return any;
  }

  CgSpace space_;
  SeparationOptions opts_;
  DenseSimplex lp_;
  std::vector<int> s_cols_, t_cols_;
  std::vector<int> warm_basis_;
  std::set<std::pair<std::uint64_t, std::uint64_t>> vertex_keys_;
};

double threshold_of(ThresholdReport& rep, EfficiencyMode mode) {
  return mode == EfficiencyMode::kSymmetric ? eta_sym(rep) : eta_asym(rep);
}

}  // namespace

DeflatedPoint deflate_for_mode(const MultiCopyDistribution& ideal, double eta,
                               EfficiencyMode mode, NoClickPolicy policy) {
  EfficiencyModel model;
  model.policy = policy;
  if (mode == EfficiencyMode::kSymmetric) {
    model.eta_a = eta;
    model.eta_b = eta;
  } else {
    model.eta_a = 1.0;  // Alice ideal, Bob lossy
    model.eta_b = eta;
  }
  return deflate(ideal, model);
}

SeparationResult separate(const DeflatedPoint& target, const SeparationOptions& opts) {
  SeparationEngine engine(target.table.m(), target.table.o(), opts);
  return engine.run(cg_vector(engine.space(), target.table));
}

ThresholdSearchResult threshold_by_bisection(const MultiCopyDistribution& ideal,
                                             EfficiencyMode mode, NoClickPolicy policy,
                                             const BisectionOptions& opts) {
  int ot = ideal.table.o() + (policy == NoClickPolicy::kExtraOutcome ? 1 : 0);
  SeparationEngine engine(ideal.table.m(), ot, opts.separation);
  ThresholdSearchResult out;

  auto run_at = [&](double eta) {
    DeflatedPoint p = deflate_for_mode(ideal, eta, mode, policy);
    ++out.lp_solves;
    return engine.run(cg_vector(engine.space(), p.table));
  };

  double lo = mode == EfficiencyMode::kSymmetric ? 0.5 : 0.3;
  double hi = 1.0;
  SeparationResult at_hi = run_at(hi);
  if (at_hi.status != SeparationStatus::kSeparated)
    throw InvariantError("threshold_by_bisection: ideal point not separated at eta=1");

  SeparationResult lo_res = run_at(lo);
  if (lo_res.objective > opts.decision_tol) {
    // already nonlocal at the range floor
    out.eta = lo;
    out.eta_lo = lo;
    out.at_eta = std::move(lo_res);
  } else {
    while (hi - lo > opts.resolution) {
      double mid = 0.5 * (lo + hi);
      SeparationResult r = run_at(mid);
      if (r.objective > opts.decision_tol) {
        hi = mid;
        at_hi = std::move(r);
      } else {
        lo = mid;
      }
    }
    out.eta = hi;
    out.eta_lo = lo;
    out.at_eta = std::move(at_hi);
  }

  if (!opts.certify) return out;

  // Refinement: walk the certified analytic threshold down onto the boundary.
  // Each probe re-solves the (warm) LP just below the current certificate's
  // threshold; separation there yields a strictly better certificate.
  auto certify = [&](const BellFunctional& c) -> std::optional<double> {
    BellFunctional ci = rationalize(c, opts.max_denominator);
    ThresholdReport rep = profile(ci, ideal, policy, opts.local_bound);
    if (!(rep.q > rep.l)) return std::nullopt;  // rounding ate the margin
    double t;
    try {
      t = threshold_of(rep, mode);
    } catch (const InputError&) {
      return std::nullopt;
    }
    out.certified = std::move(ci);
    out.certified_profile = std::move(rep);
    return t;
  };
  std::optional<double> t0 = certify(out.at_eta.functional);
  if (!t0)
    throw InvariantError(
        "threshold_by_bisection: could not certify the separating functional");
  double t = *t0;
  int probes = 0;
  for (double step = 1e-5; step > 5e-11 && probes < 400; ++probes) {
    double probe = t - step;
    if (probe <= 0.0) break;
    SeparationResult r = run_at(probe);
    std::optional<double> t_new;
    if (r.status == SeparationStatus::kSeparated) t_new = certify(r.functional);
    if (t_new && *t_new < t - 1e-13)
      t = *t_new;
    else
      step /= 10;
  }
  out.certified_eta = t;
  return out;
}

BellFunctional rationalize(const BellFunctional& c, std::int64_t max_denominator,
                           RationalizeInfo* info) {
  if (max_denominator < 1) throw InputError("rationalize: bad denominator bound");
  std::vector<const std::vector<double>*> blocks = {&c.joint, &c.marg_a, &c.marg_b};
  double maxabs = 0;
  for (auto* blk : blocks)
    for (double e : *blk) maxabs = std::max(maxabs, std::abs(e));
  if (maxabs == 0) throw InputError("rationalize: zero functional");

  auto try_q = [&](std::int64_t q, double tol) -> bool {
    bool any = false;
    for (auto* blk : blocks)
      for (double e : *blk) {
        double scaled = e * double(q);
        double r = std::round(scaled);
        if (std::abs(scaled - r) > tol) return false;
        if (std::abs(r) >= 1) any = true;
      }
    return any;
  };

  std::int64_t q = 0;
  bool exact_fit = false;
  for (std::int64_t cand = 1; cand <= max_denominator; ++cand) {
    if (try_q(cand, 1e-6)) {
      q = cand;
      exact_fit = true;
      break;
    }
  }
  if (q == 0) q = max_denominator;

  BellFunctional out = c;
  auto round_block = [&](std::vector<double>& v, const std::vector<double>& src) {
    for (std::size_t i = 0; i < src.size(); ++i) v[i] = std::round(src[i] * double(q));
  };
  round_block(out.joint, c.joint);
  round_block(out.marg_a, c.marg_a);
  round_block(out.marg_b, c.marg_b);
  out.integral = true;
  bool any = false;
  for (double e : out.joint) any |= e != 0;
  for (double e : out.marg_a) any |= e != 0;
  for (double e : out.marg_b) any |= e != 0;
  if (!any)
    throw InputError("rationalize: all coefficients round to zero; scale the functional "
                     "or raise the denominator bound");
  if (info) *info = RationalizeInfo{q, exact_fit};
  return out;
}

}  // namespace belldet
