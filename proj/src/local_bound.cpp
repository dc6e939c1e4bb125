#include "belldet/local_bound.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <type_traits>

#include "belldet/parallel.hpp"
#include "belldet/rng.hpp"

namespace belldet {
namespace {

// Functional coefficients materialized for the hot loops: marginal blocks
// always present (zero when absent), contiguous layouts as in BellFunctional.
template <class T>
struct Coeffs {
  int m = 0, o = 0;
  std::vector<T> joint, ma, mb;

  const T* jrow(int x, int y, int a) const {
    return &joint[((std::size_t(x) * m + y) * o + a) * o];
  }
};

template <class T>
Coeffs<T> convert(const BellFunctional& c) {
  Coeffs<T> k;
  k.m = c.m;
  k.o = c.o;
  k.joint.resize(c.joint.size());
  for (std::size_t i = 0; i < c.joint.size(); ++i) {
    if constexpr (std::is_same_v<T, std::int64_t>)
      k.joint[i] = std::llround(c.joint[i]);
    else
      k.joint[i] = c.joint[i];
  }
  auto marg = [&](const std::vector<double>& src) {
    std::vector<T> out(std::size_t(c.m) * c.o, T(0));
    for (std::size_t i = 0; i < src.size(); ++i) {
      if constexpr (std::is_same_v<T, std::int64_t>)
        out[i] = std::llround(src[i]);
      else
        out[i] = src[i];
    }
    return out;
  };
  k.ma = marg(c.marg_a);
  k.mb = marg(c.marg_b);
  return k;
}

// Guards the int64 path: the largest reachable partial sum is bounded by the
// total absolute coefficient mass.
void check_integer_headroom(const Coeffs<std::int64_t>& k) {
  std::int64_t mass = 0;
  auto add = [&](const std::vector<std::int64_t>& v) {
    for (std::int64_t e : v) mass += e < 0 ? -e : e;
  };
  add(k.joint);
  add(k.ma);
  add(k.mb);
  if (mass > (std::int64_t(1) << 60))
    throw InputError("integer local bound: coefficient mass too large");
}

template <class T>
struct EnumState {
  std::vector<int> map;     // current Alice map
  std::vector<T> score;     // score[y*o+b] = C^B(b|y) + sum_x C(map[x],b|x,y)
  T marg_sum = T(0);        // sum_x C^A(map[x]|x)

  void init(const Coeffs<T>& c, std::vector<int> start) {
    map = std::move(start);
    score.assign(std::size_t(c.m) * c.o, T(0));
    marg_sum = T(0);
    for (int x = 0; x < c.m; ++x) marg_sum += c.ma[std::size_t(x) * c.o + map[x]];
    for (int y = 0; y < c.m; ++y) {
      T* s = &score[std::size_t(y) * c.o];
      for (int b = 0; b < c.o; ++b) s[b] = c.mb[std::size_t(y) * c.o + b];
      for (int x = 0; x < c.m; ++x) {
        const T* row = c.jrow(x, y, map[x]);
        for (int b = 0; b < c.o; ++b) s[b] += row[b];
      }
    }
  }

  void change_digit(const Coeffs<T>& c, int x, int a_new) {
    int a_old = map[x];
    if (a_old == a_new) return;
    marg_sum += c.ma[std::size_t(x) * c.o + a_new] - c.ma[std::size_t(x) * c.o + a_old];
    for (int y = 0; y < c.m; ++y) {
      const T* rn = c.jrow(x, y, a_new);
      const T* ro = c.jrow(x, y, a_old);
      T* s = &score[std::size_t(y) * c.o];
      for (int b = 0; b < c.o; ++b) s[b] += rn[b] - ro[b];
    }
    map[x] = a_new;
  }

  T value(const Coeffs<T>& c) const {
    T v = marg_sum;
    for (int y = 0; y < c.m; ++y) {
      const T* s = &score[std::size_t(y) * c.o];
      T best = s[0];
      for (int b = 1; b < c.o; ++b)
        if (s[b] > best) best = s[b];
      v += best;
    }
    return v;
  }
};

template <class T>
struct RangeBest {
  T value = T(0);
  std::uint64_t alice_idx = 0;
  bool valid = false;
};

// Enumerates Alice maps with lex ranks in [begin, end) in ascending order.
// Strict improvement keeps the first (= lexicographically smallest) maximum.
template <class T>
RangeBest<T> enumerate_range(const Coeffs<T>& c, std::uint64_t begin, std::uint64_t end) {
  RangeBest<T> best;
  if (begin >= end) return best;
  EnumState<T> st;
  st.init(c, map_from_lex_index(begin, c.m, c.o));
  constexpr std::uint64_t kRebuild = std::is_same_v<T, double> ? (1u << 16) : 0;
  for (std::uint64_t idx = begin; idx < end; ++idx) {
    if (kRebuild && ((idx - begin) & (kRebuild - 1)) == kRebuild - 1)
      st.init(c, std::move(st.map));  // shed accumulated float drift
    T v = st.value(c);
    if (!best.valid || v > best.value) {
      best.value = v;
      best.alice_idx = idx;
      best.valid = true;
    }
    if (idx + 1 == end) break;
    // odometer step, least significant digit last
    int x = c.m - 1;
    while (st.map[x] == c.o - 1) {
      st.change_digit(c, x, 0);
      --x;
    }
    st.change_digit(c, x, st.map[x] + 1);
  }
  return best;
}

template <class T>
LocalBoundResult exact_impl(const BellFunctional& c, const LocalBoundOptions& opts) {
  Coeffs<T> k = convert<T>(c);
  if constexpr (std::is_same_v<T, std::int64_t>) check_integer_headroom(k);
  std::uint64_t total = strategy_count(c.m, c.o);
  std::uint64_t ntasks = total < 256 ? total : 256;
  std::uint64_t chunk = (total + ntasks - 1) / ntasks;
  auto bests = run_tasks<RangeBest<T>>(
      int(ntasks), opts.threads, [&](int i) {
        std::uint64_t lo = std::uint64_t(i) * chunk;
        std::uint64_t hi = lo + chunk < total ? lo + chunk : total;
        return enumerate_range(k, lo, hi);
      });
  RangeBest<T> best;
  for (const auto& rb : bests) {
    if (!rb.valid) continue;
    if (!best.valid || rb.value > best.value) best = rb;
  }
  LocalBoundResult res;
  res.exact = true;
  res.witness.alice = map_from_lex_index(best.alice_idx, c.m, c.o);
  res.value = best_response_value(c, res.witness.alice, &res.witness.bob);
  return res;
}

struct SeesawBest {
  double value = 0;
  std::vector<int> alice, bob;
  bool valid = false;
};

bool better(const SeesawBest& a, const SeesawBest& b, int o) {
  if (!b.valid) return a.valid;
  if (!a.valid) return false;
  if (a.value != b.value) return a.value > b.value;
  std::uint64_t ai = map_lex_index(a.alice, o), bi = map_lex_index(b.alice, o);
  if (ai != bi) return ai < bi;
  return map_lex_index(a.bob, o) < map_lex_index(b.bob, o);
}

double strategy_value(const Coeffs<double>& c, std::span<const int> alice,
                      std::span<const int> bob) {
  double v = 0;
  for (int x = 0; x < c.m; ++x) v += c.ma[std::size_t(x) * c.o + alice[x]];
  for (int y = 0; y < c.m; ++y) v += c.mb[std::size_t(y) * c.o + bob[y]];
  for (int x = 0; x < c.m; ++x)
    for (int y = 0; y < c.m; ++y) v += c.jrow(x, y, alice[x])[bob[y]];
  return v;
}

// One see-saw run to a fixed point. Alice responds first; ties pick the
// smallest output, so the fixed point is canonical for the given start.
SeesawBest seesaw_run(const Coeffs<double>& c, SplitMix64& rng, int max_sweeps) {
  int m = c.m, o = c.o;
  std::vector<int> alice(m), bob(m);
  for (int x = 0; x < m; ++x) alice[x] = int(rng.below(o));
  for (int y = 0; y < m; ++y) bob[y] = int(rng.below(o));
  std::vector<double> t(o);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool changed = false;
    for (int x = 0; x < m; ++x) {
      for (int a = 0; a < o; ++a) t[a] = c.ma[std::size_t(x) * o + a];
      for (int y = 0; y < m; ++y)
        for (int a = 0; a < o; ++a) t[a] += c.jrow(x, y, a)[bob[y]];
      int arg = 0;
      for (int a = 1; a < o; ++a)
        if (t[a] > t[arg]) arg = a;
      if (arg != alice[x]) {
        alice[x] = arg;
        changed = true;
      }
    }
    for (int y = 0; y < m; ++y) {
      for (int b = 0; b < o; ++b) t[b] = c.mb[std::size_t(y) * o + b];
      for (int x = 0; x < m; ++x) {
        const double* row = c.jrow(x, y, alice[x]);
        for (int b = 0; b < o; ++b) t[b] += row[b];
      }
      int arg = 0;
      for (int b = 1; b < o; ++b)
        if (t[b] > t[arg]) arg = b;
      if (arg != bob[y]) {
        bob[y] = arg;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return SeesawBest{strategy_value(c, alice, bob), std::move(alice), std::move(bob), true};
}

}  // namespace

double best_response_value(const BellFunctional& c, std::span<const int> alice,
                           std::vector<int>* bob_out) {
  if (int(alice.size()) != c.m) throw InputError("best_response_value: map length mismatch");
  double v = 0;
  if (!c.marg_a.empty())
    for (int x = 0; x < c.m; ++x) v += c.marg_a[std::size_t(x) * c.o + alice[x]];
  if (bob_out) bob_out->assign(c.m, 0);
  for (int y = 0; y < c.m; ++y) {
    double best = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int b = 0; b < c.o; ++b) {
      double s = c.marg_b.empty() ? 0.0 : c.marg_b[std::size_t(y) * c.o + b];
      for (int x = 0; x < c.m; ++x) s += c.jat(x, y, alice[x], b);
      if (s > best) {
        best = s;
        arg = b;
      }
    }
    v += best;
    if (bob_out) (*bob_out)[y] = arg;
  }
  return v;
}

LocalBoundResult local_bound_exact(const BellFunctional& c, const LocalBoundOptions& opts) {
  std::uint64_t total = strategy_count(c.m, c.o);
  if (total > opts.exact_cap)
    throw InputError("local_bound_exact: " + std::to_string(total) +
                     " Alice maps exceed the cap; use the heuristic bound");
  if (c.integral) return exact_impl<std::int64_t>(c, opts);
  return exact_impl<double>(c, opts);
}

LocalBoundResult local_bound_heuristic(const BellFunctional& c, const LocalBoundOptions& opts) {
  if (opts.restarts < 1) throw InputError("local_bound_heuristic: restarts must be >= 1");
  Coeffs<double> k = convert<double>(c);
  constexpr int kChunk = 16;  // restarts per task, fixed for determinism
  int ntasks = (opts.restarts + kChunk - 1) / kChunk;
  auto bests = run_tasks<SeesawBest>(ntasks, opts.threads, [&](int task) {
    SeesawBest best;
    int lo = task * kChunk;
    int hi = std::min(opts.restarts, lo + kChunk);
    for (int r = lo; r < hi; ++r) {
      SplitMix64 rng(mix_seed(opts.seed, std::uint64_t(r)));
      SeesawBest cand = seesaw_run(k, rng, opts.max_sweeps);
      if (better(cand, best, c.o)) best = std::move(cand);
    }
    return best;
  });
  SeesawBest best;
  for (auto& cand : bests)
    if (better(cand, best, c.o)) best = std::move(cand);
  LocalBoundResult res;
  res.exact = false;
  res.value = best.value;
  res.witness = DeterministicStrategy{std::move(best.alice), std::move(best.bob)};
  return res;
}

OracleResult oracle_max_overlap(const BellFunctional& direction,
                                const LocalBoundOptions& opts, bool exact) {
  LocalBoundResult lb =
      exact ? local_bound_exact(direction, opts) : local_bound_heuristic(direction, opts);
  return OracleResult{std::move(lb.witness), lb.value, lb.exact};
}

namespace {

template <class T>
std::vector<OracleResult> exact_pool_impl(const BellFunctional& c,
                                          const LocalBoundOptions& opts, int limit) {
  Coeffs<T> k = convert<T>(c);
  if constexpr (std::is_same_v<T, std::int64_t>) check_integer_headroom(k);
  std::uint64_t total = strategy_count(c.m, c.o);
  std::uint64_t ntasks = total < 256 ? total : 256;
  std::uint64_t chunk = (total + ntasks - 1) / ntasks;
  auto bests = run_tasks<RangeBest<T>>(
      int(ntasks), opts.threads, [&](int i) {
        std::uint64_t lo = std::uint64_t(i) * chunk;
        std::uint64_t hi = lo + chunk < total ? lo + chunk : total;
        return enumerate_range(k, lo, hi);
      });
  std::erase_if(bests, [](const RangeBest<T>& rb) { return !rb.valid; });
  std::sort(bests.begin(), bests.end(), [](const RangeBest<T>& a, const RangeBest<T>& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.alice_idx < b.alice_idx;
  });
  if (int(bests.size()) > limit) bests.resize(limit);
  std::vector<OracleResult> pool;
  pool.reserve(bests.size());
  for (const auto& rb : bests) {
    OracleResult r;
    r.exact = true;
    r.vertex.alice = map_from_lex_index(rb.alice_idx, c.m, c.o);
    r.overlap = best_response_value(c, r.vertex.alice, &r.vertex.bob);
    pool.push_back(std::move(r));
  }
  return pool;
}

}  // namespace

std::vector<OracleResult> oracle_overlap_pool(const BellFunctional& direction,
                                              const LocalBoundOptions& opts, bool exact,
                                              int limit) {
  if (limit < 1) throw InputError("oracle_overlap_pool: limit must be >= 1");
  if (exact) {
    std::uint64_t total = strategy_count(direction.m, direction.o);
    if (total > opts.exact_cap)
      throw InputError("oracle_overlap_pool: " + std::to_string(total) +
                       " Alice maps exceed the cap; use the heuristic oracle");
    if (direction.integral) return exact_pool_impl<std::int64_t>(direction, opts, limit);
    return exact_pool_impl<double>(direction, opts, limit);
  }

  if (opts.restarts < 1) throw InputError("oracle_overlap_pool: restarts must be >= 1");
  Coeffs<double> k = convert<double>(direction);
  constexpr int kChunk = 16;
  int ntasks = (opts.restarts + kChunk - 1) / kChunk;
  auto pools = run_tasks<std::vector<SeesawBest>>(ntasks, opts.threads, [&](int task) {
    std::vector<SeesawBest> found;
    int lo = task * kChunk;
    int hi = std::min(opts.restarts, lo + kChunk);
    for (int r = lo; r < hi; ++r) {
      SplitMix64 rng(mix_seed(opts.seed, std::uint64_t(r)));
      SeesawBest cand = seesaw_run(k, rng, opts.max_sweeps);
      bool dup = false;
      for (const auto& f : found)
        dup |= f.alice == cand.alice && f.bob == cand.bob;
      if (!dup) found.push_back(std::move(cand));
    }
    return found;
  });
  std::vector<SeesawBest> all;
  for (auto& p : pools)
    for (auto& cand : p) all.push_back(std::move(cand));
  std::sort(all.begin(), all.end(), [&](const SeesawBest& a, const SeesawBest& b) {
    return better(a, b, direction.o);
  });
  all.erase(std::unique(all.begin(), all.end(),
                        [](const SeesawBest& a, const SeesawBest& b) {
                          return a.alice == b.alice && a.bob == b.bob;
                        }),
            all.end());
  if (int(all.size()) > limit) all.resize(limit);
  std::vector<OracleResult> pool;
  pool.reserve(all.size());
  for (auto& cand : all)
    pool.push_back(OracleResult{
        DeterministicStrategy{std::move(cand.alice), std::move(cand.bob)}, cand.value,
        false});
  return pool;
}

}  // namespace belldet
