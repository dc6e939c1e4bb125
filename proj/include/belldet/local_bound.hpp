#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "belldet/functional.hpp"
#include "belldet/strategies.hpp"

namespace belldet {

struct LocalBoundOptions {
  int restarts = 200;        // see-saw restarts (heuristic mode)
  std::uint64_t seed = 1;
  int max_sweeps = 1000;     // see-saw sweep cap per restart
  int threads = 0;           // 0 = resolve from env / hardware
  std::uint64_t exact_cap = std::uint64_t(1) << 25;  // max Alice maps to enumerate
};

struct LocalBoundResult {
  double value = 0;
  DeterministicStrategy witness;
  bool exact = false;
};

// Value of the best Bob response to a fixed Alice map:
// sum_x C^A(alice[x]|x) + sum_y max_b [ C^B(b|y) + sum_x C(alice[x],b|x,y) ].
// Ties go to the smallest b. If bob_out is given, the maximizing map is
// stored there.
double best_response_value(const BellFunctional& c, std::span<const int> alice,
                           std::vector<int>* bob_out = nullptr);

// Exact local bound L = max over all o^m Alice maps of best_response_value,
// enumerated with incremental score updates and a parallel max-reduction.
// Deterministic: ties resolve to the lexicographically smallest Alice map
// (then smallest Bob outputs), independent of thread count. Integer-flagged
// functionals are enumerated in 64-bit integer arithmetic.
// Throws InputError when o^m exceeds opts.exact_cap.
LocalBoundResult local_bound_exact(const BellFunctional& c,
                                   const LocalBoundOptions& opts = {});

// Alternating per-input best responses (see-saw) from seeded random starts.
// Returns the best fixed point over all restarts; always a lower bound on L.
// Deterministic given (inputs, seed), independent of parallelism degree.
LocalBoundResult local_bound_heuristic(const BellFunctional& c,
                                       const LocalBoundOptions& opts = {});

struct OracleResult {
  DeterministicStrategy vertex;
  double overlap = 0;
  bool exact = false;
};

// Vertex maximizing the overlap with a direction functional; thin wrapper
// over the two bound engines (the oracle used by Gilbert and row generation).
OracleResult oracle_max_overlap(const BellFunctional& direction,
                                const LocalBoundOptions& opts, bool exact);

// Up to `limit` distinct vertices with the highest overlaps, best first; the
// front entry matches oracle_max_overlap. Heuristic mode pools the see-saw
// fixed points across restarts, exact mode the per-range enumeration maxima.
// Row generation feeds the whole pool to the master instead of one cut.
std::vector<OracleResult> oracle_overlap_pool(const BellFunctional& direction,
                                              const LocalBoundOptions& opts,
                                              bool exact, int limit);

}  // namespace belldet
