#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "belldet/efficiency.hpp"
#include "belldet/functional.hpp"
#include "belldet/local_bound.hpp"

namespace belldet {

struct GilbertConfig {
  double epsilon = 1e-3;        // distance below which the target counts as inside
  int memory = 50;              // kept vertex atoms (1..200)
  int max_iterations = 20000;
  bool symmetrize = true;       // average atoms/target over copy permutations
  bool party_symmetrize = false;
  bool exact_oracle = false;
  int restarts = 50;            // see-saw restarts per oracle call
  std::uint64_t seed = 1;
  double gap_tol = 1e-12;       // Frank-Wolfe gap stall threshold
  int threads = 0;
  int log_every = 50;
};

enum class GilbertVerdict { kSeparated, kInside, kIterationLimit };

struct GilbertLogEntry {
  int iteration = 0;
  double distance = 0;
  double gap = 0;
};

struct GilbertWitness {
  std::vector<double> direction;  // target - inner point, full-table layout
  double distance = 0;            // Euclidean norm of direction
  BellFunctional functional;      // joint-only view of direction
  std::vector<double> inner_point;
};

struct GilbertOutcome {
  GilbertWitness witness;
  GilbertVerdict verdict = GilbertVerdict::kIterationLimit;
  bool converged = false;  // stopped by a rule, not the iteration cap
  int iterations = 0;
  double final_gap = 0;
  std::vector<GilbertLogEntry> log;
};

// Distance from the deflated point to the local polytope: oracle step toward
// the best-overlap vertex, then a hull reoptimization over the running point
// plus the remembered atoms. The distance sequence is non-increasing by
// construction; the smallest-weight atom is evicted past the memory limit.
GilbertOutcome gilbert_distance(const DeflatedPoint& target, const GilbertConfig& config);

// min || target - sum w_i atom_i ||  s.t.  w >= 0, sum w = 1, by active-set
// least squares on the Gram system; falls back to a two-point line search
// from `weights` (which also serves as the warm start) on numerical failure.
// Returns the projected point; weights is resized/overwritten.
std::vector<double> reoptimize_hull(std::span<const double> target,
                                    const std::vector<std::vector<double>>& atoms,
                                    std::vector<double>& weights);

// Averages a full-table vector over all n! simultaneous copy permutations
// applied to (a,b,x,y) on both parties. Idempotent. Scenario must have
// m = o = 2^n.
std::vector<double> symmetrize(std::span<const double> v, int copies);

// Optional additional symmetry: average v(a,b,x,y) with v(b,a,y,x).
std::vector<double> party_symmetrize(std::span<const double> v, int m, int o);

}  // namespace belldet
