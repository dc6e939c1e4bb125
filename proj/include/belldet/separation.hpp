#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "belldet/efficiency.hpp"
#include "belldet/functional.hpp"
#include "belldet/local_bound.hpp"
#include "belldet/simplex.hpp"
#include "belldet/thresholds.hpp"

namespace belldet {

enum class ConstraintSource { kFullEnumeration, kRowGeneration };
enum class SeparationStatus { kSeparated, kInside, kToleranceLimit };

struct SeparationOptions {
  ConstraintSource source = ConstraintSource::kRowGeneration;
  int oracle_restarts = 50;       // see-saw restarts per oracle call (row generation)
  std::uint64_t seed = 1;
  double bound_floor = 64.0;      // B in the box -B <= C <= 1
  int max_iterations = 2000;      // oracle rounds
  int batch_columns = 24;         // violated vertices admitted per oracle round
  double violation_tol = 1e-9;    // stop when no vertex violates beyond this
  double separated_tol = 1e-9;    // Q* above this counts as separated
  int threads = 0;
  SimplexOptions lp;
};

struct SeparationResult {
  SeparationStatus status = SeparationStatus::kToleranceLimit;
  double objective = 0;           // Q* = C.target at the LP optimum
  BellFunctional functional;      // over the table's full output range
  int iterations = 0;
  int constraint_count = 0;       // vertex constraints materialized
  double max_violation = 0;       // from the final verification sweep
  bool verified_exhaustive = false;
  double decomposition_weight = 0;  // sum of vertex weights when inside
};

// Maximize C.target over functionals with C.P_D <= 0 for all deterministic
// vertices and -B <= C <= 1 entrywise, in Collins-Gisin block coordinates.
// Solved as the dual (column form); full-enumeration mode certifies the
// result with an explicit sweep over all o^m x o^m vertices.
SeparationResult separate(const DeflatedPoint& target, const SeparationOptions& opts);

enum class EfficiencyMode { kSymmetric, kAsymmetric };  // asymmetric: eta_A = 1

struct BisectionOptions {
  SeparationOptions separation;
  double resolution = 1e-4;
  double decision_tol = 1e-6;     // Q* above this counts as nonlocal in the search
  LocalBoundOptions local_bound;  // for certification profiles
  std::int64_t max_denominator = 4096;
  bool certify = true;
};

struct ThresholdSearchResult {
  double eta = 1.0;               // smallest grid point with Q* > decision_tol
  double eta_lo = 0.0;            // largest grid point found local
  SeparationResult at_eta;
  int lp_solves = 0;
  // Certification: integer functional from the refinement loop, its profile,
  // and the resulting analytic threshold (eta_sym or eta_asym per mode).
  std::optional<BellFunctional> certified;
  std::optional<ThresholdReport> certified_profile;
  double certified_eta = 0;
};

DeflatedPoint deflate_for_mode(const MultiCopyDistribution& ideal, double eta,
                               EfficiencyMode mode, NoClickPolicy policy);

// Bisects eta on [0.5,1] (symmetric) or [0.3,1] (asymmetric) to the requested
// resolution, then (optionally) refines an integer certificate functional
// whose own analytic threshold converges onto the true boundary.
ThresholdSearchResult threshold_by_bisection(const MultiCopyDistribution& ideal,
                                             EfficiencyMode mode, NoClickPolicy policy,
                                             const BisectionOptions& opts);

struct RationalizeInfo {
  std::int64_t denominator = 1;
  bool exact_fit = false;  // entries sat on a common grid within tolerance
};

// Scales to a common denominator q <= max_denominator and rounds to integers.
// Prefers the smallest q on which all entries sit within 1e-6; otherwise
// rounds at max_denominator. Callers re-verify separation/threshold status on
// the result. Throws InputError when everything rounds to zero.
BellFunctional rationalize(const BellFunctional& c, std::int64_t max_denominator,
                           RationalizeInfo* info = nullptr);

}  // namespace belldet
