#pragma once

#include <string>

#include "belldet/efficiency.hpp"
#include "belldet/functional.hpp"
#include "belldet/local_bound.hpp"

namespace belldet {

enum class BoundProvenance { kExact, kHeuristic };

// The five functional values that determine detection thresholds:
// Q both click, M_A only Alice clicks, M_B only Bob clicks, X neither,
// L the local bound.
struct ThresholdReport {
  int n = 0;
  double q = 0, l = 0, m_a = 0, m_b = 0, x = 0;
  BoundProvenance l_provenance = BoundProvenance::kExact;
  DeterministicStrategy l_witness;
  double eta_sym = 0, eta_asym = 0;  // NaN when undefined / not computed
  bool two_roots = false;            // quadratic had two roots in (0,1]
};

// Evaluates the profile of c against the ideal distribution under the given
// non-detection policy. c may be given over o outputs (padded internally for
// ExtraOutcome) or already over o+1. eta fields are left NaN; use eta_sym /
// eta_asym.
ThresholdReport profile(const BellFunctional& c, const MultiCopyDistribution& dist,
                        NoClickPolicy policy, const LocalBoundOptions& opts = {});

// Symmetric threshold eta_A = eta_B = eta: smallest root in (0,1] of
//   eta^2 Q + eta(1-eta)(M_A+M_B) + (1-eta)^2 X = L,
// which for X = L collapses to (2L-M_A-M_B)/(Q+L-M_A-M_B).
// Requires Q > L. Sets report.eta_sym and the two_roots flag.
double eta_sym(ThresholdReport& report);

// Quadratic path without the X = L shortcut, exposed for the degeneracy
// cross-check. two_roots, when non-null, reports root multiplicity in (0,1].
double eta_sym_quadratic(double q, double l, double m_a, double m_b, double x,
                         bool* two_roots = nullptr);

// Asymmetric threshold with Alice's detector perfect and Bob's at eta:
// eta = (L - M_A)/(Q - M_A). Requires Q > M_A.
double eta_asym(ThresholdReport& report);

// Correlation-form thresholds from the quantum/local ratio:
// eta_sym = 2/(ratio+1), eta_asym = 1/ratio. Requires ratio > 1.
struct CorrelationThresholds {
  double eta_sym = 0, eta_asym = 0;
};
CorrelationThresholds correlation_thresholds(double q_over_l);

std::string to_string(BoundProvenance p);

}  // namespace belldet
