#pragma once

#include <vector>

#include "belldet/behavior.hpp"
#include "belldet/correlation.hpp"

namespace belldet {

// What a party reports when its detector does not fire: the last existing
// outcome (index o-1), or a dedicated extra outcome appended per party.
enum class NoClickPolicy { kLastOutcome, kExtraOutcome };

struct EfficiencyModel {
  double eta_a = 1.0;
  double eta_b = 1.0;
  NoClickPolicy policy = NoClickPolicy::kLastOutcome;
};

// The finite-efficiency behavior: mixture of the four click patterns
//   eta_A eta_B       : ideal table
//   eta_A (1-eta_B)   : P^A(a|x) x [b = assigned]
//   (1-eta_A) eta_B   : [a = assigned] x P^B(b|y)
//   (1-eta_A)(1-eta_B): [a = assigned][b = assigned]
// where "assigned" is o-1 (LastOutcome) or the appended outcome (ExtraOutcome).
struct DeflatedPoint {
  Behavior table;          // o outputs (LastOutcome) or o+1 (ExtraOutcome)
  EfficiencyModel model;
  int copies = 0;
  int ideal_outputs = 0;   // o of the ideal table
};

DeflatedPoint deflate(const MultiCopyDistribution& dist, const EfficiencyModel& model);

// Collins-Gisin reduction: square matrix of side m(o-1)+1. Row/column 0 is
// the unit; row 1 + x(o-1) + a carries Alice's (a|x) for a < o-1, columns
// likewise for Bob. Entry (0,0)=1, (r,0)=P^A(a|x), (0,c)=P^B(b|y),
// (r,c)=P(a,b|x,y).
struct CollinsGisinPoint {
  int m = 0;
  int o = 0;  // outputs of the represented table (o+1 under ExtraOutcome)
  NoClickPolicy policy = NoClickPolicy::kLastOutcome;
  std::vector<double> mat;

  int side() const { return m * (o - 1) + 1; }
  double at(int r, int c) const { return mat[std::size_t(r) * side() + c]; }
  double& at(int r, int c) { return mat[std::size_t(r) * side() + c]; }
};

CollinsGisinPoint to_collins_gisin(const DeflatedPoint& point);

// Rebuilds the full table; the dropped outcome's entries come from
// normalization and no-signaling. Entries must land in [-1e-10, 1+1e-10].
Behavior from_collins_gisin(const CollinsGisinPoint& cg);

}  // namespace belldet
