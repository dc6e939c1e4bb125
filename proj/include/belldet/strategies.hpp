#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "belldet/behavior.hpp"

namespace belldet {

// A local deterministic strategy: each party's response map input -> output.
// A vertex of the local polytope.
struct DeterministicStrategy {
  std::vector<int> alice;
  std::vector<int> bob;
};

// o^m, saturating at 2^64-1 when the true count overflows. Callers gate
// enumeration by comparing against caps far below the saturation point.
std::uint64_t strategy_count(int m, int o);

// Lexicographic rank of a map, entry 0 most significant: maps are ordered as
// words read from input 0 upward.
std::uint64_t map_lex_index(std::span<const int> map, int o);
std::vector<int> map_from_lex_index(std::uint64_t idx, int m, int o);

// P_D(a,b|x,y) = [a = alice[x]] [b = bob[y]].
Behavior strategy_point(const DeterministicStrategy& s, int m, int o);

}  // namespace belldet
