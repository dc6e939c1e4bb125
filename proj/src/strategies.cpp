#include "belldet/strategies.hpp"

#include <limits>
#include <string>

namespace belldet {

std::uint64_t strategy_count(int m, int o) {
  if (m < 1 || o < 1) throw InputError("strategy_count: need m, o >= 1");
  std::uint64_t n = 1;
  for (int i = 0; i < m; ++i) {
    if (n > std::numeric_limits<std::uint64_t>::max() / std::uint64_t(o))
      return std::numeric_limits<std::uint64_t>::max();
    n *= std::uint64_t(o);
  }
  return n;
}

std::uint64_t map_lex_index(std::span<const int> map, int o) {
  std::uint64_t idx = 0;
  for (int v : map) idx = idx * std::uint64_t(o) + std::uint64_t(v);
  return idx;
}

std::vector<int> map_from_lex_index(std::uint64_t idx, int m, int o) {
  std::vector<int> map(m, 0);
  for (int x = m - 1; x >= 0; --x) {
    map[x] = int(idx % std::uint64_t(o));
    idx /= std::uint64_t(o);
  }
  return map;
}

Behavior strategy_point(const DeterministicStrategy& s, int m, int o) {
  if (int(s.alice.size()) != m || int(s.bob.size()) != m)
    throw InputError("strategy_point: map length mismatch");
  for (int v : s.alice)
    if (v < 0 || v >= o) throw InputError("strategy_point: Alice output out of range");
  for (int v : s.bob)
    if (v < 0 || v >= o) throw InputError("strategy_point: Bob output out of range");
  Behavior p(m, o);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) p.at(x, y, s.alice[x], s.bob[y]) = 1.0;
  return p;
}

}  // namespace belldet
