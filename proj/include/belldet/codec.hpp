#pragma once

#include <cstdint>
#include <span>

namespace belldet {

// Composite-index codec for n-copy scenarios: copy i occupies bit i of the
// composite input/output index, so copy 1 is the least significant bit.
// Every module uses this encoding.

inline int codec_bit(int composite, int copy) { return (composite >> copy) & 1; }

inline int codec_compose(std::span<const int> bits) {
  int v = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) v |= (bits[i] & 1) << i;
  return v;
}

// Applies a copy permutation: bit i of the result is bit perm[i] of v.
inline int codec_permute(int v, std::span<const int> perm) {
  int r = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) r |= codec_bit(v, perm[i]) << i;
  return r;
}

}  // namespace belldet
