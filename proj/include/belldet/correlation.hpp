#pragma once

#include <vector>

#include "belldet/behavior.hpp"

namespace belldet {

struct BlochVector {
  double x = 0, y = 0, z = 0;
  double norm2() const { return x * x + y * y + z * z; }
};

inline double dot(const BlochVector& u, const BlochVector& v) {
  return u.x * v.x + u.y * v.y + u.z * v.z;
}

struct MeasurementFamily {
  char party = 'A';
  std::vector<BlochVector> settings;
};

// n-fold tensor power of a 2-input/2-output base table; composite indices use
// the codec of codec.hpp (copy 1 = least significant bit).
struct MultiCopyDistribution {
  int copies = 0;
  Behavior table;
};

// The CHSH-optimal singlet-frame statistics:
// P(a,b|x,y) = 1/4 (1 + (-1)^(a xor b) (-1)^(x y) sqrt(2)/2).
Behavior chsh_optimal_single_copy();

// P(a,b|x,y) = 1/4 (1 + (-1)^(a xor b) a_x . b'_y), b' = (b1, -b2, b3).
// Requires two settings per party and unit vectors (tolerance 1e-9).
Behavior single_copy_from_bloch(const MeasurementFamily& alice,
                                const MeasurementFamily& bob);

// Product table over n independent copies. Default cap keeps the tensor at
// 2^(4n) entries; exceeding it is an error, not an allocation attempt.
MultiCopyDistribution tensor_power(const Behavior& base, int n, int cap = 4);

struct MarginalTables {
  std::vector<double> a;  // x*o + a
  std::vector<double> b;  // y*o + b
};

// Per-party marginals with an explicit y-independence (no-signaling) check.
MarginalTables marginals(const MultiCopyDistribution& dist, double tol = 1e-12);

}  // namespace belldet
