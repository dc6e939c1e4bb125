#include "belldet/correlation.hpp"

#include <cmath>
#include <string>

#include "belldet/codec.hpp"

namespace belldet {

Behavior chsh_optimal_single_copy() {
  Behavior p(2, 2);
  const double r = std::sqrt(2.0) / 2.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          int sign = ((a ^ b) + x * y) % 2 ? -1 : 1;
          p.at(x, y, a, b) = 0.25 * (1.0 + sign * r);
        }
  return p;
}

Behavior single_copy_from_bloch(const MeasurementFamily& alice,
                                const MeasurementFamily& bob) {
  if (alice.settings.size() != 2 || bob.settings.size() != 2)
    throw InputError("single copy needs two settings per party");
  for (const auto& fam : {alice, bob})
    for (const auto& v : fam.settings)
      if (std::abs(v.norm2() - 1.0) > 1e-9)
        throw InputError("measurement direction is not a unit vector");

  Behavior p(2, 2);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const BlochVector& a_dir = alice.settings[x];
      BlochVector b_dir = bob.settings[y];
      b_dir.y = -b_dir.y;  // the partial transpose on Bob's side
      double corr = dot(a_dir, b_dir);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          p.at(x, y, a, b) = 0.25 * (1.0 + ((a ^ b) ? -1 : 1) * corr);
    }
  return p;
}

MultiCopyDistribution tensor_power(const Behavior& base, int n, int cap) {
  if (base.m() != 2 || base.o() != 2)
    throw InputError("tensor power expects a 2-input/2-output base");
  if (n < 1) throw InputError("copy count must be >= 1");
  if (n > cap)
    throw InputError("copy count " + std::to_string(n) + " exceeds the tensor cap " +
                     std::to_string(cap) + " (2^(4n) entries)");
  int side = 1 << n;
  Behavior t(side, side);
  for (int x = 0; x < side; ++x)
    for (int y = 0; y < side; ++y)
      for (int a = 0; a < side; ++a)
        for (int b = 0; b < side; ++b) {
          double v = 1.0;
          for (int i = 0; i < n; ++i)
            v *= base.at(codec_bit(x, i), codec_bit(y, i), codec_bit(a, i),
                         codec_bit(b, i));
          t.at(x, y, a, b) = v;
        }
  t.validate(1e-12);
  return MultiCopyDistribution{n, std::move(t)};
}

MarginalTables marginals(const MultiCopyDistribution& dist, double tol) {
  dist.table.validate(tol);
  return MarginalTables{dist.table.marginal_a(), dist.table.marginal_b()};
}

}  // namespace belldet
