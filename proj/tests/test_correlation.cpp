#include <doctest.h>

#include <cmath>

#include "belldet/codec.hpp"
#include "belldet/correlation.hpp"

using namespace belldet;

namespace {

const double kRoot2 = std::sqrt(2.0);

MeasurementFamily chsh_alice() {
  return {'A', {{1, 0, 0}, {0, 0, 1}}};
}

MeasurementFamily chsh_bob() {
  const double r = 1.0 / kRoot2;
  return {'B', {{r, 0, r}, {r, 0, -r}}};
}

}  // namespace

TEST_SUITE("correlation") {

TEST_CASE("single copy matches the closed form") {
  Behavior p = chsh_optimal_single_copy();
  REQUIRE(p.m() == 2);
  REQUIRE(p.o() == 2);
  // frozen: 1/4 (1 + sqrt(2)/2)
  CHECK(p.at(0, 0, 0, 0) == doctest::Approx(0.4267766952966369).epsilon(1e-15));
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          double sign = ((a ^ b) ^ (x & y)) ? -1.0 : 1.0;
          CHECK(p.at(x, y, a, b) ==
                doctest::Approx(0.25 * (1.0 + sign * kRoot2 / 2.0)).epsilon(1e-15));
        }
  p.validate(1e-12);
}

TEST_CASE("optimal table equals its Bloch-vector construction") {
  Behavior direct = chsh_optimal_single_copy();
  Behavior bloch = single_copy_from_bloch(chsh_alice(), chsh_bob());
  for (std::size_t i = 0; i < direct.data().size(); ++i)
    CHECK(std::abs(direct.data()[i] - bloch.data()[i]) < 1e-12);
}

TEST_CASE("aligned z measurements give perfect correlation") {
  MeasurementFamily az{'A', {{0, 0, 1}, {0, 0, 1}}};
  MeasurementFamily bz{'B', {{0, 0, 1}, {0, 0, 1}}};
  Behavior p = single_copy_from_bloch(az, bz);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          CHECK(p.at(x, y, a, b) == doctest::Approx(a == b ? 0.5 : 0.0).epsilon(1e-15));
}

TEST_CASE("orthogonal measurements give uniform outcomes") {
  MeasurementFamily ax{'A', {{1, 0, 0}, {1, 0, 0}}};
  MeasurementFamily bz{'B', {{0, 0, 1}, {0, 0, 1}}};
  Behavior p = single_copy_from_bloch(ax, bz);
  for (double v : p.data()) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("bad measurement families are rejected") {
  MeasurementFamily ok{'A', {{1, 0, 0}, {0, 0, 1}}};
  MeasurementFamily non_unit{'B', {{1, 0, 0}, {0, 0, 1.5}}};
  MeasurementFamily short_fam{'B', {{1, 0, 0}}};
  CHECK_THROWS_AS(single_copy_from_bloch(ok, non_unit), InputError);
  CHECK_THROWS_AS(single_copy_from_bloch(ok, short_fam), InputError);
}

TEST_CASE("tensor power with one copy is the base table") {
  Behavior base = chsh_optimal_single_copy();
  MultiCopyDistribution d = tensor_power(base, 1);
  CHECK(d.copies == 1);
  for (std::size_t i = 0; i < base.data().size(); ++i)
    CHECK(d.table.data()[i] == base.data()[i]);
}

TEST_CASE("two copies factorize entry by entry") {
  Behavior base = chsh_optimal_single_copy();
  MultiCopyDistribution d = tensor_power(base, 2);
  REQUIRE(d.table.m() == 4);
  REQUIRE(d.table.o() == 4);
  // frozen: ((2+sqrt(2))/8)^2 = (6+4 sqrt(2))/64
  CHECK(d.table.at(0, 0, 0, 0) == doctest::Approx(0.18213834764831846).epsilon(1e-15));
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          double want = base.at(codec_bit(x, 0), codec_bit(y, 0), codec_bit(a, 0),
                                codec_bit(b, 0)) *
                        base.at(codec_bit(x, 1), codec_bit(y, 1), codec_bit(a, 1),
                                codec_bit(b, 1));
          CHECK(d.table.at(x, y, a, b) == doctest::Approx(want).epsilon(1e-15));
        }
  d.table.validate(1e-12);
}

TEST_CASE("tensor power rejects bad copy counts") {
  Behavior base = chsh_optimal_single_copy();
  CHECK_THROWS_AS(tensor_power(base, 0), InputError);
  CHECK_THROWS_AS(tensor_power(base, 5), InputError);  // default cap is 4
  CHECK_THROWS_AS(tensor_power(Behavior(3, 2), 1), InputError);
  CHECK_NOTHROW(tensor_power(base, 5, 5));
}

TEST_CASE("marginals are input-independent sums") {
  MultiCopyDistribution d = tensor_power(chsh_optimal_single_copy(), 2);
  MarginalTables mt = marginals(d);
  int m = d.table.m(), o = d.table.o();
  for (int x = 0; x < m; ++x)
    for (int a = 0; a < o; ++a) {
      // same value from every y page
      for (int y = 0; y < m; ++y) {
        double s = 0;
        for (int b = 0; b < o; ++b) s += d.table.at(x, y, a, b);
        CHECK(std::abs(s - mt.a[std::size_t(x) * o + a]) < 1e-12);
      }
    }
  double row = 0;
  for (int a = 0; a < o; ++a) row += mt.a[a];
  CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("marginals reject a signaling table") {
  MultiCopyDistribution d = tensor_power(chsh_optimal_single_copy(), 1);
  d.table.at(0, 0, 0, 0) += 1e-6;
  d.table.at(0, 0, 0, 1) -= 1e-6;  // keeps normalization, breaks no-signaling
  CHECK_THROWS_AS(marginals(d), InputError);
}

}  // TEST_SUITE
