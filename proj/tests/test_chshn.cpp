#include <doctest.h>

#include <cmath>

#include "belldet/chshn.hpp"
#include "belldet/correlation.hpp"
#include "belldet/thresholds.hpp"

using namespace belldet;

TEST_SUITE("chshn") {

TEST_CASE("coefficients are the bitwise win condition") {
  for (int n = 1; n <= 3; ++n) {
    BellFunctional c = chshn_build(n);
    int side = 1 << n;
    REQUIRE(c.m == side);
    REQUIRE(c.o == side);
    CHECK(c.integral);
    CHECK(!c.has_marginals());
    for (int x = 0; x < side; ++x)
      for (int y = 0; y < side; ++y)
        for (int a = 0; a < side; ++a)
          for (int b = 0; b < side; ++b)
            CHECK(c.jat(x, y, a, b) == ((a ^ b) == (x & y) ? 1.0 : 0.0));
  }
}

TEST_CASE("every input pair and Alice outcome has exactly one winning Bob outcome") {
  BellFunctional c = chshn_build(2);
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y)
      for (int a = 0; a < 4; ++a) {
        int hits = 0;
        for (int b = 0; b < 4; ++b) hits += c.jat(x, y, a, b) == 1.0;
        CHECK(hits == 1);
      }
}

TEST_CASE("quantum value is the single-copy power") {
  const double base = 2.0 + std::sqrt(2.0);
  for (int n = 1; n <= 4; ++n)
    CHECK(chshn_quantum_value(n) == doctest::Approx(std::pow(base, n)).epsilon(1e-12));
  // direct evaluation against the tensor table
  for (int n = 1; n <= 3; ++n) {
    MultiCopyDistribution d = tensor_power(chsh_optimal_single_copy(), n);
    CHECK(evaluate(chshn_build(n), d.table) ==
          doctest::Approx(std::pow(base, n)).epsilon(1e-12));
  }
}

TEST_CASE("local bounds, exact and heuristic") {
  CHECK(chshn_local_bound(1, true).value == 3.0);
  CHECK(chshn_local_bound(2, true).value == 10.0);
  LocalBoundOptions opts;
  opts.restarts = 100;
  CHECK(chshn_local_bound(1, false, opts).value == 3.0);
  CHECK(chshn_local_bound(2, false, opts).value == 10.0);
}

TEST_CASE("analytic upper bound dominates the exact bound") {
  const double phi = 1.0 + std::sqrt(5.0);
  CHECK(chshn_ambainis_bound(1) == doctest::Approx(phi).epsilon(1e-12));
  CHECK(chshn_ambainis_bound(3) == doctest::Approx(phi * phi * phi).epsilon(1e-12));
  CHECK(chshn_ambainis_bound(1) >= 3.0);
  CHECK(chshn_ambainis_bound(2) >= 10.0);
  CHECK(chshn_ambainis_bound(3) >= 31.0);
}

TEST_CASE("threshold closed forms at known bounds") {
  // n=1: L=3, M=2, Q=2+sqrt(2)
  CHECK(chshn_eta_sym(3, 1) == doctest::Approx(2.0 * (std::sqrt(2.0) - 1.0)).epsilon(1e-12));
  CHECK(chshn_eta_asym(3, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  // n=2: L=10, M=4, Q=(2+sqrt(2))^2
  double q2 = std::pow(2.0 + std::sqrt(2.0), 2), l2 = 10, m2 = 4;
  CHECK(chshn_eta_sym(10, 2) ==
        doctest::Approx((2 * l2 - 2 * m2) / (q2 + l2 - 2 * m2)).epsilon(1e-12));
  CHECK(chshn_eta_asym(10, 2) == doctest::Approx((l2 - m2) / (q2 - m2)).epsilon(1e-12));
  // a larger L can only hurt
  CHECK(chshn_eta_sym(11, 2) > chshn_eta_sym(10, 2));
  CHECK(chshn_eta_asym(11, 2) > chshn_eta_asym(10, 2));
}

TEST_CASE("profile of the iterated game") {
  for (int n : {1, 2}) {
    ThresholdReport rep = profile(chshn_build(n), tensor_power(chsh_optimal_single_copy(), n),
                                  NoClickPolicy::kLastOutcome);
    CHECK(rep.q == doctest::Approx(std::pow(2.0 + std::sqrt(2.0), n)).epsilon(1e-12));
    CHECK(rep.l == (n == 1 ? 3.0 : 10.0));
    CHECK(rep.l_provenance == BoundProvenance::kExact);
    CHECK(rep.m_a == doctest::Approx(std::pow(2.0, n)).epsilon(1e-12));
    CHECK(rep.m_b == doctest::Approx(std::pow(2.0, n)).epsilon(1e-12));
    // the all-last vertex wins wherever x AND y share no set bits: 3^n pairs
    CHECK(rep.x == std::pow(3.0, n));
    CHECK(eta_asym(rep) == doctest::Approx(chshn_eta_asym(rep.l, n)).epsilon(1e-12));
  }

  // n=1 has X = L, so the profile threshold is the closed-form column
  ThresholdReport r1 = profile(chshn_build(1), tensor_power(chsh_optimal_single_copy(), 1),
                               NoClickPolicy::kLastOutcome);
  CHECK(eta_sym(r1) == doctest::Approx(chshn_eta_sym(3, 1)).epsilon(1e-12));
  CHECK(!r1.two_roots);

  // n=2 has X = 9 < L = 10 and takes the quadratic path; the table column
  // keeps the published X = L form, so the two differ slightly
  ThresholdReport r2 = profile(chshn_build(2), tensor_power(chsh_optimal_single_copy(), 2),
                               NoClickPolicy::kLastOutcome);
  double e2 = eta_sym(r2);
  CHECK(e2 == doctest::Approx(eta_sym_quadratic(r2.q, 10, 4, 4, 9)).epsilon(1e-12));
  CHECK(e2 == doctest::Approx(0.8798804085830054).epsilon(1e-12));  // frozen
  CHECK(e2 > chshn_eta_sym(10, 2));
}

TEST_CASE("threshold table rows") {
  auto rows = chshn_table1({1, 2, 4, 9, 12, 20});
  REQUIRE(rows.size() == 6);

  CHECK(rows[0].n == 1);
  CHECK(rows[0].eta_sym == doctest::Approx(2.0 * (std::sqrt(2.0) - 1.0)).epsilon(1e-12));
  CHECK(rows[0].eta_asym == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(rows[0].l_source == std::string("exact"));
  CHECK(!rows[0].eta_sym_empirical);
  CHECK(!rows[0].flagged);

  CHECK(rows[1].eta_sym == doctest::Approx(chshn_eta_sym(10, 2)).epsilon(1e-12));

  // beyond n=3 the formula column uses the analytic bound, and n=4..6 carry
  // empirical companions
  CHECK(rows[2].n == 4);
  CHECK(rows[2].l_source == std::string("ambainis"));
  REQUIRE(rows[2].eta_sym_empirical);
  CHECK(*rows[2].eta_sym_empirical == doctest::Approx(chshn_eta_sym(100, 4)).epsilon(1e-12));
  CHECK(rows[2].eta_sym == doctest::Approx(chshn_eta_sym(std::pow(1.0 + std::sqrt(5.0), 4), 4))
                               .epsilon(1e-12));

  CHECK(rows[3].flagged);  // n=9
  CHECK(rows[4].flagged);  // n=12
  CHECK(!rows[5].flagged);
  CHECK(!rows[5].eta_sym_empirical);
}

TEST_CASE("many copies eventually beat the single-copy threshold") {
  // the formula column first rises (n=2 is worse than n=1), the payoff is
  // asymptotic: L grows like (1+sqrt(5))^n against Q = (2+sqrt(2))^n
  auto rows = chshn_table1({1, 2, 13, 20, 50});
  CHECK(rows[1].eta_sym > rows[0].eta_sym);
  CHECK(rows[2].eta_sym < rows[0].eta_sym);
  CHECK(rows[3].eta_sym < rows[2].eta_sym);
  CHECK(rows[4].eta_sym < rows[3].eta_sym);
  CHECK(rows[2].eta_asym < rows[0].eta_asym);
  CHECK(rows[4].eta_asym < rows[3].eta_asym);
  for (const auto& r : rows) {
    CHECK(r.eta_sym > 0);
    CHECK(r.eta_sym <= 1);
  }
}

}  // TEST_SUITE
