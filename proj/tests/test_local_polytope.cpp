#include <doctest.h>

#include <cmath>
#include <vector>

#include "belldet/chshn.hpp"
#include "belldet/correlation.hpp"
#include "belldet/local_bound.hpp"
#include "belldet/rng.hpp"
#include "belldet/strategies.hpp"

using namespace belldet;

namespace {

BellFunctional random_integer_functional(int m, int o, SplitMix64& rng, int span = 5,
                                         bool with_marginals = false) {
  BellFunctional c = BellFunctional::zeros(m, o, with_marginals);
  auto draw = [&]() { return double(int(rng.below(2 * span + 1)) - span); };
  for (double& v : c.joint) v = draw();
  for (double& v : c.marg_a) v = draw();
  for (double& v : c.marg_b) v = draw();
  c.refresh_integral_flag();
  return c;
}

// ground truth by full enumeration of both maps
double brute_force_bound(const BellFunctional& c) {
  int m = c.m, o = c.o;
  std::uint64_t na = strategy_count(m, o);
  double best = -1e300;
  for (std::uint64_t ia = 0; ia < na; ++ia) {
    std::vector<int> alice = map_from_lex_index(ia, m, o);
    for (std::uint64_t ib = 0; ib < na; ++ib) {
      std::vector<int> bob = map_from_lex_index(ib, m, o);
      double v = evaluate(c, strategy_point({alice, bob}, m, o));
      best = std::max(best, v);
    }
  }
  return best;
}

}  // namespace

TEST_SUITE("local_polytope") {

TEST_CASE("strategy points are product deltas") {
  DeterministicStrategy s{{1, 0, 2}, {2, 2, 1}};
  Behavior p = strategy_point(s, 3, 3);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          CHECK(p.at(x, y, a, b) == (a == s.alice[x] && b == s.bob[y] ? 1.0 : 0.0));
  p.validate(0.0);
}

TEST_CASE("map ranks round-trip") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    int m = 1 + int(rng.below(4)), o = 2 + int(rng.below(3));
    std::vector<int> map(m);
    for (int& v : map) v = int(rng.below(std::uint64_t(o)));
    std::uint64_t idx = map_lex_index(map, o);
    CHECK(map_from_lex_index(idx, m, o) == map);
    CHECK(idx < strategy_count(m, o));
  }
  CHECK(strategy_count(2, 2) == 4);
  CHECK(strategy_count(64, 4) == ~std::uint64_t(0));  // saturates
}

TEST_CASE("best response matches explicit enumeration") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    int m = 2, o = 3;
    BellFunctional c = random_integer_functional(m, o, rng, 5, trial % 2 == 1);
    std::vector<int> alice(m);
    for (int& v : alice) v = int(rng.below(std::uint64_t(o)));
    std::vector<int> bob;
    double got = best_response_value(c, alice, &bob);
    double want = -1e300;
    for (std::uint64_t ib = 0; ib < strategy_count(m, o); ++ib) {
      std::vector<int> cand = map_from_lex_index(ib, m, o);
      want = std::max(want, evaluate(c, strategy_point({alice, cand}, m, o)));
    }
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
    CHECK(evaluate(c, strategy_point({alice, bob}, m, o)) ==
          doctest::Approx(got).epsilon(1e-12));
  }
}

TEST_CASE("known best responses") {
  BellFunctional c1 = chshn_build(1);
  std::vector<int> bob;
  CHECK(best_response_value(c1, std::vector<int>{0, 0}, &bob) == 3.0);
  CHECK(bob == std::vector<int>{0, 0});

  // the winning Alice map for two copies
  BellFunctional c2 = chshn_build(2);
  CHECK(best_response_value(c2, std::vector<int>{3, 3, 3, 1}) == 10.0);
}

TEST_CASE("exact bounds for one and two copies") {
  LocalBoundResult r1 = local_bound_exact(chshn_build(1));
  CHECK(r1.value == 3.0);
  CHECK(r1.exact);
  CHECK(evaluate(chshn_build(1), strategy_point(r1.witness, 2, 2)) == 3.0);

  LocalBoundResult r2 = local_bound_exact(chshn_build(2));
  CHECK(r2.value == 10.0);
  CHECK(evaluate(chshn_build(2), strategy_point(r2.witness, 4, 4)) == 10.0);
}

TEST_CASE("exact bound agrees with brute force on random functionals") {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    BellFunctional c = random_integer_functional(2, 2, rng, 4, trial % 2 == 1);
    CHECK(local_bound_exact(c).value == doctest::Approx(brute_force_bound(c)).epsilon(1e-12));
  }
}

TEST_CASE("exact bound is invariant under output relabeling") {
  SplitMix64 rng(17);
  BellFunctional c = random_integer_functional(2, 3, rng);
  double base = local_bound_exact(c).value;
  // swap outputs 0 and 2 on Alice's side everywhere
  BellFunctional perm = c;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int b = 0; b < 3; ++b) {
        perm.jat(x, y, 0, b) = c.jat(x, y, 2, b);
        perm.jat(x, y, 2, b) = c.jat(x, y, 0, b);
      }
  CHECK(local_bound_exact(perm).value == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("exact cap is enforced") {
  LocalBoundOptions opts;
  opts.exact_cap = 100;
  CHECK_THROWS_AS(local_bound_exact(chshn_build(2), opts), InputError);
}

TEST_CASE("heuristic never exceeds exact") {
  SplitMix64 rng(23);
  LocalBoundOptions heur;
  heur.restarts = 20;
  for (int trial = 0; trial < 50; ++trial) {
    int m = trial % 2 ? 4 : 2;
    BellFunctional c = random_integer_functional(m, m, rng, 3, trial % 3 == 0);
    heur.seed = trial + 1;
    LocalBoundResult h = local_bound_heuristic(c, heur);
    LocalBoundResult e = local_bound_exact(c);
    CHECK(h.value <= e.value + 1e-9);
    CHECK_FALSE(h.exact);
    // the fixed point it returns must be self-consistent
    CHECK(evaluate(c, strategy_point(h.witness, m, m)) ==
          doctest::Approx(h.value).epsilon(1e-12));
  }
}

TEST_CASE("heuristic reaches the exact bound on the iterated game") {
  LocalBoundOptions opts;
  opts.restarts = 100;
  CHECK(local_bound_heuristic(chshn_build(1), opts).value == 3.0);
  CHECK(local_bound_heuristic(chshn_build(2), opts).value == 10.0);
}

TEST_CASE("oracle maximizes overlap with a vertex direction") {
  DeterministicStrategy s{{1, 0}, {0, 1}};
  Behavior p = strategy_point(s, 2, 2);
  BellFunctional dir = BellFunctional::zeros(2, 2, false);
  dir.joint.assign(p.data().begin(), p.data().end());
  OracleResult r = oracle_max_overlap(dir, {}, true);
  CHECK(r.overlap == 4.0);  // m^2 coincidences
  CHECK(r.vertex.alice == s.alice);
  CHECK(r.vertex.bob == s.bob);
  CHECK(r.exact);
}

TEST_CASE("deterministic tie-break picks the smallest maps") {
  BellFunctional dir = BellFunctional::zeros(2, 2, false);
  for (double& v : dir.joint) v = -1.0;  // every vertex scores -4
  OracleResult r = oracle_max_overlap(dir, {}, true);
  CHECK(r.overlap == -4.0);
  CHECK(r.vertex.alice == std::vector<int>{0, 0});
  CHECK(r.vertex.bob == std::vector<int>{0, 0});
}

TEST_CASE("overlap pool is sorted, distinct, and headed by the maximum") {
  SplitMix64 rng(29);
  BellFunctional c = random_integer_functional(2, 2, rng);
  for (bool exact : {true, false}) {
    LocalBoundOptions opts;
    opts.restarts = 50;
    auto pool = oracle_overlap_pool(c, opts, exact, 6);
    REQUIRE(!pool.empty());
    CHECK(pool.front().overlap ==
          doctest::Approx(oracle_max_overlap(c, opts, exact).overlap).epsilon(1e-12));
    for (std::size_t i = 1; i < pool.size(); ++i) {
      CHECK(pool[i - 1].overlap >= pool[i].overlap - 1e-12);
      CHECK((pool[i].vertex.alice != pool[i - 1].vertex.alice ||
             pool[i].vertex.bob != pool[i - 1].vertex.bob));
    }
    for (const auto& e : pool)
      CHECK(evaluate(c, strategy_point(e.vertex, 2, 2)) ==
            doctest::Approx(e.overlap).epsilon(1e-12));
  }
  CHECK_THROWS_AS(oracle_overlap_pool(c, {}, true, 0), InputError);
}

}  // TEST_SUITE
