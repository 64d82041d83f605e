#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "relcloud/availability.hpp"

using namespace relcloud;

namespace {

struct Fixture {
  AtomUniverse u;
  AtomId a, b, c;
  Fixture() {
    a = u.add_atom("a", AtomKind::node, 0.9);
    b = u.add_atom("b", AtomKind::node, 0.8);
    c = u.add_atom("c", AtomKind::node, 0.7);
  }
};

AtomGroup grp(std::initializer_list<AtomId> ids) {
  return AtomGroup(std::vector<AtomId>(ids));
}

}  // namespace

TEST_CASE("single group availability is the product of its atoms", "[avail]") {
  Fixture f;
  CHECK(atom_set_availability(f.u, grp({f.a, f.b})) ==
        Catch::Approx(0.72).margin(1e-15));
  CHECK(atom_set_availability(f.u, AtomGroup{}) == 1.0);
  // duplicates collapse on construction
  CHECK(atom_set_availability(f.u, grp({f.a, f.a, f.b})) ==
        Catch::Approx(0.72).margin(1e-15));
}

TEST_CASE("two overlapping node groups", "[avail]") {
  Fixture f;
  std::vector<AtomGroup> groups{grp({f.a, f.b}), grp({f.c, f.b})};
  CHECK(multi_group_availability(f.u, groups) ==
        Catch::Approx(0.776).margin(1e-12));
  CHECK(brute_force_availability(f.u, groups) ==
        Catch::Approx(0.776).margin(1e-12));
}

TEST_CASE("groups with shared failure events", "[avail][srng]") {
  AtomUniverse u;
  AtomId l1 = u.add_atom("e1", AtomKind::srng_event, 0.999);
  AtomId l2 = u.add_atom("e2", AtomKind::srng_event, 0.99);
  AtomId l3 = u.add_atom("e3", AtomKind::srng_event, 0.9);
  AtomId a = u.add_atom("a", AtomKind::node, 0.9);
  AtomId b = u.add_atom("b", AtomKind::node, 0.8);
  AtomId c = u.add_atom("c", AtomKind::node, 0.7);

  AtomGroup g1(std::vector<AtomId>{l1, l2, a, b});
  AtomGroup g2(std::vector<AtomId>{l2, l3, b, c});
  CHECK(atom_set_availability(u, g1) == Catch::Approx(0.7120872).margin(1e-12));

  std::vector<AtomGroup> groups{g1, g2};
  CHECK(multi_group_availability(u, groups) ==
        Catch::Approx(0.762432264).margin(1e-12));
  CHECK(brute_force_availability(u, groups) ==
        Catch::Approx(0.762432264).margin(1e-12));
}

TEST_CASE("link groups sharing a link", "[avail]") {
  AtomUniverse u;
  AtomId lu = u.add_atom("u", AtomKind::link, 0.99);
  AtomId lw = u.add_atom("w", AtomKind::link, 0.9);
  AtomId lx = u.add_atom("x", AtomKind::link, 0.95);
  AtomId lv = u.add_atom("v", AtomKind::link, 0.9);
  std::vector<AtomGroup> groups{grp({lu, lw}), grp({lu, lx, lv})};
  // frozen from the exhaustive oracle over the four links
  CHECK(brute_force_availability(u, groups) ==
        Catch::Approx(0.975645).margin(1e-12));
  CHECK(multi_group_availability(u, groups) ==
        Catch::Approx(0.975645).margin(1e-12));
}

TEST_CASE("duplicate groups do not change the result", "[avail]") {
  Fixture f;
  std::vector<AtomGroup> one{grp({f.a, f.b})};
  std::vector<AtomGroup> twice{grp({f.a, f.b}), grp({f.a, f.b})};
  CHECK(multi_group_availability(f.u, one) ==
        multi_group_availability(f.u, twice));
}

TEST_CASE("group and atom order are irrelevant", "[avail]") {
  Fixture f;
  std::vector<AtomGroup> g1{grp({f.a, f.b}), grp({f.c, f.b}), grp({f.c})};
  std::vector<AtomGroup> g2{grp({f.c}), grp({f.b, f.a}), grp({f.b, f.c})};
  CHECK(multi_group_availability(f.u, g1) ==
        multi_group_availability(f.u, g2));
}

TEST_CASE("monotonicity", "[avail]") {
  Fixture f;
  std::vector<AtomGroup> narrow{grp({f.a})};
  std::vector<AtomGroup> widened{grp({f.a, f.b})};
  CHECK(multi_group_availability(f.u, widened) <=
        multi_group_availability(f.u, narrow));
  std::vector<AtomGroup> more{grp({f.a, f.b}), grp({f.c})};
  CHECK(multi_group_availability(f.u, more) >=
        multi_group_availability(f.u, widened));
}

TEST_CASE("argument and size errors", "[avail][errors]") {
  Fixture f;
  std::vector<AtomGroup> none;
  CHECK_THROWS_AS(multi_group_availability(f.u, none), ArgumentError);
  CHECK(brute_force_availability(f.u, none) == 0.0);

  std::vector<AtomGroup> many(31, grp({f.a}));
  CHECK_THROWS_AS(multi_group_availability(f.u, many), SizeError);

  AtomUniverse u;
  CHECK_THROWS_AS(u.add_atom("z", AtomKind::node, 0.0), ArgumentError);
  CHECK_THROWS_AS(u.add_atom("z", AtomKind::node, 1.0000001), ArgumentError);
  u.add_atom("z", AtomKind::node, 1.0);
  CHECK_THROWS_AS(u.add_atom("z", AtomKind::node, 0.5), ArgumentError);
  CHECK_THROWS_AS(u.resolve("nope"), ResolutionError);

  // group referencing a foreign universe's index space
  std::vector<AtomGroup> alien{grp({AtomId{7}})};
  CHECK_THROWS_AS(multi_group_availability(u, alien), ResolutionError);

  AtomUniverse wide;
  std::vector<AtomId> lots;
  for (int i = 0; i < 25; ++i)
    lots.push_back(wide.add_atom("n" + std::to_string(i), AtomKind::node, 0.9));
  std::vector<AtomGroup> big{AtomGroup(lots)};
  CHECK_THROWS_AS(brute_force_availability(wide, big), SizeError);
  CHECK_NOTHROW(multi_group_availability(wide, big));
}

TEST_CASE("closed form matches the exhaustive oracle on random universes",
          "[avail][oracle]") {
  std::mt19937_64 rng(20260817);
  for (int iter = 0; iter < 200; ++iter) {
    AtomUniverse u;
    int n = 2 + static_cast<int>(rng() % 12);
    std::vector<AtomId> ids;
    for (int i = 0; i < n; ++i) {
      double p = 0.05 + 0.95 * static_cast<double>(rng() >> 11) * 0x1.0p-53;
      ids.push_back(u.add_atom("x" + std::to_string(i),
                               AtomKind::node, std::min(p, 1.0)));
    }
    int k = 1 + static_cast<int>(rng() % 6);
    std::vector<AtomGroup> groups;
    for (int g = 0; g < k; ++g) {
      std::vector<AtomId> members;
      for (AtomId a : ids)
        if (rng() % 3 == 0) members.push_back(a);
      if (members.empty()) members.push_back(ids[rng() % ids.size()]);
      groups.emplace_back(std::move(members));
    }
    double closed = multi_group_availability(u, groups);
    double brute = brute_force_availability(u, groups);
    REQUIRE(closed == Catch::Approx(brute).margin(1e-12));
  }
}

TEST_CASE("monte carlo is deterministic and consistent", "[avail][mc]") {
  Fixture f;
  std::vector<AtomGroup> groups{grp({f.a, f.b}), grp({f.c, f.b})};
  double m1 = monte_carlo_availability(f.u, groups, 200000, 42);
  double m2 = monte_carlo_availability(f.u, groups, 200000, 42);
  CHECK(m1 == m2);
  double p = 0.776;
  double sigma = std::sqrt(p * (1 - p) / 200000.0);
  CHECK(std::abs(m1 - p) <= 4 * sigma);
  CHECK_THROWS_AS(monte_carlo_availability(f.u, groups, 0, 1), ArgumentError);
}

TEST_CASE("single node failure availability", "[avail][survivor]") {
  Fixture f;
  // v1 replicated on a and c, v2 only on b
  std::vector<AtomGroup> hosting{grp({f.a, f.c}), grp({f.b})};
  CHECK(min_survivor_availability(f.u, hosting) ==
        Catch::Approx(0.8).margin(1e-15));

  std::vector<AtomGroup> replicated{grp({f.a, f.c}), grp({f.b, f.a})};
  CHECK(min_survivor_availability(f.u, replicated) == 1.0);

  std::vector<AtomGroup> orphan{AtomGroup{}};
  CHECK_THROWS_AS(min_survivor_availability(f.u, orphan), ArgumentError);

  AtomUniverse u;
  AtomId e = u.add_atom("e", AtomKind::srng_event, 0.999);
  std::vector<AtomGroup> wrong{grp({e})};
  CHECK_THROWS_AS(min_survivor_availability(u, wrong), ArgumentError);
}
