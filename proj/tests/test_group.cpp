#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anosov/group.hpp"
#include "anosov/representation.hpp"
#include "oracles.hpp"

#include <random>
#include <set>

using namespace anosov;

TEST_CASE("free group spheres match the closed form") {
  for (int k = 1; k <= 3; ++k) {
    const auto s = sphere_sizes(GroupSpec::free(k), 6);
    for (int n = 0; n <= 6; ++n) CHECK(s[static_cast<std::size_t>(n)] == oracle::free_sphere(k, n));
  }
}

TEST_CASE("genus-2 spheres match the BFS oracle and the frozen table") {
  const auto bfs = oracle::genus2_bfs(6);
  const auto s = sphere_sizes(GroupSpec::surface(2), 8);
  REQUIRE(s.size() == oracle::kGenus2Spheres.size());
  for (std::size_t n = 0; n < s.size(); ++n) {
    CHECK(s[n] == oracle::kGenus2Spheres[n]);
    if (n < bfs.size()) CHECK(bfs[n] == oracle::kGenus2Spheres[n]);
  }
  // 8 * 7^(n-1) only for n <= 3.
  CHECK(s[3] == 8u * 49u);
  CHECK(s[4] != 8u * 343u);
}

TEST_CASE("sphere words are distinct elements of the right length") {
  const GroupSpec g = GroupSpec::surface(2);
  const Representation f = fuchsian_genus2();
  for (int n = 1; n <= 4; ++n) {
    std::set<DedupKey> keys;
    for (const Word& w : sphere(g, n)) {
      CHECK(static_cast<int>(w.size()) == n);
      keys.insert(dedup_key(w, f));
    }
    CHECK(keys.size() == sphere(g, n).size());
  }
}

TEST_CASE("walk visits parents before children") {
  const GroupSpec g = GroupSpec::surface(2);
  std::set<Word> seen;
  bool ok = true;
  walk_ball(g, 4, [&](const Word& w) {
    if (w.size() > 1) ok = ok && seen.count(Word(w.begin(), w.end() - 1));
    seen.insert(w);
    return true;
  });
  CHECK(ok);
  CHECK(seen.size() == 8 + 56 + 392 + 2736);
}

TEST_CASE("reduce returns a geodesic for the same element") {
  const GroupSpec g = GroupSpec::surface(2);
  const Representation f = fuchsian_genus2();
  std::mt19937_64 rng(3);
  for (int t = 0; t < 300; ++t) {
    Word w;
    const int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) w.push_back(static_cast<Letter>(rng() % 8));
    const Word r = reduce(w, g);
    CHECK(r.size() <= free_reduce(w).size());
    if (n <= 14) CHECK(dedup_key(r, f) == dedup_key(w, f));
    Word back = r;
    for (auto it = w.rbegin(); it != w.rend(); ++it) back.push_back(inverse(*it));
    CHECK(reduce(back, g).empty());
    CHECK(reduce(r, g) == r);
  }
  CHECK(reduce(g.relator, g).empty());
}

TEST_CASE("dehn reduction kills the relator and its rotations") {
  const GroupSpec g = GroupSpec::surface(2);
  for (std::size_t k = 0; k < g.relator.size(); ++k) {
    Word r(g.relator.begin() + static_cast<long>(k), g.relator.end());
    r.insert(r.end(), g.relator.begin(), g.relator.begin() + static_cast<long>(k));
    CHECK(dehn_reduce(r, g).empty());
  }
}

TEST_CASE("word strings round trip") {
  const GroupSpec g = GroupSpec::surface(2);
  const Word w = parse_word("a1 B2 b1 A1", g);
  CHECK(w.size() == 4);
  CHECK(parse_word(g.word_string(w), g) == w);
  CHECK_THROWS_AS(parse_word("z3", g), ConfigError);
  const GroupSpec f = GroupSpec::free(2);
  CHECK(free_reduce(parse_word("x1 X1 x2", f)) == parse_word("x2", f));
}

TEST_CASE("random rays are geodesic") {
  const GroupSpec g = GroupSpec::surface(2);
  const auto rays = ray_prefixes(g, 11, 40);
  REQUIRE(rays.size() == 40);
  for (std::size_t i = 0; i < rays.size(); ++i) {
    CHECK(rays[i].size() == i + 1);
    CHECK(reduce(rays[i], g).size() == i + 1);
  }
}

TEST_CASE("element budget is enforced") {
  Budget b(1000, 0);
  CHECK_THROWS_AS(sphere_sizes(GroupSpec::surface(2), 6, &b), BudgetError);
  Budget ok(1000000, 0);
  CHECK_NOTHROW(sphere_sizes(GroupSpec::surface(2), 5, &ok));
}

TEST_CASE("invalid groups are rejected") {
  CHECK_THROWS_AS(GroupSpec::surface(1), ConfigError);
  CHECK_THROWS_AS(GroupSpec::free(0), ConfigError);
}
