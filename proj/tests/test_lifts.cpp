#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "anoncover/canonical.hpp"
#include "anoncover/graph.hpp"
#include "anoncover/lifts.hpp"

using namespace anoncover;

namespace {

SymDigraph relabel(const SymDigraph& d, const std::vector<int>& perm) {
  std::vector<ArcRec> arcs(d.arc_count());
  for (int a = 0; a < d.arc_count(); ++a) arcs[a] = {perm[d.arcs[a].s], perm[d.arcs[a].t]};
  return make_sym_digraph(d.n, std::move(arcs), d.sym);
}

std::set<std::string> lift_keys(const SymDigraph& base, int q, bool simple, bool connected) {
  auto en = enumerate_lifts(base, q, simple, connected);
  REQUIRE(en.complete);
  std::set<std::string> keys;
  for (const auto& g : en.lifts) keys.insert(canonical_key(g));
  return keys;
}

bool contains_iso(const std::vector<SymDigraph>& lifts, const SymDigraph& wanted) {
  return std::any_of(lifts.begin(), lifts.end(),
                     [&](const SymDigraph& g) { return is_isomorphic(g, wanted); });
}

}  // namespace

TEST_CASE("the drawn 3-sheeted example is one reidemeister lift of its base") {
  auto base = dir(builtin_ugraph("fig1-base"));
  // tree over edges {0,1},{0,2},{2,3},{2,4}: forward arcs 0,2,6,8
  PermAssignment pa;
  pa.q = 3;
  pa.tree_arcs = {0, 2, 6, 8};
  pa.sigma[4] = {1, 0, 2};   // cotree pair {1,3}: two sheets swapped
  pa.sigma[10] = {0, 2, 1};  // cotree pair {3,4}: first sheet fixed
  auto lift = reidemeister_lift(base, pa);
  CHECK(lift.total.n == 15);
  CHECK(lift.total.arc_count() == 36);
  CHECK(check_symmetric_covering(lift.total, base, lift.map));
  CHECK(is_isomorphic(lift.total, dir(builtin_ugraph("fig1-total"))));
}

TEST_CASE("sheet-1 lift reproduces the base") {
  for (auto name : {"h-g1", "h-g3", "c4"}) {
    auto base = builtin_as_digraph(name);
    PermAssignment pa;
    pa.q = 1;
    pa.tree_arcs = bfs_spanning_tree(base);
    for (int rep : cotree_representatives(base, pa.tree_arcs)) pa.sigma[rep] = {0};
    auto lift = reidemeister_lift(base, pa);
    CHECK(is_isomorphic(lift.total, base));
  }
}

TEST_CASE("2-sheet lifts of the smallest base reproduce the whole second level") {
  auto base = builtin_digraph("h-g1");
  auto tree = bfs_spanning_tree(base);
  auto cotree = cotree_representatives(base, tree);
  REQUIRE(cotree.size() == 2);  // the self-symmetric loop and the second bundle arc
  int loop_rep = base.self_sym(cotree[0]) ? cotree[0] : cotree[1];
  int bundle_rep = base.self_sym(cotree[0]) ? cotree[1] : cotree[0];

  PermAssignment pa;
  pa.q = 2;
  pa.tree_arcs = tree;

  SUBCASE("swapping both gives the simple 4-vertex graph") {
    pa.sigma[loop_rep] = {1, 0};
    pa.sigma[bundle_rep] = {1, 0};
    auto lift = reidemeister_lift(base, pa);
    CHECK(lift.total.is_simple());
    CHECK(lift.total.is_connected());
    CHECK(is_isomorphic(lift.total, dir(builtin_ugraph("h-g4"))));
  }

  SUBCASE("identity on the loop reproduces self-symmetric loops in the lift") {
    pa.sigma[loop_rep] = {0, 1};
    pa.sigma[bundle_rep] = {1, 0};
    auto lift = reidemeister_lift(base, pa);
    int selfsym = 0;
    for (int v = 0; v < lift.total.n; ++v) selfsym += lift.total.self_sym_loops_at(v);
    CHECK(selfsym == 2);
    CHECK(is_isomorphic(lift.total, builtin_digraph("h-g2")));
  }

  SUBCASE("identity on the bundle doubles the tree edge") {
    pa.sigma[loop_rep] = {1, 0};
    pa.sigma[bundle_rep] = {0, 1};
    auto lift = reidemeister_lift(base, pa);
    CHECK(is_isomorphic(lift.total, builtin_digraph("h-g3")));
  }

  SUBCASE("a non-involution on the self-symmetric loop is rejected") {
    pa.q = 3;
    pa.sigma[loop_rep] = {1, 2, 0};
    pa.sigma[bundle_rep] = {0, 1, 2};
    CHECK_THROWS_WITH_AS(reidemeister_lift(base, pa), doctest::Contains("involution"), Error);
  }
}

TEST_CASE("fixed-point-free involution on a self-symmetric loop yields a matching fibre") {
  auto base = builtin_digraph("loop1");
  PermAssignment pa;
  pa.q = 2;
  pa.sigma[0] = {1, 0};
  auto lift = reidemeister_lift(base, pa);
  CHECK(lift.total.is_simple());
  CHECK(is_isomorphic(lift.total, dir(builtin_ugraph("k2"))));

  pa.sigma[0] = {0, 1};  // identity: q self-symmetric loops instead
  auto loops = reidemeister_lift(base, pa);
  CHECK(loops.total.self_sym_loops_at(0) == 1);
  CHECK(loops.total.self_sym_loops_at(1) == 1);
  CHECK_FALSE(loops.total.is_connected());
}

TEST_CASE("unique simple connected lifts of the hierarchy") {
  auto r1 = unique_simple_connected_lift(builtin_digraph("h-g1"), 2);
  REQUIRE(r1.status == UniqueLiftResult::Status::unique);
  CHECK(is_isomorphic(*r1.lift, dir(builtin_ugraph("h-g4"))));

  auto r3 = unique_simple_connected_lift(builtin_digraph("h-g3"), 2);
  REQUIRE(r3.status == UniqueLiftResult::Status::unique);
  CHECK(is_isomorphic(*r3.lift, dir(builtin_ugraph("h-g6"))));

  auto r4 = unique_simple_connected_lift(builtin_digraph("h-g1"), 4);
  CHECK(r4.status == UniqueLiftResult::Status::ambiguous);
}

TEST_CASE("4-sheet lifts of the smallest base include all three 8-vertex graphs") {
  auto en = enumerate_lifts(builtin_digraph("h-g1"), 4, true, true);
  REQUIRE(en.complete);
  CHECK(en.lifts.size() >= 3);
  CHECK(contains_iso(en.lifts, dir(builtin_ugraph("h-g5"))));
  CHECK(contains_iso(en.lifts, dir(builtin_ugraph("h-g6"))));
  CHECK(contains_iso(en.lifts, dir(builtin_ugraph("h-g7"))));
  for (const auto& g : en.lifts) {
    CHECK(g.is_simple());
    CHECK(g.is_connected());
    CHECK(g.n == 8);
  }
}

TEST_CASE("every hierarchy arrow is reproduced by lift enumeration") {
  struct Arrow {
    const char* total;
    const char* base;
    int q;
  };
  const Arrow arrows[] = {{"h-g5", "h-g2", 2}, {"h-g6", "h-g2", 2}, {"h-g6", "h-g3", 2},
                          {"h-g6", "h-g4", 2}, {"h-g7", "h-g4", 2}, {"h-g2", "h-g1", 2},
                          {"h-g3", "h-g1", 2}, {"h-g4", "h-g1", 2}};
  for (const auto& arrow : arrows) {
    INFO(arrow.total, " over ", arrow.base);
    auto en = enumerate_lifts(builtin_as_digraph(arrow.base), arrow.q, false, false);
    REQUIRE(en.complete);
    CHECK(contains_iso(en.lifts, builtin_as_digraph(arrow.total)));
  }
}

TEST_CASE("lift enumeration is independent of the spanning tree choice") {
  // relabeling the base changes the breadth-first tree; the class sets match
  std::mt19937_64 rng(11);
  for (auto name : {"h-g1", "h-g2", "h-g3", "h-g4", "c4", "fig1-base"}) {
    auto base = builtin_as_digraph(name);
    std::vector<int> perm(base.n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = base.n - 1; i > 0; --i) std::swap(perm[i], perm[rng() % (i + 1)]);
    auto relabeled = relabel(base, perm);
    for (int q = 2; q <= 3; ++q) {
      INFO(name, " q=", q);
      CHECK(lift_keys(base, q, true, true) == lift_keys(relabeled, q, true, true));
      CHECK(lift_keys(base, q, false, false) == lift_keys(relabeled, q, false, false));
    }
  }
}

TEST_CASE("isomorphism decisions") {
  CHECK_FALSE(is_isomorphic(dir(builtin_ugraph("h-g6")), dir(builtin_ugraph("h-g7"))));
  CHECK_FALSE(is_isomorphic(dir(builtin_ugraph("c4")), dir(builtin_ugraph("p4"))));
  CHECK_FALSE(is_isomorphic(builtin_digraph("h-g2"), builtin_digraph("h-g3")));
  CHECK_FALSE(is_isomorphic(builtin_digraph("bouquet3"), builtin_digraph("bouquet3-allsym")));

  std::mt19937_64 rng(5);
  for (auto name : {"h-g5", "h-g6", "h-g7", "fig1-total", "fig4-nonsym"}) {
    auto d = dir(builtin_ugraph(name));
    std::vector<int> perm(d.n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = d.n - 1; i > 0; --i) std::swap(perm[i], perm[rng() % (i + 1)]);
    auto shuffled = relabel(d, perm);
    auto map = find_isomorphism(d, shuffled);
    REQUIRE(map.has_value());
    // the returned mapping preserves arcs
    for (int a = 0; a < d.arc_count(); ++a) {
      int ms = (*map)[d.arcs[a].s], mt = (*map)[d.arcs[a].t];
      bool found = false;
      for (int b : shuffled.out_arcs[ms]) found = found || shuffled.arcs[b].t == mt;
      CHECK(found);
    }
  }
}
