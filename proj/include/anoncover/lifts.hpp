#pragma once

#include <map>
#include <optional>
#include <vector>

#include "anoncover/covering.hpp"
#include "anoncover/graph.hpp"

namespace anoncover {

/// Permutation data for a Reidemeister lift: one permutation of [0,q) per
/// cotree sym-pair representative. The partner arc implicitly carries the
/// inverse; a self-symmetric loop requires an involution.
struct PermAssignment {
  int q = 1;
  std::vector<int> tree_arcs;              // arc ids, one per tree bundle
  std::map<int, std::vector<int>> sigma;   // representative arc id -> permutation
};

/// Sym-pair representative: the smaller id in {a, sym(a)}.
int pair_rep(const SymDigraph& d, int a);

/// Deterministic spanning tree over the sym-pair skeleton: breadth-first from
/// vertex 0, arcs scanned in id order. Returns one arc id per tree edge.
std::vector<int> bfs_spanning_tree(const SymDigraph& base);

/// Representatives of the sym pairs outside a given tree (loops included).
std::vector<int> cotree_representatives(const SymDigraph& base, const std::vector<int>& tree_arcs);

struct LiftResult {
  SymDigraph total;
  CoveringMap map;
};

/// Builds the q-sheeted lift: vertices u_i, tree arcs copied per sheet,
/// cotree arc a lifted to s(a)_i -> t(a)_{sigma_a(i)}. Ports, when present on
/// the base, are inherited arc-wise. The returned map is always a symmetric
/// covering with q sheets.
LiftResult reidemeister_lift(const SymDigraph& base, const PermAssignment& pa);

struct LiftEnumeration {
  std::vector<SymDigraph> lifts;  // up to isomorphism, in assignment order
  bool complete = true;
  long assignments = 0;
};

/// All q-sheeted symmetric coverings of the base over one fixed spanning
/// tree, filtered and deduplicated. Assignments are visited in a fixed
/// lexicographic order (representatives ascending, permutations lex), so
/// "first matching lift" is a shared deterministic choice. max_classes > 0
/// stops early once that many classes are found.
LiftEnumeration enumerate_lifts(const SymDigraph& base, int q, bool require_simple,
                                bool require_connected, long budget = 10'000'000, int max_classes = 0);

struct UniqueLiftResult {
  enum class Status { unique, ambiguous, none, unknown };
  Status status = Status::unknown;
  std::optional<SymDigraph> lift;
  int class_count = 0;
};

/// The lift iff enumerate_lifts yields exactly one class.
UniqueLiftResult unique_simple_connected_lift(const SymDigraph& base, int q, long budget = 10'000'000);

}  // namespace anoncover
