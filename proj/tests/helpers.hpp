#pragma once

// shared test helpers: seeded random graphs and port assignments

#include <numeric>
#include <random>
#include <set>

#include "anoncover/graph.hpp"

namespace anoncover::testing {

inline UGraph random_tree(int n, std::mt19937_64& rng) {
  if (n == 1) return make_ugraph(1, {});
  if (n == 2) return make_ugraph(2, {{0, 1}});
  // random Pruefer sequence
  std::vector<int> seq(n - 2);
  for (auto& x : seq) x = static_cast<int>(rng() % n);
  std::vector<int> deg(n, 1);
  for (int x : seq) deg[x]++;
  std::set<int> leaves;
  for (int v = 0; v < n; ++v)
    if (deg[v] == 1) leaves.insert(v);
  std::vector<Edge> edges;
  for (int x : seq) {
    int leaf = *leaves.begin();
    leaves.erase(leaves.begin());
    edges.push_back(make_edge(leaf, x));
    if (--deg[x] == 1) leaves.insert(x);
  }
  int a = *leaves.begin();
  int b = *std::next(leaves.begin());
  edges.push_back(make_edge(a, b));
  return make_ugraph(n, std::move(edges));
}

inline UGraph random_connected_graph(int n, std::mt19937_64& rng) {
  for (;;) {
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (rng() % 100 < 45) edges.push_back({u, v});
    try {
      return make_ugraph(n, std::move(edges));
    } catch (const Error&) {
      // disconnected; redraw
    }
  }
}

inline SymDigraph with_random_outports(const SymDigraph& d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> outport(d.arc_count());
  for (int v = 0; v < d.n; ++v) {
    std::vector<int> perm(d.degree(v));
    std::iota(perm.begin(), perm.end(), 1);
    for (int i = d.degree(v) - 1; i > 0; --i) std::swap(perm[i], perm[rng() % (i + 1)]);
    int idx = 0;
    for (int a : d.out_arcs[v]) outport[a] = perm[idx++];
  }
  SymDigraph copy = d;
  return make_sym_digraph(copy.n, std::move(copy.arcs), std::move(copy.sym), std::move(outport),
                          copy.name);
}

}  // namespace anoncover::testing
