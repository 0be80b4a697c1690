#include "anoncover/canonical.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <sstream>

namespace anoncover {

namespace {

struct MultView {
  int n = 0;
  std::vector<std::vector<int>> mult;  // arc multiplicities, mult[u][v] = #arcs u->v
  std::vector<int> selfsym;            // self-symmetric loops per vertex

  static MultView of(const SymDigraph& d) {
    MultView m;
    m.n = d.n;
    m.mult.assign(d.n, std::vector<int>(d.n, 0));
    m.selfsym.assign(d.n, 0);
    for (int a = 0; a < d.arc_count(); ++a) {
      m.mult[d.arcs[a].s][d.arcs[a].t]++;
      if (d.is_loop(a) && d.self_sym(a)) m.selfsym[d.arcs[a].s]++;
    }
    return m;
  }

  std::string serialize(const std::vector<int>& order) const {
    std::string s;
    s.reserve(static_cast<size_t>(n) * (n + 1));
    for (int i = 0; i < n; ++i) s.push_back(static_cast<char>(selfsym[order[i]]));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s.push_back(static_cast<char>(mult[order[i]][order[j]]));
    return s;
  }
};

// Equitable refinement: colors are re-indexed each round by the sorted
// (old color, multiplicity profile per color) keys, which is label-invariant.
std::vector<int> refine_colors(const MultView& m, std::vector<int> color) {
  for (;;) {
    int ncolors = *std::max_element(color.begin(), color.end()) + 1;
    std::vector<std::pair<std::vector<int>, int>> keyed(m.n);
    for (int v = 0; v < m.n; ++v) {
      std::vector<int> key;
      key.push_back(color[v]);
      std::vector<int> cnt(ncolors, 0);
      for (int w = 0; w < m.n; ++w) cnt[color[w]] += m.mult[v][w];
      key.insert(key.end(), cnt.begin(), cnt.end());
      keyed[v] = {std::move(key), v};
    }
    std::vector<std::pair<std::vector<int>, int>> sorted = keyed;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> next(m.n);
    int c = -1;
    for (size_t i = 0; i < sorted.size(); ++i) {
      if (i == 0 || sorted[i].first != sorted[i - 1].first) ++c;
      next[sorted[i].second] = c;
    }
    if (next == color) return color;
    color = std::move(next);
  }
}

std::vector<int> initial_colors(const MultView& m, const SymDigraph& d) {
  std::vector<std::pair<std::array<int, 3>, int>> keyed(m.n);
  for (int v = 0; v < m.n; ++v)
    keyed[v] = {{d.degree(v), m.mult[v][v], m.selfsym[v]}, v};
  auto sorted = keyed;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> color(m.n);
  int c = -1;
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (i == 0 || sorted[i].first != sorted[i - 1].first) ++c;
    color[sorted[i].second] = c;
  }
  return color;
}

struct CanonSearch {
  const MultView& m;
  std::string best;
  std::vector<int> best_order;
  bool have_best = false;

  void leaf(const std::vector<int>& color) {
    std::vector<int> order(m.n);
    for (int v = 0; v < m.n; ++v) order[color[v]] = v;
    std::string s = m.serialize(order);
    if (!have_best || s < best) {
      best = std::move(s);
      best_order = std::move(order);
      have_best = true;
    }
  }

  void search(std::vector<int> color) {
    color = refine_colors(m, color);
    int ncolors = *std::max_element(color.begin(), color.end()) + 1;
    if (ncolors == m.n) {
      leaf(color);
      return;
    }
    // individualize in the first non-singleton class
    int target = -1;
    std::vector<int> members;
    for (int c = 0; c < ncolors && target < 0; ++c) {
      members.clear();
      for (int v = 0; v < m.n; ++v)
        if (color[v] == c) members.push_back(v);
      if (members.size() > 1) target = c;
    }
    for (int v : members) {
      std::vector<int> child = color;
      for (int w = 0; w < m.n; ++w)
        if (child[w] >= target) ++child[w];
      child[v] = target;
      search(std::move(child));
    }
  }
};

}  // namespace

CanonicalForm canonical_form(const SymDigraph& d) {
  if (d.n > 64) throw Error("canonical form size guard: n <= 64");
  MultView m = MultView::of(d);
  CanonSearch cs{m, {}, {}, false};
  cs.search(initial_colors(m, d));
  return {cs.best_order, cs.best};
}

std::string canonical_key(const SymDigraph& d) { return canonical_form(d).key; }

std::optional<std::vector<int>> find_isomorphism(const SymDigraph& a, const SymDigraph& b) {
  if (a.n != b.n || a.arc_count() != b.arc_count()) return std::nullopt;
  CanonicalForm ca = canonical_form(a);
  CanonicalForm cb = canonical_form(b);
  if (ca.key != cb.key) return std::nullopt;
  // a vertex at canonical position i in a maps to b's vertex at position i
  std::vector<int> map(a.n);
  for (int i = 0; i < a.n; ++i) map[ca.order[i]] = cb.order[i];
  return map;
}

bool is_isomorphic(const SymDigraph& a, const SymDigraph& b) {
  return find_isomorphism(a, b).has_value();
}

bool is_isomorphic(const UGraph& a, const UGraph& b) {
  if (a.n != b.n || a.edges.size() != b.edges.size()) return false;
  return is_isomorphic(dir(a), dir(b));
}

std::string degree_refinement_signature(const UGraph& g) {
  MultView m = MultView::of(dir(g));
  std::vector<int> color = refine_colors(m, std::vector<int>(g.n, 0));
  int ncolors = *std::max_element(color.begin(), color.end()) + 1;
  std::vector<int> sizes(ncolors, 0);
  for (int v = 0; v < g.n; ++v) sizes[color[v]]++;
  std::vector<std::vector<int>> deg(ncolors, std::vector<int>(ncolors, 0));
  for (int v = 0; v < g.n; ++v) {
    for (int w : g.adj[v]) deg[color[v]][color[w]]++;
  }
  // class sizes are intentionally not part of the signature: equality of the
  // per-vertex class-degree matrix characterizes a common finite covering
  std::ostringstream os;
  os << ncolors << ";";
  for (int c = 0; c < ncolors; ++c) {
    for (int c2 = 0; c2 < ncolors; ++c2) os << deg[c][c2] / sizes[c] << ",";
    os << "|";
  }
  return os.str();
}

}  // namespace anoncover
