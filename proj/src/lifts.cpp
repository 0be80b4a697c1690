#include "anoncover/lifts.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

#include "anoncover/canonical.hpp"

namespace anoncover {

int pair_rep(const SymDigraph& d, int a) { return std::min(a, d.sym[a]); }

std::vector<int> bfs_spanning_tree(const SymDigraph& base) {
  std::vector<int> tree;
  std::vector<bool> seen(base.n, false);
  std::deque<int> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int a : base.out_arcs[u]) {
      int v = base.arcs[a].t;
      if (v == u || seen[v]) continue;
      seen[v] = true;
      tree.push_back(a);
      queue.push_back(v);
    }
  }
  if (static_cast<int>(tree.size()) != base.n - 1) throw Error("base digraph is not connected");
  return tree;
}

std::vector<int> cotree_representatives(const SymDigraph& base, const std::vector<int>& tree_arcs) {
  std::set<int> covered;
  for (int a : tree_arcs) covered.insert(pair_rep(base, a));
  std::set<int> reps;
  for (int a = 0; a < base.arc_count(); ++a) reps.insert(pair_rep(base, a));
  std::vector<int> cotree;
  for (int r : reps)
    if (!covered.count(r)) cotree.push_back(r);
  return cotree;
}

namespace {

std::vector<int> inverse_perm(const std::vector<int>& p) {
  std::vector<int> inv(p.size());
  for (size_t i = 0; i < p.size(); ++i) inv[p[i]] = static_cast<int>(i);
  return inv;
}

bool is_perm(const std::vector<int>& p, int q) {
  if (static_cast<int>(p.size()) != q) return false;
  std::vector<bool> hit(q, false);
  for (int x : p) {
    if (x < 0 || x >= q || hit[x]) return false;
    hit[x] = true;
  }
  return true;
}

}  // namespace

LiftResult reidemeister_lift(const SymDigraph& base, const PermAssignment& pa) {
  const int q = pa.q;
  if (q < 1) throw Error("sheet count must be positive");

  // validate the tree: n-1 non-loop arcs from distinct bundles, spanning
  std::set<int> tree_reps;
  {
    std::vector<int> parent(base.n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    if (static_cast<int>(pa.tree_arcs.size()) != base.n - 1)
      throw Error("spanning tree must have exactly n-1 arcs");
    for (int a : pa.tree_arcs) {
      if (a < 0 || a >= base.arc_count()) throw Error("tree arc out of range");
      if (base.is_loop(a)) throw Error("loops cannot belong to a spanning tree");
      if (!tree_reps.insert(pair_rep(base, a)).second)
        throw Error("two tree arcs come from the same sym pair");
      int ru = find(base.arcs[a].s), rv = find(base.arcs[a].t);
      if (ru == rv) throw Error("tree arcs contain a cycle");
      parent[ru] = rv;
    }
  }

  // normalize sigma to representatives; partner arcs carry the inverse
  std::map<int, std::vector<int>> sigma;
  for (const auto& [arc, perm] : pa.sigma) {
    if (arc < 0 || arc >= base.arc_count()) throw Error("sigma names a missing arc");
    if (!is_perm(perm, q)) throw Error("sigma entry for arc " + std::to_string(arc) + " is not a permutation");
    int rep = pair_rep(base, arc);
    auto normalized = (arc == rep) ? perm : inverse_perm(perm);
    if (sigma.count(rep) && sigma[rep] != normalized)
      throw Error("conflicting sigma entries for the sym pair of arc " + std::to_string(arc));
    sigma[rep] = std::move(normalized);
  }
  auto cotree = cotree_representatives(base, pa.tree_arcs);
  for (int rep : cotree) {
    if (!sigma.count(rep)) throw Error("missing sigma for cotree arc " + std::to_string(rep));
    if (base.self_sym(rep)) {
      const auto& s = sigma[rep];
      for (int i = 0; i < q; ++i)
        if (s[s[i]] != i)
          throw Error("sigma on self-symmetric loop " + std::to_string(rep) + " must be an involution");
    }
  }
  if (sigma.size() != cotree.size()) throw Error("sigma names arcs outside the cotree");

  const bool ported = base.has_ports();
  std::vector<ArcRec> arcs;
  std::vector<int> sym;
  std::vector<int> amap_rev;  // lift arc -> base arc
  auto vertex = [&](int u, int i) { return u * q + i; };
  auto add_pair = [&](int s, int t, int base_fwd, int base_rev) {
    int id = static_cast<int>(arcs.size());
    arcs.push_back({s, t});
    arcs.push_back({t, s});
    sym.push_back(id + 1);
    sym.push_back(id);
    amap_rev.push_back(base_fwd);
    amap_rev.push_back(base_rev);
  };

  for (int a : pa.tree_arcs) {
    for (int i = 0; i < q; ++i)
      add_pair(vertex(base.arcs[a].s, i), vertex(base.arcs[a].t, i), a, base.sym[a]);
  }
  for (int rep : cotree) {
    const auto& s = sigma[rep];
    int u = base.arcs[rep].s, v = base.arcs[rep].t;
    if (base.self_sym(rep)) {
      for (int i = 0; i < q; ++i) {
        if (s[i] == i) {
          int id = static_cast<int>(arcs.size());
          arcs.push_back({vertex(u, i), vertex(u, i)});
          sym.push_back(id);
          amap_rev.push_back(rep);
        } else if (s[i] > i) {
          add_pair(vertex(u, i), vertex(u, s[i]), rep, rep);
        }
      }
    } else {
      for (int i = 0; i < q; ++i)
        add_pair(vertex(u, i), vertex(v, s[i]), rep, base.sym[rep]);
    }
  }

  std::vector<int> outport;
  if (ported) {
    outport.resize(arcs.size());
    for (size_t a = 0; a < arcs.size(); ++a) outport[a] = base.outport[amap_rev[a]];
  }
  SymDigraph total = make_sym_digraph(base.n * q, std::move(arcs), std::move(sym), std::move(outport));

  std::vector<int> vmap(total.n);
  for (int u = 0; u < base.n; ++u)
    for (int i = 0; i < q; ++i) vmap[vertex(u, i)] = u;
  CoveringMap cover{std::move(vmap), std::move(amap_rev), q};
  if (!check_symmetric_covering(total, base, cover))
    throw Error("internal: lift failed covering verification");
  return {std::move(total), std::move(cover)};
}

namespace {

std::vector<std::vector<int>> all_perms(int q) {
  std::vector<int> p(q);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::vector<std::vector<int>> all_involutions(int q) {
  std::vector<std::vector<int>> out;
  for (auto& p : all_perms(q)) {
    bool inv = true;
    for (int i = 0; i < q && inv; ++i) inv = p[p[i]] == i;
    if (inv) out.push_back(std::move(p));
  }
  return out;
}

LiftEnumeration enumerate_lifts_impl(const SymDigraph& base, int q, bool require_simple,
                                     bool require_connected, long budget, int max_classes) {
  LiftEnumeration result;
  auto tree = bfs_spanning_tree(base);
  auto cotree = cotree_representatives(base, tree);

  std::vector<std::vector<std::vector<int>>> choices;
  for (int rep : cotree)
    choices.push_back(base.self_sym(rep) ? all_involutions(q) : all_perms(q));

  std::set<std::string> seen;
  std::vector<size_t> pick(choices.size(), 0);
  for (;;) {
    if (result.assignments++ >= budget) {
      result.complete = false;
      break;
    }
    PermAssignment pa;
    pa.q = q;
    pa.tree_arcs = tree;
    for (size_t i = 0; i < choices.size(); ++i) pa.sigma[cotree[i]] = choices[i][pick[i]];
    auto lift = reidemeister_lift(base, pa);
    bool keep = true;
    if (require_simple && !lift.total.is_simple()) keep = false;
    if (keep && require_connected && !lift.total.is_connected()) keep = false;
    if (keep) {
      std::string key = canonical_key(lift.total);
      if (seen.insert(key).second) {
        result.lifts.push_back(std::move(lift.total));
        if (max_classes > 0 && static_cast<int>(result.lifts.size()) >= max_classes) break;
      }
    }
    // lexicographic odometer over the permutation choices
    size_t i = choices.size();
    while (i > 0 && ++pick[i - 1] == choices[i - 1].size()) pick[--i] = 0;
    if (i == 0) break;
  }
  return result;
}

}  // namespace

LiftEnumeration enumerate_lifts(const SymDigraph& base, int q, bool require_simple,
                                bool require_connected, long budget, int max_classes) {
  if (q < 1) throw Error("sheet count must be positive");
  return enumerate_lifts_impl(base, q, require_simple, require_connected, budget, max_classes);
}

UniqueLiftResult unique_simple_connected_lift(const SymDigraph& base, int q, long budget) {
  auto en = enumerate_lifts_impl(base, q, true, true, budget, 2);
  UniqueLiftResult r;
  r.class_count = static_cast<int>(en.lifts.size());
  if (en.lifts.size() >= 2) {
    r.status = UniqueLiftResult::Status::ambiguous;
  } else if (!en.complete) {
    r.status = UniqueLiftResult::Status::unknown;
  } else if (en.lifts.size() == 1) {
    r.status = UniqueLiftResult::Status::unique;
    r.lift = std::move(en.lifts.front());
  } else {
    r.status = UniqueLiftResult::Status::none;
  }
  return r;
}

}  // namespace anoncover
