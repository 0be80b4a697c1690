#include "anoncover/covering.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include "anoncover/canonical.hpp"

namespace anoncover {

json to_json(const CoveringMap& c) {
  return json{{"vmap", c.vmap}, {"amap", c.amap}, {"q", c.q}};
}

CoveringMap covering_map_from_json(const json& j) {
  CoveringMap c;
  c.vmap = j.at("vmap").get<std::vector<int>>();
  c.amap = j.at("amap").get<std::vector<int>>();
  c.q = j.at("q").get<int>();
  return c;
}

json MorphismReport::to_json() const {
  json fails = json::array();
  for (const auto& f : failures) {
    json e = {{"flag", f.flag}, {"detail", f.detail}};
    if (f.vertex >= 0) e["vertex"] = f.vertex;
    if (f.arc >= 0) e["arc"] = f.arc;
    fails.push_back(std::move(e));
  }
  return json{{"is_homomorphism", is_homomorphism},
              {"is_fibration", is_fibration},
              {"is_opfibration", is_opfibration},
              {"is_covering", is_covering},
              {"is_symmetric_covering", is_symmetric_covering},
              {"is_port_preserving", is_port_preserving},
              {"failures", std::move(fails)}};
}

MorphismReport classify_morphism(const SymDigraph& total, const SymDigraph& base,
                                 const std::vector<int>& vmap, const std::vector<int>& amap) {
  if (static_cast<int>(vmap.size()) != total.n || static_cast<int>(amap.size()) != total.arc_count())
    throw Error("vmap/amap must be total functions on the total graph");
  for (int v = 0; v < total.n; ++v)
    if (vmap[v] < 0 || vmap[v] >= base.n) throw Error("vmap out of range at vertex " + std::to_string(v));
  for (int a = 0; a < total.arc_count(); ++a)
    if (amap[a] < 0 || amap[a] >= base.arc_count())
      throw Error("amap out of range at arc " + std::to_string(a));

  MorphismReport r;
  r.is_homomorphism = true;
  for (int a = 0; a < total.arc_count() && r.is_homomorphism; ++a) {
    if (vmap[total.arcs[a].s] != base.arcs[amap[a]].s || vmap[total.arcs[a].t] != base.arcs[amap[a]].t) {
      r.is_homomorphism = false;
      r.failures.push_back({"homomorphism", -1, a, "arc image does not match endpoint images"});
    }
  }

  auto bijective_on = [&](bool incoming) {
    for (int v = 0; v < total.n; ++v) {
      const auto& local = incoming ? total.in_arcs[v] : total.out_arcs[v];
      const auto& image = incoming ? base.in_arcs[vmap[v]] : base.out_arcs[vmap[v]];
      if (local.size() != image.size()) {
        r.failures.push_back({incoming ? "fibration" : "opfibration", v, -1,
                              "arc count differs from image vertex"});
        return false;
      }
      std::set<int> seen;
      for (int a : local) {
        if (!seen.insert(amap[a]).second) {
          r.failures.push_back({incoming ? "fibration" : "opfibration", v, a,
                                "two arcs share the same image"});
          return false;
        }
      }
    }
    return true;
  };
  r.is_fibration = r.is_homomorphism && bijective_on(true);
  r.is_opfibration = r.is_homomorphism && bijective_on(false);
  r.is_covering = r.is_fibration && r.is_opfibration;

  bool sym_ok = true;
  for (int a = 0; a < total.arc_count(); ++a) {
    if (amap[total.sym[a]] != base.sym[amap[a]]) {
      sym_ok = false;
      r.failures.push_back({"symmetric", -1, a, "amap does not commute with sym"});
      break;
    }
  }
  r.is_symmetric_covering = r.is_covering && sym_ok;

  if (total.has_ports() && base.has_ports()) {
    r.is_port_preserving = true;
    for (int a = 0; a < total.arc_count(); ++a) {
      if (total.outport[a] != base.outport[amap[a]]) {
        r.is_port_preserving = false;
        r.failures.push_back({"port", -1, a, "outport differs from image arc"});
        break;
      }
    }
  }
  return r;
}

int sheets_of(const SymDigraph& total, const SymDigraph& base, const CoveringMap& c) {
  std::vector<int> fibre(base.n, 0);
  for (int v = 0; v < total.n; ++v) fibre[c.vmap[v]]++;
  int q = fibre.empty() ? 0 : fibre[0];
  for (int b = 0; b < base.n; ++b)
    if (fibre[b] != q)
      throw Error("unequal fibres: vertex " + std::to_string(b) + " has " + std::to_string(fibre[b]) +
                  " preimages, expected " + std::to_string(q));
  if (q * base.n != total.n) throw Error("sheet count does not divide the total graph");
  return q;
}

bool check_symmetric_covering(const SymDigraph& total, const SymDigraph& base, const CoveringMap& c) {
  auto report = classify_morphism(total, base, c.vmap, c.amap);
  if (!report.is_symmetric_covering) return false;
  return sheets_of(total, base, c) == c.q;
}

FibrePartition partition_from_block_ids(const std::vector<int>& block_of, int nblocks) {
  FibrePartition p;
  p.blocks.assign(nblocks, {});
  for (size_t v = 0; v < block_of.size(); ++v) p.blocks[block_of[v]].push_back(static_cast<int>(v));
  return p;
}

namespace {

std::vector<int> block_ids(const SymDigraph& d, const FibrePartition& p) {
  std::vector<int> block_of(d.n, -1);
  for (size_t b = 0; b < p.blocks.size(); ++b)
    for (int v : p.blocks[b]) {
      if (v < 0 || v >= d.n || block_of[v] != -1) throw Error("blocks do not partition the vertex set");
      block_of[v] = static_cast<int>(b);
    }
  for (int v = 0; v < d.n; ++v)
    if (block_of[v] == -1) throw Error("vertex " + std::to_string(v) + " missing from partition");
  return block_of;
}

// counts[v][b] = number of arcs from v into block b
std::vector<std::vector<int>> block_counts(const SymDigraph& d, const std::vector<int>& block_of,
                                           int nblocks) {
  std::vector<std::vector<int>> counts(d.n, std::vector<int>(nblocks, 0));
  for (int a = 0; a < d.arc_count(); ++a) counts[d.arcs[a].s][block_of[d.arcs[a].t]]++;
  return counts;
}

}  // namespace

bool is_equitable(const SymDigraph& d, const FibrePartition& p) {
  auto block_of = block_ids(d, p);
  auto counts = block_counts(d, block_of, static_cast<int>(p.blocks.size()));
  for (const auto& block : p.blocks)
    for (size_t i = 1; i < block.size(); ++i)
      if (counts[block[i]] != counts[block[0]]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// matching / factorization machinery for partition_to_base

namespace {

// Perfect matching enumeration on a small simple graph given by an adjacency
// matrix over local indices; visits matchings until fn returns true.
bool enumerate_pms(const std::vector<std::vector<bool>>& adj, std::vector<std::pair<int, int>>& chosen,
                   std::vector<bool>& covered, const std::function<bool()>& fn) {
  int k = static_cast<int>(adj.size());
  int u = 0;
  while (u < k && covered[u]) ++u;
  if (u == k) return fn();
  covered[u] = true;
  for (int v = u + 1; v < k; ++v) {
    if (covered[v] || !adj[u][v]) continue;
    covered[v] = true;
    chosen.push_back({u, v});
    if (enumerate_pms(adj, chosen, covered, fn)) return true;
    chosen.pop_back();
    covered[v] = false;
  }
  covered[u] = false;
  return false;
}

// ell pairwise edge-disjoint perfect matchings, or failure.
bool find_disjoint_pms(std::vector<std::vector<bool>> adj, int ell,
                       std::vector<std::vector<std::pair<int, int>>>& out) {
  if (ell == 0) return true;
  std::vector<std::pair<int, int>> chosen;
  std::vector<bool> covered(adj.size(), false);
  return enumerate_pms(adj, chosen, covered, [&]() {
    auto reduced = adj;
    for (auto [u, v] : chosen) reduced[u][v] = reduced[v][u] = false;
    out.push_back(chosen);
    if (find_disjoint_pms(std::move(reduced), ell - 1, out)) return true;
    out.pop_back();
    return false;
  });
}

// Kuhn's augmenting-path matching; left/right indexed 0..L-1 / 0..R-1.
struct Bipartite {
  std::vector<std::vector<int>> adj;  // left -> rights
  std::vector<int> match_right;       // right -> left or -1

  bool try_kuhn(int u, std::vector<bool>& used) {
    for (int v : adj[u]) {
      if (used[v]) continue;
      used[v] = true;
      if (match_right[v] < 0 || try_kuhn(match_right[v], used)) {
        match_right[v] = u;
        return true;
      }
    }
    return false;
  }

  // perfect matching left->right; empty on failure
  std::vector<int> perfect(int right_size) {
    match_right.assign(right_size, -1);
    for (int u = 0; u < static_cast<int>(adj.size()); ++u) {
      std::vector<bool> used(right_size, false);
      if (!try_kuhn(u, used)) return {};
    }
    std::vector<int> match_left(adj.size(), -1);
    for (int v = 0; v < right_size; ++v)
      if (match_right[v] >= 0) match_left[match_right[v]] = v;
    return match_left;
  }
};

// Decomposition of a c-regular bipartite graph (as left-adjacency multiset)
// into c perfect matchings.
std::vector<std::vector<int>> regular_bipartite_decomposition(std::vector<std::vector<int>> adj,
                                                              int right_size, int c) {
  std::vector<std::vector<int>> result;
  for (int round = 0; round < c; ++round) {
    Bipartite b{adj, {}};
    auto match = b.perfect(right_size);
    if (match.empty()) throw Error("regular bipartite decomposition failed (graph not regular?)");
    result.push_back(match);
    for (size_t u = 0; u < adj.size(); ++u) {
      auto it = std::find(adj[u].begin(), adj[u].end(), match[u]);
      adj[u].erase(it);
    }
  }
  return result;
}

// Eulerian orientation of a simple graph with all degrees even: every vertex
// ends with out-degree = in-degree = deg/2.
std::vector<std::pair<int, int>> euler_orient(const std::vector<std::vector<bool>>& adj) {
  int k = static_cast<int>(adj.size());
  auto remaining = adj;
  std::vector<int> deg(k, 0);
  for (int u = 0; u < k; ++u)
    for (int v = 0; v < k; ++v)
      if (remaining[u][v]) deg[u]++;
  std::vector<std::pair<int, int>> oriented;
  for (int start = 0; start < k; ++start) {
    while (deg[start] > 0) {
      // walk a closed trail from start, orienting as we go
      int u = start;
      do {
        int v = 0;
        while (!remaining[u][v]) ++v;
        remaining[u][v] = remaining[v][u] = false;
        deg[u]--;
        deg[v]--;
        oriented.push_back({u, v});
        u = v;
      } while (u != start);
    }
  }
  return oriented;
}

// 2-factorization of an even-regular simple graph on local indices: Euler
// orientation, then split the out-arcs into deg/2 permutation rounds.
std::vector<std::vector<std::pair<int, int>>> two_factorize(const std::vector<std::vector<bool>>& adj,
                                                            int degree) {
  int k = static_cast<int>(adj.size());
  if (degree == 0) return {};
  auto oriented = euler_orient(adj);
  std::vector<std::vector<int>> out_adj(k);
  for (auto [u, v] : oriented) out_adj[u].push_back(v);
  auto rounds = regular_bipartite_decomposition(out_adj, k, degree / 2);
  std::vector<std::vector<std::pair<int, int>>> factors;
  for (const auto& match : rounds) {
    std::vector<std::pair<int, int>> factor;
    for (int u = 0; u < k; ++u) factor.push_back({u, match[u]});
    factors.push_back(std::move(factor));
  }
  return factors;
}

struct BaseBuilder {
  std::vector<ArcRec> arcs;
  std::vector<int> sym;
  int add_self_sym_loop(int v) {
    arcs.push_back({v, v});
    sym.push_back(static_cast<int>(arcs.size()) - 1);
    return static_cast<int>(arcs.size()) - 1;
  }
  std::pair<int, int> add_pair(int s, int t) {
    int a = static_cast<int>(arcs.size());
    arcs.push_back({s, t});
    arcs.push_back({t, s});
    sym.push_back(a + 1);
    sym.push_back(a);
    return {a, a + 1};
  }
};

int find_arc(const SymDigraph& d, int u, int v) {
  for (int a : d.out_arcs[u])
    if (d.arcs[a].t == v) return a;
  throw Error("internal: missing arc");
}

}  // namespace

std::optional<BaseResult> partition_to_base(const SymDigraph& d, const FibrePartition& p,
                                            const std::vector<int>* self_sym_loops) {
  if (!d.is_simple()) throw Error("partition_to_base requires a simple symmetric digraph");
  auto block_of = block_ids(d, p);
  const int nblocks = static_cast<int>(p.blocks.size());
  for (const auto& block : p.blocks)
    if (static_cast<int>(block.size()) != p.block_size())
      throw Error("blocks must have equal sizes");
  auto counts = block_counts(d, block_of, nblocks);
  for (const auto& block : p.blocks)
    for (size_t i = 1; i < block.size(); ++i)
      if (counts[block[i]] != counts[block[0]])
        throw Error("partition is not equitable (vertex " + std::to_string(block[i]) + ")");

  BaseBuilder builder;
  std::vector<int> amap(d.arc_count(), -1);

  // internal structure per block
  for (int b = 0; b < nblocks; ++b) {
    const auto& verts = p.blocks[b];
    int k = static_cast<int>(verts.size());
    int c = counts[verts[0]][b];
    int ell = self_sym_loops ? (*self_sym_loops)[b] : (c % 2);
    if (ell < 0 || ell > c || (c - ell) % 2 != 0) return std::nullopt;

    std::vector<std::vector<bool>> adj(k, std::vector<bool>(k, false));
    std::map<int, int> local;
    for (int i = 0; i < k; ++i) local[verts[i]] = i;
    for (int i = 0; i < k; ++i)
      for (int a : d.out_arcs[verts[i]])
        if (block_of[d.arcs[a].t] == b) adj[i][local[d.arcs[a].t]] = true;

    std::vector<std::vector<std::pair<int, int>>> matchings;
    if (!find_disjoint_pms(adj, ell, matchings)) return std::nullopt;
    auto remaining = adj;
    for (const auto& m : matchings)
      for (auto [u, v] : m) remaining[u][v] = remaining[v][u] = false;
    auto factors = two_factorize(remaining, c - ell);

    for (const auto& m : matchings) {
      int loop = builder.add_self_sym_loop(b);
      for (auto [u, v] : m) {
        amap[find_arc(d, verts[u], verts[v])] = loop;
        amap[find_arc(d, verts[v], verts[u])] = loop;
      }
    }
    for (const auto& f : factors) {
      auto [fwd, rev] = builder.add_pair(b, b);
      for (auto [u, v] : f) {
        amap[find_arc(d, verts[u], verts[v])] = fwd;
        amap[find_arc(d, verts[v], verts[u])] = rev;
      }
    }
  }

  // cross structure per block pair
  for (int b1 = 0; b1 < nblocks; ++b1) {
    for (int b2 = b1 + 1; b2 < nblocks; ++b2) {
      int c = counts[p.blocks[b1][0]][b2];
      if (counts[p.blocks[b2][0]][b1] != c) return std::nullopt;  // cannot happen when equitable
      if (c == 0) continue;
      const auto& left = p.blocks[b1];
      const auto& right = p.blocks[b2];
      std::map<int, int> rlocal;
      for (size_t i = 0; i < right.size(); ++i) rlocal[right[i]] = static_cast<int>(i);
      std::vector<std::vector<int>> adj(left.size());
      for (size_t i = 0; i < left.size(); ++i)
        for (int a : d.out_arcs[left[i]])
          if (block_of[d.arcs[a].t] == b2) adj[i].push_back(rlocal[d.arcs[a].t]);
      auto rounds = regular_bipartite_decomposition(adj, static_cast<int>(right.size()), c);
      for (const auto& match : rounds) {
        auto [fwd, rev] = builder.add_pair(b1, b2);
        for (size_t i = 0; i < left.size(); ++i) {
          amap[find_arc(d, left[i], right[match[i]])] = fwd;
          amap[find_arc(d, right[match[i]], left[i])] = rev;
        }
      }
    }
  }

  SymDigraph base = make_sym_digraph(nblocks, std::move(builder.arcs), std::move(builder.sym));
  CoveringMap cover{block_of, std::move(amap), p.block_size()};
  if (!check_symmetric_covering(d, base, cover))
    throw Error("internal: constructed quotient failed verification");
  return BaseResult{std::move(base), std::move(cover)};
}

// ---------------------------------------------------------------------------
// brute-force oracle: per-arc backtracking, no matching theory

namespace {

struct OracleProblem {
  const SymDigraph& d;
  const std::vector<int>& block_of;
  SymDigraph base;
  std::vector<int> amap;
  // usage flags per (vertex, base arc)
  std::vector<std::vector<char>> out_used;
  std::vector<std::vector<char>> in_used;
  std::vector<int> order;  // arcs grouped by source vertex

  bool assign(size_t idx) {
    while (idx < order.size() && amap[order[idx]] >= 0) ++idx;
    if (idx == order.size()) return true;
    int a = order[idx];
    int u = d.arcs[a].s, v = d.arcs[a].t;
    int asym = d.sym[a];
    for (int slot : base.out_arcs[block_of[u]]) {
      if (base.arcs[slot].t != block_of[v]) continue;
      if (out_used[u][slot] || in_used[v][slot]) continue;
      int slot_sym = base.sym[slot];
      if (asym == a) {
        // self-symmetric arcs map only onto self-symmetric slots
        if (slot_sym != slot) continue;
      } else if (slot_sym == slot) {
        // whole sym pair lands on one self-symmetric slot; a loop pair cannot
        if (u == v) continue;
        if (out_used[v][slot] || in_used[u][slot]) continue;
      } else {
        if (out_used[v][slot_sym] || in_used[u][slot_sym]) continue;
      }
      amap[a] = slot;
      out_used[u][slot] = in_used[v][slot] = 1;
      if (asym != a) {
        amap[asym] = slot_sym;
        out_used[v][slot_sym] = in_used[u][slot_sym] = 1;
      }
      if (assign(idx + 1)) return true;
      amap[a] = -1;
      out_used[u][slot] = in_used[v][slot] = 0;
      if (asym != a) {
        amap[asym] = -1;
        out_used[v][slot_sym] = in_used[u][slot_sym] = 0;
      }
    }
    return false;
  }
};

std::optional<BaseResult> oracle_assign(const SymDigraph& d, const FibrePartition& p,
                                        const std::vector<int>& block_of,
                                        const std::vector<int>& self_sym_loops) {
  const int nblocks = static_cast<int>(p.blocks.size());
  // slot structure: derive arc counts from the first member of each block
  BaseBuilder builder;
  std::vector<std::vector<int>> counts = block_counts(d, block_of, nblocks);
  for (int b = 0; b < nblocks; ++b) {
    int c = counts[p.blocks[b][0]][b];
    int ell = self_sym_loops[b];
    if (ell < 0 || ell > c || (c - ell) % 2 != 0) return std::nullopt;
    for (int j = 0; j < ell; ++j) builder.add_self_sym_loop(b);
    for (int j = 0; j < (c - ell) / 2; ++j) builder.add_pair(b, b);
  }
  for (int b1 = 0; b1 < nblocks; ++b1)
    for (int b2 = b1 + 1; b2 < nblocks; ++b2) {
      int c = counts[p.blocks[b1][0]][b2];
      if (counts[p.blocks[b2][0]][b1] != c) return std::nullopt;
      for (int j = 0; j < c; ++j) builder.add_pair(b1, b2);
    }

  SymDigraph base;
  try {
    base = make_sym_digraph(nblocks, std::move(builder.arcs), std::move(builder.sym));
  } catch (const Error&) {
    return std::nullopt;
  }

  OracleProblem prob{d, block_of, std::move(base), std::vector<int>(d.arc_count(), -1), {}, {}, {}};
  prob.out_used.assign(d.n, std::vector<char>(prob.base.arc_count(), 0));
  prob.in_used.assign(d.n, std::vector<char>(prob.base.arc_count(), 0));
  for (int v = 0; v < d.n; ++v)
    for (int a : d.out_arcs[v]) prob.order.push_back(a);
  if (!prob.assign(0)) return std::nullopt;

  CoveringMap cover{block_of, std::move(prob.amap), p.block_size()};
  if (!check_symmetric_covering(d, prob.base, cover)) return std::nullopt;
  return BaseResult{std::move(prob.base), std::move(cover)};
}

// all per-block self-symmetric loop count candidates: ell == c (mod 2)
std::vector<std::vector<int>> loop_count_candidates(const SymDigraph& d, const FibrePartition& p,
                                                    const std::vector<int>& block_of) {
  auto counts = block_counts(d, block_of, static_cast<int>(p.blocks.size()));
  std::vector<std::vector<int>> cands;
  for (size_t b = 0; b < p.blocks.size(); ++b) {
    int c = counts[p.blocks[b][0]][b];
    std::vector<int> opts;
    for (int ell = c % 2; ell <= c; ell += 2) opts.push_back(ell);
    cands.push_back(std::move(opts));
  }
  return cands;
}

}  // namespace

std::optional<BaseResult> brute_force_base_oracle(const SymDigraph& d, const FibrePartition& p,
                                                  const std::vector<int>& self_sym_loops,
                                                  int size_guard) {
  if (d.n > size_guard) throw Error("oracle size guard exceeded (n=" + std::to_string(d.n) + ")");
  auto block_of = block_ids(d, p);
  for (const auto& block : p.blocks)
    if (static_cast<int>(block.size()) != p.block_size()) return std::nullopt;
  return oracle_assign(d, p, block_of, self_sym_loops);
}

std::optional<BaseResult> brute_force_base_oracle(const SymDigraph& d, const FibrePartition& p) {
  if (d.n > 12) throw Error("oracle size guard exceeded (n=" + std::to_string(d.n) + ")");
  auto block_of = block_ids(d, p);
  for (const auto& block : p.blocks)
    if (static_cast<int>(block.size()) != p.block_size()) return std::nullopt;
  // try every self-symmetric loop structure, fewest loops first
  auto cands = loop_count_candidates(d, p, block_of);
  std::vector<size_t> pick(cands.size(), 0);
  for (;;) {
    std::vector<int> lvec(cands.size());
    for (size_t b = 0; b < cands.size(); ++b) {
      if (cands[b].empty()) return std::nullopt;
      lvec[b] = cands[b][pick[b]];
    }
    if (auto res = oracle_assign(d, p, block_of, lvec)) return res;
    size_t b = 0;
    while (b < pick.size() && ++pick[b] == cands[b].size()) pick[b++] = 0;
    if (b == pick.size()) return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// partition enumeration

bool for_each_equitable_partition(const SymDigraph& d, int q, long& budget,
                                  const std::function<bool(const FibrePartition&)>& fn) {
  if (q < 1 || d.n % q != 0) return true;
  const int nblocks = d.n / q;
  std::vector<int> block_of(d.n, -1);
  std::vector<std::vector<int>> members(nblocks);

  auto counts_into = [&](int v, int b) {
    int c = 0;
    for (int a : d.out_arcs[v])
      if (block_of[d.arcs[a].t] == b) ++c;
    return c;
  };

  bool aborted = false;
  bool stopped = false;
  // blocks indexed in first-occurrence order, so each partition shows up once
  std::function<void(int, int)> rec = [&](int v, int used) {
    if (aborted || stopped) return;
    if (--budget < 0) {
      aborted = true;
      return;
    }
    if (v == d.n) {
      auto p = partition_from_block_ids(block_of, nblocks);
      if (is_equitable(d, p) && !fn(p)) stopped = true;
      return;
    }
    int limit = std::min(used + 1, nblocks);
    for (int b = 0; b < limit && !aborted && !stopped; ++b) {
      if (static_cast<int>(members[b].size()) == q) continue;
      if (!members[b].empty() && d.degree(members[b][0]) != d.degree(v)) continue;
      bool ok = true;
      if (!members[b].empty()) {
        // counts into already-completed blocks are final
        for (int fb = 0; fb < used && ok; ++fb)
          if (static_cast<int>(members[fb].size()) == q &&
              counts_into(v, fb) != counts_into(members[b][0], fb))
            ok = false;
      }
      if (!ok) continue;
      block_of[v] = b;
      members[b].push_back(v);
      bool consistent = true;
      if (static_cast<int>(members[b].size()) == q) {
        for (int ob = 0; ob < std::max(used, b + 1) && consistent; ++ob) {
          if (members[ob].empty()) continue;
          int expect = counts_into(members[ob][0], b);
          for (size_t i = 1; i < members[ob].size() && consistent; ++i)
            if (counts_into(members[ob][i], b) != expect) consistent = false;
        }
      }
      if (consistent) rec(v + 1, std::max(used, b + 1));
      members[b].pop_back();
      block_of[v] = -1;
    }
  };

  rec(0, 0);
  return !aborted;
}

// ---------------------------------------------------------------------------
// base enumeration, minimality

BaseEnumeration enumerate_bases(const SymDigraph& d, const EnumerateOptions& opt) {
  if (!d.is_connected()) throw Error("enumerate_bases requires a connected digraph");
  BaseEnumeration result;
  long budget = opt.budget;
  std::set<std::string> seen;

  const bool simple = d.is_simple();
  std::vector<int> sheet_counts;
  for (int q = 2; q <= d.n; ++q)
    if (d.n % q == 0) sheet_counts.push_back(q);
  // existence checks try the single-block quotient first
  if (opt.existence_only) std::reverse(sheet_counts.begin(), sheet_counts.end());
  for (int q : sheet_counts) {
    if (opt.max_q > 0 && q > opt.max_q) continue;
    bool finished = for_each_equitable_partition(d, q, budget, [&](const FibrePartition& p) {
      auto block_of = block_ids(d, p);
      auto cands = loop_count_candidates(d, p, block_of);
      std::vector<size_t> pick(cands.size(), 0);
      for (;;) {
        std::vector<int> lvec(cands.size());
        bool have = true;
        for (size_t b = 0; b < cands.size(); ++b) {
          if (cands[b].empty()) {
            have = false;
            break;
          }
          lvec[b] = cands[b][pick[b]];
        }
        if (!have) break;
        std::optional<BaseResult> res;
        if (simple)
          res = partition_to_base(d, p, &lvec);
        else
          res = brute_force_base_oracle(d, p, lvec, /*size_guard=*/64);
        if (res) {
          std::string key = canonical_key(res->base);
          if (seen.insert(key).second) result.bases.push_back(std::move(*res));
          if (opt.existence_only) return false;
        }
        size_t b = 0;
        while (b < pick.size() && ++pick[b] == cands[b].size()) pick[b++] = 0;
        if (b == pick.size()) break;
      }
      return true;
    });
    if (!finished) {
      result.complete = false;
      break;
    }
    if (opt.existence_only && !result.bases.empty()) break;
  }
  result.nodes = opt.budget - budget;
  return result;
}

MinimalityResult is_minimal(const SymDigraph& d, long budget) {
  EnumerateOptions opt;
  opt.budget = budget;
  opt.existence_only = true;
  auto bases = enumerate_bases(d, opt);
  MinimalityResult r;
  if (!bases.bases.empty()) {
    r.verdict = MinimalityResult::Verdict::not_minimal;
    r.witness = std::move(bases.bases.front());
  } else if (bases.complete) {
    r.verdict = MinimalityResult::Verdict::minimal;
  } else {
    r.verdict = MinimalityResult::Verdict::unknown;
  }
  return r;
}

// ---------------------------------------------------------------------------
// ported quotients (ports rigidify the base over a fixed partition)

std::optional<BaseResult> ported_quotient(const SymDigraph& d, const FibrePartition& p) {
  if (!d.has_ports()) throw Error("ported_quotient requires outports");
  auto block_of = block_ids(d, p);
  const int nblocks = static_cast<int>(p.blocks.size());
  for (const auto& block : p.blocks)
    if (static_cast<int>(block.size()) != p.block_size()) return std::nullopt;

  // slot (b,p) -> (target block, return port), uniform across the block
  std::vector<std::vector<std::pair<int, int>>> slot(nblocks);
  for (int b = 0; b < nblocks; ++b) {
    int deg = d.degree(p.blocks[b][0]);
    for (int v : p.blocks[b])
      if (d.degree(v) != deg) return std::nullopt;
    slot[b].assign(deg, {-1, -1});
    for (int port = 1; port <= deg; ++port) {
      int tb = -1, rp = -1;
      for (int v : p.blocks[b]) {
        int a = d.arc_at_port(v, port);
        int t = block_of[d.arcs[a].t];
        int r = d.inport(a);
        if (tb < 0) {
          tb = t;
          rp = r;
        } else if (tb != t || rp != r) {
          return std::nullopt;
        }
      }
      slot[b][port - 1] = {tb, rp};
    }
  }

  // assemble the ported base
  std::vector<ArcRec> arcs;
  std::vector<int> sym;
  std::vector<int> outport;
  std::vector<std::vector<int>> slot_arc(nblocks);
  for (int b = 0; b < nblocks; ++b) {
    slot_arc[b].assign(slot[b].size(), -1);
    for (size_t i = 0; i < slot[b].size(); ++i) {
      slot_arc[b][i] = static_cast<int>(arcs.size());
      arcs.push_back({b, slot[b][i].first});
      outport.push_back(static_cast<int>(i) + 1);
      sym.push_back(-1);
    }
  }
  for (int b = 0; b < nblocks; ++b)
    for (size_t i = 0; i < slot[b].size(); ++i) {
      auto [tb, rp] = slot[b][i];
      int partner = slot_arc[tb][rp - 1];
      // the partner slot must point back
      if (slot[tb][rp - 1] != std::make_pair(b, static_cast<int>(i) + 1)) return std::nullopt;
      sym[slot_arc[b][i]] = partner;
    }

  SymDigraph base;
  try {
    base = make_sym_digraph(nblocks, std::move(arcs), std::move(sym), std::move(outport));
  } catch (const Error&) {
    return std::nullopt;
  }
  std::vector<int> amap(d.arc_count());
  for (int a = 0; a < d.arc_count(); ++a)
    amap[a] = slot_arc[block_of[d.arcs[a].s]][d.outport[a] - 1];
  CoveringMap cover{block_of, std::move(amap), p.block_size()};
  auto report = classify_morphism(d, base, cover.vmap, cover.amap);
  if (!report.is_symmetric_covering || !report.is_port_preserving) return std::nullopt;
  return BaseResult{std::move(base), std::move(cover)};
}

MinimalityResult ported_is_minimal(const SymDigraph& d, long budget) {
  MinimalityResult r;
  r.verdict = MinimalityResult::Verdict::minimal;
  for (int q = 2; q <= d.n; ++q) {
    if (d.n % q != 0) continue;
    bool finished = for_each_equitable_partition(d, q, budget, [&](const FibrePartition& p) {
      if (auto res = ported_quotient(d, p)) {
        r.verdict = MinimalityResult::Verdict::not_minimal;
        r.witness = std::move(*res);
        return false;
      }
      return true;
    });
    if (r.verdict == MinimalityResult::Verdict::not_minimal) return r;
    if (!finished) {
      r.verdict = MinimalityResult::Verdict::unknown;
      return r;
    }
  }
  return r;
}

PortNumbering lift_ports(const UGraph& g, const SymDigraph& base, const CoveringMap& cover) {
  if (!base.has_ports()) throw Error("lift_ports requires a ported base");
  SymDigraph total = dir(g);
  auto report = classify_morphism(total, base, cover.vmap, cover.amap);
  if (!report.is_symmetric_covering) {
    std::string why = report.failures.empty() ? "not a covering" : report.failures.front().flag;
    throw Error("covering map rejected: violated condition '" + why + "'");
  }
  PortNumbering pn;
  pn.port_of.resize(g.n);
  for (int a = 0; a < total.arc_count(); ++a)
    pn.port_of[total.arcs[a].s][total.arcs[a].t] = base.outport[cover.amap[a]];
  for (int u = 0; u < g.n; ++u) {
    std::vector<bool> used(g.degree(u) + 1, false);
    for (const auto& [v, p] : pn.port_of[u]) {
      if (p < 1 || p > g.degree(u) || used[p])
        throw Error("covering map rejected: lifted ports not bijective at vertex " + std::to_string(u));
      used[p] = true;
    }
  }
  return pn;
}

// ---------------------------------------------------------------------------
// exhaustive arc-map search against a fixed vertex map

std::optional<CoveringMap> search_covering_map(const SymDigraph& total, const SymDigraph& base,
                                               const std::vector<int>& vmap, bool require_symmetric,
                                               long budget) {
  if (static_cast<int>(vmap.size()) != total.n) throw Error("vmap must cover the total graph");
  std::vector<int> amap(total.arc_count(), -1);
  std::vector<std::vector<char>> out_used(total.n, std::vector<char>(base.arc_count(), 0));
  std::vector<std::vector<char>> in_used(total.n, std::vector<char>(base.arc_count(), 0));
  std::vector<int> order;
  for (int v = 0; v < total.n; ++v)
    for (int a : total.out_arcs[v]) order.push_back(a);

  long nodes = budget;
  std::function<bool(size_t)> rec = [&](size_t idx) -> bool {
    while (idx < order.size() && amap[order[idx]] >= 0) ++idx;
    if (idx == order.size()) return true;
    if (--nodes < 0) throw Error("search_covering_map budget exhausted");
    int a = order[idx];
    int u = total.arcs[a].s, v = total.arcs[a].t;
    int asym = total.sym[a];
    for (int slot : base.out_arcs[vmap[u]]) {
      if (base.arcs[slot].t != vmap[v]) continue;
      if (out_used[u][slot] || in_used[v][slot]) continue;
      int slot_sym = base.sym[slot];
      if (require_symmetric) {
        if (asym == a) {
          if (slot_sym != slot) continue;
        } else if (slot_sym == slot) {
          if (u == v) continue;
          if (out_used[v][slot] || in_used[u][slot]) continue;
        } else {
          if (out_used[v][slot_sym] || in_used[u][slot_sym]) continue;
        }
      }
      amap[a] = slot;
      out_used[u][slot] = in_used[v][slot] = 1;
      if (require_symmetric && asym != a) {
        amap[asym] = slot_sym;
        out_used[v][slot_sym] = in_used[u][slot_sym] = 1;
      }
      if (rec(idx + 1)) return true;
      amap[a] = -1;
      out_used[u][slot] = in_used[v][slot] = 0;
      if (require_symmetric && asym != a) {
        amap[asym] = -1;
        out_used[v][slot_sym] = in_used[u][slot_sym] = 0;
      }
    }
    return false;
  };

  if (!rec(0)) return std::nullopt;
  int q = total.n / std::max(base.n, 1);
  return CoveringMap{vmap, std::move(amap), q};
}

}  // namespace anoncover
