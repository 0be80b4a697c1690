#include "anoncover/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace anoncover {

namespace {

std::string edge_str(const Edge& e) {
  return "{" + std::to_string(e.first) + "," + std::to_string(e.second) + "}";
}

std::vector<std::vector<int>> build_adj(int n, const std::vector<Edge>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

}  // namespace

int PortNumbering::neighbor(int u, int p) const {
  for (const auto& [v, q] : port_of.at(u))
    if (q == p) return v;
  throw Error("no port " + std::to_string(p) + " at vertex " + std::to_string(u));
}

bool UGraph::has_edge(int u, int v) const {
  return std::binary_search(adj[u].begin(), adj[u].end(), v);
}

UGraph make_ugraph(int n, std::vector<Edge> edges, std::string name) {
  if (n < 1) throw Error("graph must have at least one vertex");
  for (auto& e : edges) e = make_edge(e.first, e.second);
  std::sort(edges.begin(), edges.end());
  for (size_t i = 0; i < edges.size(); ++i) {
    const auto& [u, v] = edges[i];
    if (u < 0 || v >= n) throw Error("edge " + edge_str(edges[i]) + " out of range for n=" + std::to_string(n));
    if (u == v) throw Error("loop at vertex " + std::to_string(u) + " not allowed");
    if (i > 0 && edges[i] == edges[i - 1]) throw Error("duplicate edge " + edge_str(edges[i]));
  }
  UGraph g;
  g.n = n;
  g.edges = std::move(edges);
  g.name = std::move(name);
  g.adj = build_adj(n, g.edges);

  std::vector<bool> seen(n, false);
  std::deque<int> queue{0};
  seen[0] = true;
  int reached = 1;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v : g.adj[u])
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        queue.push_back(v);
      }
  }
  if (reached != n) {
    int missing = static_cast<int>(std::find(seen.begin(), seen.end(), false) - seen.begin());
    throw Error("graph is disconnected: vertex " + std::to_string(missing) + " unreachable from 0");
  }
  return g;
}

int SymDigraph::loops_at(int v) const {
  int c = 0;
  for (int a : out_arcs[v])
    if (is_loop(a)) ++c;
  return c;
}

int SymDigraph::self_sym_loops_at(int v) const {
  int c = 0;
  for (int a : out_arcs[v])
    if (is_loop(a) && self_sym(a)) ++c;
  return c;
}

bool SymDigraph::has_loop() const {
  for (int a = 0; a < arc_count(); ++a)
    if (is_loop(a)) return true;
  return false;
}

bool SymDigraph::is_simple() const {
  std::set<std::pair<int, int>> seen;
  for (const auto& arc : arcs) {
    if (arc.s == arc.t) return false;
    if (!seen.insert({arc.s, arc.t}).second) return false;
  }
  return true;
}

bool SymDigraph::is_connected() const {
  if (n == 0) return false;
  std::vector<bool> seen(n, false);
  std::deque<int> queue{0};
  seen[0] = true;
  int reached = 1;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int a : out_arcs[u]) {
      int v = arcs[a].t;
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        queue.push_back(v);
      }
    }
  }
  return reached == n;
}

int SymDigraph::arc_at_port(int v, int p) const {
  for (int a : out_arcs[v])
    if (outport[a] == p) return a;
  throw Error("no outport " + std::to_string(p) + " at vertex " + std::to_string(v));
}

SymDigraph make_sym_digraph(int n, std::vector<ArcRec> arcs, std::vector<int> sym,
                            std::vector<int> outport, std::string name) {
  if (n < 1) throw Error("digraph must have at least one vertex");
  const int m = static_cast<int>(arcs.size());
  if (static_cast<int>(sym.size()) != m) throw Error("sym map size does not match arc count");
  for (int a = 0; a < m; ++a) {
    if (arcs[a].s < 0 || arcs[a].s >= n || arcs[a].t < 0 || arcs[a].t >= n)
      throw Error("arc " + std::to_string(a) + " endpoint out of range");
    if (sym[a] < 0 || sym[a] >= m) throw Error("sym of arc " + std::to_string(a) + " out of range");
  }
  for (int a = 0; a < m; ++a) {
    if (sym[sym[a]] != a) throw Error("sym is not an involution at arc " + std::to_string(a));
    if (arcs[a].s != arcs[sym[a]].t)
      throw Error("sym of arc " + std::to_string(a) + " does not reverse it");
  }

  SymDigraph d;
  d.n = n;
  d.arcs = std::move(arcs);
  d.sym = std::move(sym);
  d.name = std::move(name);
  d.out_arcs.assign(n, {});
  d.in_arcs.assign(n, {});
  for (int a = 0; a < m; ++a) {
    d.out_arcs[d.arcs[a].s].push_back(a);
    d.in_arcs[d.arcs[a].t].push_back(a);
  }

  if (!outport.empty()) {
    if (static_cast<int>(outport.size()) != m) throw Error("outport size does not match arc count");
    d.outport = std::move(outport);
    for (int v = 0; v < n; ++v) {
      std::vector<bool> used(d.degree(v) + 1, false);
      for (int a : d.out_arcs[v]) {
        int p = d.outport[a];
        if (p < 1 || p > d.degree(v) || used[p])
          throw Error("outports at vertex " + std::to_string(v) + " are not a bijection onto [1," +
                      std::to_string(d.degree(v)) + "]");
        used[p] = true;
      }
    }
  }
  return d;
}

GraphMetrics metrics(const UGraph& g) { return metrics(dir(g)); }

GraphMetrics metrics(const SymDigraph& d) {
  GraphMetrics gm;
  gm.n = d.n;
  gm.m = d.arc_count();  // arc count; for dir(G) this is 2|E(G)|
  for (int v = 0; v < d.n; ++v) gm.max_degree = std::max(gm.max_degree, d.degree(v));
  gm.diameter = 0;
  for (int src = 0; src < d.n; ++src) {
    std::vector<int> dist(d.n, -1);
    std::deque<int> queue{src};
    dist[src] = 0;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int a : d.out_arcs[u]) {
        int v = d.arcs[a].t;
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
    for (int v = 0; v < d.n; ++v) {
      if (dist[v] < 0) {
        gm.diameter = -1;  // disconnected
        return gm;
      }
      gm.diameter = std::max(gm.diameter, dist[v]);
    }
  }
  return gm;
}

UGraph parse_ugraph(const json& j) {
  if (!j.contains("n") || !j.contains("edges")) throw Error("ugraph json needs fields n, edges");
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw Error("each edge must be a pair [u,v]");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return make_ugraph(j.at("n").get<int>(), std::move(edges), j.value("name", std::string{}));
}

std::optional<PortNumbering> parse_ports(const json& j, const UGraph& g) {
  if (!j.contains("ports")) return std::nullopt;
  PortNumbering pn;
  pn.port_of.resize(g.n);
  for (const auto& e : j.at("ports")) {
    if (!e.is_array() || e.size() != 3) throw Error("each port entry must be [u,v,p]");
    int u = e[0].get<int>(), v = e[1].get<int>(), p = e[2].get<int>();
    if (u < 0 || u >= g.n || !g.has_edge(u, v))
      throw Error("port entry names missing edge {" + std::to_string(u) + "," + std::to_string(v) + "}");
    if (pn.port_of[u].count(v)) throw Error("duplicate port entry for vertex " + std::to_string(u));
    pn.port_of[u][v] = p;
  }
  for (int u = 0; u < g.n; ++u) {
    std::vector<bool> used(g.degree(u) + 1, false);
    if (static_cast<int>(pn.port_of[u].size()) != g.degree(u))
      throw Error("ports at vertex " + std::to_string(u) + " do not cover all incident edges");
    for (const auto& [v, p] : pn.port_of[u]) {
      if (p < 1 || p > g.degree(u) || used[p])
        throw Error("ports at vertex " + std::to_string(u) + " are not a bijection onto [1," +
                    std::to_string(g.degree(u)) + "]");
      used[p] = true;
    }
  }
  return pn;
}

SymDigraph parse_sym_digraph(const json& j) {
  if (!j.contains("n") || !j.contains("arcs")) throw Error("digraph json needs fields n, arcs");
  const auto& arr = j.at("arcs");
  std::vector<ArcRec> arcs(arr.size());
  std::vector<int> sym(arr.size(), -1);
  std::vector<int> outport;
  bool any_port = false;
  for (const auto& a : arr) {
    int id = a.at("id").get<int>();
    if (id < 0 || id >= static_cast<int>(arcs.size()) || sym[id] != -1)
      throw Error("arc ids must be exactly 0..#arcs-1 (bad id " + std::to_string(id) + ")");
    arcs[id] = {a.at("s").get<int>(), a.at("t").get<int>()};
    sym[id] = a.at("sym").get<int>();
    if (a.contains("outport")) any_port = true;
  }
  if (any_port) {
    outport.assign(arcs.size(), -1);
    for (const auto& a : arr) {
      if (!a.contains("outport")) throw Error("either all arcs or none must carry outport");
      outport[a.at("id").get<int>()] = a.at("outport").get<int>();
    }
  }
  return make_sym_digraph(j.at("n").get<int>(), std::move(arcs), std::move(sym),
                          std::move(outport), j.value("name", std::string{}));
}

AnyGraph load_graph_json(const json& j) {
  if (j.contains("arcs")) return parse_sym_digraph(j);
  return parse_ugraph(j);
}

AnyGraph load_graph(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("json parse failure: ") + e.what());
  }
  return load_graph_json(j);
}

json to_json(const UGraph& g, const PortNumbering* ports) {
  json j;
  if (!g.name.empty()) j["name"] = g.name;
  j["n"] = g.n;
  json edges = json::array();
  for (const auto& [u, v] : g.edges) edges.push_back({u, v});
  j["edges"] = std::move(edges);
  if (ports) {
    json pj = json::array();
    for (int u = 0; u < g.n; ++u)
      for (const auto& [v, p] : ports->port_of[u]) pj.push_back({u, v, p});
    j["ports"] = std::move(pj);
  }
  return j;
}

json to_json(const SymDigraph& d) {
  json j;
  if (!d.name.empty()) j["name"] = d.name;
  j["n"] = d.n;
  json arr = json::array();
  for (int a = 0; a < d.arc_count(); ++a) {
    json rec = {{"id", a}, {"s", d.arcs[a].s}, {"t", d.arcs[a].t}, {"sym", d.sym[a]}};
    if (d.has_ports()) rec["outport"] = d.outport[a];
    arr.push_back(std::move(rec));
  }
  j["arcs"] = std::move(arr);
  return j;
}

SymDigraph dir(const UGraph& g) {
  std::vector<ArcRec> arcs;
  std::vector<int> sym;
  arcs.reserve(2 * g.edges.size());
  for (const auto& [u, v] : g.edges) {
    int a = static_cast<int>(arcs.size());
    arcs.push_back({u, v});
    arcs.push_back({v, u});
    sym.push_back(a + 1);
    sym.push_back(a);
  }
  return make_sym_digraph(g.n, std::move(arcs), std::move(sym), {},
                          g.name.empty() ? "" : "dir(" + g.name + ")");
}

SymDigraph dir(const UGraph& g, const PortNumbering& ports) {
  SymDigraph d = dir(g);
  d.outport.resize(d.arc_count());
  for (int a = 0; a < d.arc_count(); ++a) d.outport[a] = ports.port(d.arcs[a].s, d.arcs[a].t);
  return make_sym_digraph(d.n, std::move(d.arcs), std::move(d.sym), std::move(d.outport), d.name);
}

PortNumbering assign_ports_canonical(const UGraph& g) {
  PortNumbering pn;
  pn.port_of.resize(g.n);
  for (int u = 0; u < g.n; ++u) {
    int p = 1;
    for (int v : g.adj[u]) pn.port_of[u][v] = p++;
  }
  return pn;
}

PortNumbering assign_ports_random(const UGraph& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PortNumbering pn;
  pn.port_of.resize(g.n);
  for (int u = 0; u < g.n; ++u) {
    std::vector<int> perm(g.degree(u));
    std::iota(perm.begin(), perm.end(), 1);
    // Fisher-Yates with modulo draw: deterministic across platforms.
    for (int i = g.degree(u) - 1; i > 0; --i) {
      int k = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(perm[i], perm[k]);
    }
    int idx = 0;
    for (int v : g.adj[u]) pn.port_of[u][v] = perm[idx++];
  }
  return pn;
}

SymDigraph with_canonical_outports(const SymDigraph& d) {
  std::vector<int> outport(d.arc_count());
  for (int v = 0; v < d.n; ++v) {
    int p = 1;
    for (int a : d.out_arcs[v]) outport[a] = p++;
  }
  SymDigraph copy = d;
  return make_sym_digraph(copy.n, std::move(copy.arcs), std::move(copy.sym), std::move(outport), copy.name);
}

SymDigraph strip_outports(const SymDigraph& d) {
  SymDigraph copy = d;
  return make_sym_digraph(copy.n, std::move(copy.arcs), std::move(copy.sym), {}, copy.name);
}

UGraph path_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return make_ugraph(n, std::move(edges), "p" + std::to_string(n));
}

UGraph cycle_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back(make_edge(i, (i + 1) % n));
  return make_ugraph(n, std::move(edges), "c" + std::to_string(n));
}

UGraph complete_graph(int n) {
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) edges.push_back({u, v});
  return make_ugraph(n, std::move(edges), "k" + std::to_string(n));
}

UGraph star_graph(int leaves) {
  std::vector<Edge> edges;
  for (int v = 1; v <= leaves; ++v) edges.push_back({0, v});
  return make_ugraph(leaves + 1, std::move(edges), "star" + std::to_string(leaves));
}

namespace {

// Bundled loop/edge description for corpus digraphs: an undirected drawing
// where a plain loop stands for ONE self-symmetric arc and a plain edge for a
// sym-pair of two arcs.
struct DrawnGraph {
  int n;
  std::vector<Edge> edges;        // may repeat (multi-edges)
  std::vector<int> selfsym_loops; // one entry per drawn loop, value = vertex
  std::vector<Edge> loop_pairs;   // one entry per sym-paired loop pair, {v,v}
};

SymDigraph from_drawing(const DrawnGraph& dg, std::string name) {
  std::vector<ArcRec> arcs;
  std::vector<int> sym;
  for (int v : dg.selfsym_loops) {
    arcs.push_back({v, v});
    sym.push_back(static_cast<int>(arcs.size()) - 1);
  }
  for (const auto& [v, w] : dg.loop_pairs) {
    (void)w;
    int a = static_cast<int>(arcs.size());
    arcs.push_back({v, v});
    arcs.push_back({v, v});
    sym.push_back(a + 1);
    sym.push_back(a);
  }
  for (const auto& [u, v] : dg.edges) {
    int a = static_cast<int>(arcs.size());
    arcs.push_back({u, v});
    arcs.push_back({v, u});
    sym.push_back(a + 1);
    sym.push_back(a);
  }
  return make_sym_digraph(dg.n, std::move(arcs), std::move(sym), {}, std::move(name));
}

UGraph fig1_base() {
  // 5 vertices a..e as 0..4
  return make_ugraph(5, {{0, 1}, {0, 2}, {2, 3}, {2, 4}, {1, 3}, {3, 4}}, "fig1-base");
}

UGraph fig1_total() {
  // Three sheets of fig1-base's spanning tree {01,02,23,24}; sheet i occupies
  // ids 5i..5i+4. Cotree edges rewired across sheets.
  std::vector<Edge> edges;
  for (int s = 0; s < 3; ++s) {
    int b = 5 * s;
    edges.push_back({b + 0, b + 1});
    edges.push_back({b + 0, b + 2});
    edges.push_back({b + 2, b + 3});
    edges.push_back({b + 2, b + 4});
  }
  // fibre of edge {1,3}: sheets 1<->2, 3 fixed
  edges.push_back({1, 8});
  edges.push_back({6, 3});
  edges.push_back({11, 13});
  // fibre of edge {3,4}: sheet 1 fixed, 2<->3
  edges.push_back({3, 4});
  edges.push_back({8, 14});
  edges.push_back({13, 9});
  return make_ugraph(15, std::move(edges), "fig1-total");
}

UGraph fig4_nonsym() {
  // Hub 0; three arms, each a 5-vertex gadget hanging off the hub. 3-regular,
  // 16 vertices; deleting the hub leaves three odd components, so there is no
  // perfect matching.
  std::vector<Edge> edges = {{0, 1}, {0, 6}, {0, 11}};
  auto gadget = [&edges](int arm, int g1, int g2, int g3, int g4) {
    edges.push_back(make_edge(g1, g2));
    edges.push_back(make_edge(g3, arm));
    edges.push_back(make_edge(g4, arm));
    edges.push_back(make_edge(g3, g1));
    edges.push_back(make_edge(g4, g1));
    edges.push_back(make_edge(g3, g2));
    edges.push_back(make_edge(g4, g2));
  };
  gadget(1, 2, 3, 4, 5);
  gadget(6, 7, 8, 9, 10);
  gadget(11, 12, 13, 14, 15);
  return make_ugraph(16, std::move(edges), "fig4-nonsym");
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"k2",        "p3",         "p4",       "c4",       "c6",       "k4",
          "star3",     "fig1-base",  "fig1-total", "fig4-nonsym",
          "h-g1",      "h-g2",       "h-g3",     "h-g4",     "h-g5",     "h-g6",
          "h-g7",      "loop1",      "loop2-pair", "bouquet3", "bouquet3-allsym"};
}

AnyGraph builtin(const std::string& name) {
  if (name == "k2") return make_ugraph(2, {{0, 1}}, "k2");
  if (name == "p3") return path_graph(3);
  if (name == "p4") return path_graph(4);
  if (name == "c4") return cycle_graph(4);
  if (name == "c6") return cycle_graph(6);
  if (name == "k4") return complete_graph(4);
  if (name == "star3") return star_graph(3);
  if (name == "fig1-base") return fig1_base();
  if (name == "fig1-total") return fig1_total();
  if (name == "fig4-nonsym") return fig4_nonsym();
  if (name == "h-g1")
    return from_drawing({2, {{0, 1}, {0, 1}}, {0}, {}}, "h-g1");
  if (name == "h-g2")
    return from_drawing({4, {{0, 1}, {1, 3}, {2, 3}, {0, 2}}, {0, 3}, {}}, "h-g2");
  if (name == "h-g3")
    return from_drawing({4, {{0, 2}, {0, 1}, {0, 1}, {2, 3}, {2, 3}}, {}, {}}, "h-g3");
  if (name == "h-g4")
    return make_ugraph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 3}, {2, 3}}, "h-g4");
  if (name == "h-g5")
    return make_ugraph(8, {{0, 2}, {4, 6}, {0, 6}, {1, 3}, {3, 5}, {5, 7}, {0, 1}, {2, 5}, {3, 4}, {6, 7}},
                       "h-g5");
  if (name == "h-g6")
    return make_ugraph(8, {{0, 2}, {4, 6}, {1, 3}, {5, 7}, {0, 1}, {2, 3}, {4, 5}, {6, 7}, {0, 4}, {3, 7}},
                       "h-g6");
  if (name == "h-g7")
    return make_ugraph(8, {{0, 2}, {2, 4}, {4, 6}, {1, 3}, {3, 5}, {5, 7}, {0, 1}, {0, 3}, {4, 7}, {6, 7}},
                       "h-g7");
  if (name == "loop1") return from_drawing({1, {}, {0}, {}}, "loop1");
  if (name == "loop2-pair") return from_drawing({1, {}, {}, {{0, 0}}}, "loop2-pair");
  if (name == "bouquet3") return from_drawing({1, {}, {0}, {{0, 0}}}, "bouquet3");
  if (name == "bouquet3-allsym") return from_drawing({1, {}, {0, 0, 0}, {}}, "bouquet3-allsym");

  std::ostringstream os;
  os << "unknown builtin '" << name << "'; valid names:";
  for (const auto& s : builtin_names()) os << " " << s;
  throw Error(os.str());
}

UGraph builtin_ugraph(const std::string& name) {
  auto g = builtin(name);
  if (auto* u = std::get_if<UGraph>(&g)) return *u;
  throw Error("builtin '" + name + "' is a symmetric digraph, not an undirected graph");
}

SymDigraph builtin_digraph(const std::string& name) {
  auto g = builtin(name);
  if (auto* d = std::get_if<SymDigraph>(&g)) return *d;
  throw Error("builtin '" + name + "' is an undirected graph, not a symmetric digraph");
}

SymDigraph builtin_as_digraph(const std::string& name) {
  auto g = builtin(name);
  if (auto* d = std::get_if<SymDigraph>(&g)) return *d;
  return dir(std::get<UGraph>(g));
}

}  // namespace anoncover
