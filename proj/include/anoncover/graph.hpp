#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace anoncover {

using json = nlohmann::json;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Undirected edge, normalized so that first < second.
using Edge = std::pair<int, int>;

inline Edge make_edge(int u, int v) { return u < v ? Edge{u, v} : Edge{v, u}; }

/// Per-vertex bijection from incident edges to [1, deg(u)].
/// port_of[u] maps neighbor v to the port of u on edge {u,v}.
struct PortNumbering {
  std::vector<std::map<int, int>> port_of;

  int port(int u, int v) const { return port_of.at(u).at(v); }
  /// Neighbor of u behind port p.
  int neighbor(int u, int p) const;
  bool empty() const { return port_of.empty(); }
};

/// Simple connected undirected communication graph.
/// Vertex ids are dense integers 0..n-1.
struct UGraph {
  int n = 0;
  std::vector<Edge> edges;  // sorted ascending, u < v in each pair
  std::string name;

  std::vector<std::vector<int>> adj;  // sorted neighbor lists

  int degree(int u) const { return static_cast<int>(adj[u].size()); }
  int m() const { return static_cast<int>(edges.size()); }
  bool has_edge(int u, int v) const;
};

/// Builds and validates (simple, connected, ids in range).
UGraph make_ugraph(int n, std::vector<Edge> edges, std::string name = "");

struct ArcRec {
  int s = 0;
  int t = 0;
};

/// Directed multigraph with loops, endowed with an arc involution `sym`
/// satisfying s(a) = t(sym(a)).  Loops may be their own symmetric.
/// When present, `outport` restricted to the arcs leaving a vertex is a
/// bijection onto [1, deg(v)].
struct SymDigraph {
  int n = 0;
  std::vector<ArcRec> arcs;  // arc id == index
  std::vector<int> sym;
  std::vector<int> outport;  // empty when unported
  std::string name;

  std::vector<std::vector<int>> out_arcs;  // sorted by arc id
  std::vector<std::vector<int>> in_arcs;

  int arc_count() const { return static_cast<int>(arcs.size()); }
  int degree(int v) const { return static_cast<int>(out_arcs[v].size()); }
  bool has_ports() const { return !outport.empty(); }
  bool self_sym(int a) const { return sym[a] == a; }
  bool is_loop(int a) const { return arcs[a].s == arcs[a].t; }
  /// Number of loop arcs at v.
  int loops_at(int v) const;
  /// Number of self-symmetric loop arcs at v.
  int self_sym_loops_at(int v) const;
  bool has_loop() const;
  /// No loops and no multi-arcs.
  bool is_simple() const;
  bool is_connected() const;
  /// Arc leaving v with the given outport; requires ports.
  int arc_at_port(int v, int p) const;
  /// Port through which t(a) receives a message traveling along a.
  int inport(int a) const { return outport.at(static_cast<size_t>(sym[a])); }
};

/// Builds and validates the involution / port invariants.
SymDigraph make_sym_digraph(int n, std::vector<ArcRec> arcs, std::vector<int> sym,
                            std::vector<int> outport = {}, std::string name = "");

struct GraphMetrics {
  int n = 0;
  int m = 0;
  int max_degree = 0;
  int diameter = 0;
};

GraphMetrics metrics(const UGraph& g);
GraphMetrics metrics(const SymDigraph& d);

using AnyGraph = std::variant<UGraph, SymDigraph>;

// JSON formats:
//   UGraph:     {"name": str?, "n": int, "edges": [[u,v],...], "ports": [[u,v,p],...]?}
//   SymDigraph: {"name": str?, "n": int, "arcs": [{"id","s","t","sym","outport"?},...]}
// Arrays are emitted sorted ascending.
AnyGraph load_graph(const std::string& text);
AnyGraph load_graph_json(const json& j);
UGraph parse_ugraph(const json& j);
SymDigraph parse_sym_digraph(const json& j);
std::optional<PortNumbering> parse_ports(const json& j, const UGraph& g);

json to_json(const UGraph& g, const PortNumbering* ports = nullptr);
json to_json(const SymDigraph& d);

/// Replaces each edge {u,v} by two sym-paired arcs (u,v), (v,u).
SymDigraph dir(const UGraph& g);
SymDigraph dir(const UGraph& g, const PortNumbering& ports);

/// Canonical mode: ports in ascending neighbor-id order.
PortNumbering assign_ports_canonical(const UGraph& g);
/// Deterministic per seed.
PortNumbering assign_ports_random(const UGraph& g, std::uint64_t seed);

/// Canonical outports on an unported symmetric digraph (arc-id order per vertex).
SymDigraph with_canonical_outports(const SymDigraph& d);
SymDigraph strip_outports(const SymDigraph& d);

// Built-in graph corpus.  Edge lists live in src/graph.cpp.
std::vector<std::string> builtin_names();
AnyGraph builtin(const std::string& name);
UGraph builtin_ugraph(const std::string& name);
SymDigraph builtin_digraph(const std::string& name);
/// dir() of the named undirected builtin, or the digraph builtin as-is.
SymDigraph builtin_as_digraph(const std::string& name);

// Small constructions used across tests and the CLI.
UGraph path_graph(int n);
UGraph cycle_graph(int n);
UGraph complete_graph(int n);
UGraph star_graph(int leaves);

}  // namespace anoncover
