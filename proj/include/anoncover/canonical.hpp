#pragma once

#include <optional>
#include <string>
#include <vector>

#include "anoncover/graph.hpp"

namespace anoncover {

// Exact canonical form for symmetric digraphs, n <= 64. Identity of a
// sym-digraph is the arc multiplicity matrix plus the per-vertex count of
// self-symmetric loops (parallel arcs and the pairing of sym within a bundle
// are interchangeable). Obtained by iterated neighborhood refinement followed
// by backtracking over the refined classes.
struct CanonicalForm {
  std::vector<int> order;  // order[new label] = old vertex
  std::string key;         // canonical byte string; equal keys <=> isomorphic
};

CanonicalForm canonical_form(const SymDigraph& d);
std::string canonical_key(const SymDigraph& d);

/// Vertex map a -> b preserving multiplicities, loops and self-symmetric
/// loop counts, or nullopt. Size guard n <= 64.
std::optional<std::vector<int>> find_isomorphism(const SymDigraph& a, const SymDigraph& b);
bool is_isomorphic(const SymDigraph& a, const SymDigraph& b);
bool is_isomorphic(const UGraph& a, const UGraph& b);

/// Iterated degree-partition signature (stable equitable refinement with a
/// canonical class order). Two connected graphs admit a common finite
/// covering iff their signatures are equal.
std::string degree_refinement_signature(const UGraph& g);

}  // namespace anoncover
