#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "anoncover/graph.hpp"

namespace anoncover {

/// Vertex and arc maps witnessing a covering total -> base, with sheet count.
struct CoveringMap {
  std::vector<int> vmap;  // size |V(total)|
  std::vector<int> amap;  // size |A(total)|
  int q = 0;
};

json to_json(const CoveringMap& c);
CoveringMap covering_map_from_json(const json& j);

struct MorphismFailure {
  std::string flag;    // which property failed
  int vertex = -1;
  int arc = -1;
  std::string detail;
};

struct MorphismReport {
  bool is_homomorphism = false;
  bool is_fibration = false;
  bool is_opfibration = false;
  bool is_covering = false;
  bool is_symmetric_covering = false;
  bool is_port_preserving = false;
  std::vector<MorphismFailure> failures;
  json to_json() const;
};

/// Each flag computed independently; fibration = per-vertex bijection between
/// incoming arcs, opfibration = outgoing, symmetric additionally requires
/// amap(sym(a)) = sym(amap(a)), port-preserving compares outports when both
/// graphs carry them.
MorphismReport classify_morphism(const SymDigraph& total, const SymDigraph& base,
                                 const std::vector<int>& vmap, const std::vector<int>& amap);

/// Sheet count; verifies all vertex fibres have equal cardinality and that
/// q * |V(base)| = |V(total)|. Throws on violation.
int sheets_of(const SymDigraph& total, const SymDigraph& base, const CoveringMap& c);

/// Convenience: full check that (vmap, amap) is a symmetric covering.
bool check_symmetric_covering(const SymDigraph& total, const SymDigraph& base, const CoveringMap& c);

/// Partition of a graph's vertices into equal-size blocks.
struct FibrePartition {
  std::vector<std::vector<int>> blocks;  // each sorted; block size = q
  int block_size() const { return blocks.empty() ? 0 : static_cast<int>(blocks[0].size()); }
};

FibrePartition partition_from_block_ids(const std::vector<int>& block_of, int nblocks);
/// Every vertex of a block has the same number of arcs into every block.
bool is_equitable(const SymDigraph& d, const FibrePartition& p);

struct BaseResult {
  SymDigraph base;
  CoveringMap map;
};

/// Quotient construction over an equitable equal-block partition of a simple
/// symmetric digraph (Dir of a simple graph). Between distinct blocks the
/// regular bipartite cross graph is decomposed into perfect matchings, each
/// becoming a sym-paired base arc fibre; inside a block, 2-factors become
/// oriented loop pairs and perfect matchings become self-symmetric loops.
/// Exists iff every block with odd internal degree has a perfect matching in
/// its internal graph. Returns nullopt when no covering exists over p.
/// `self_sym_loops`, when given, prescribes the number of self-symmetric
/// loops per block (must match parity and be achievable as disjoint perfect
/// matchings); by default the minimum (0 or 1) is used per block.
std::optional<BaseResult> partition_to_base(const SymDigraph& d, const FibrePartition& p,
                                            const std::vector<int>* self_sym_loops = nullptr);

/// Independent validation oracle: exhaustively assigns each arc to a base-arc
/// fibre by backtracking under the covering and sym constraints. No matching
/// theory involved. Size guard |V(d)| <= 12 (lifted internally for the
/// general-case paths that reuse it on larger inputs is NOT allowed; callers
/// beyond desk scale get an error).
std::optional<BaseResult> brute_force_base_oracle(const SymDigraph& d, const FibrePartition& p);
/// Oracle with a prescribed per-block self-symmetric loop count.
std::optional<BaseResult> brute_force_base_oracle(const SymDigraph& d, const FibrePartition& p,
                                                  const std::vector<int>& self_sym_loops,
                                                  int size_guard = 12);

struct EnumerateOptions {
  long budget = 10'000'000;  // search nodes
  int max_q = 0;             // 0 = no cap
  bool existence_only = false;
};

struct BaseEnumeration {
  std::vector<BaseResult> bases;  // deduplicated up to isomorphism
  bool complete = true;
  long nodes = 0;
};

/// All proper bases (q >= 2) of a connected symmetric digraph, including all
/// inequivalent self-symmetric-loop structures over each partition.
BaseEnumeration enumerate_bases(const SymDigraph& d, const EnumerateOptions& opt = {});

/// Runs `fn` on every equitable partition of d into blocks of size q;
/// fn returning false stops early. Returns false if the budget ran out.
bool for_each_equitable_partition(const SymDigraph& d, int q, long& budget,
                                  const std::function<bool(const FibrePartition&)>& fn);

struct MinimalityResult {
  enum class Verdict { minimal, not_minimal, unknown };
  Verdict verdict = Verdict::unknown;
  std::optional<BaseResult> witness;  // present when not minimal
};

/// True iff no proper symmetric covering exists (existence-only search with
/// early exit). Tri-state on budget exhaustion.
MinimalityResult is_minimal(const SymDigraph& d, long budget = 10'000'000);

/// Port-preserving variant on a ported digraph: over a fixed partition the
/// ported base is forced, so each partition needs only a consistency check.
std::optional<BaseResult> ported_quotient(const SymDigraph& d, const FibrePartition& p);
MinimalityResult ported_is_minimal(const SymDigraph& d, long budget = 10'000'000);

/// Pulls base outports back along a symmetric covering dir(g) -> base,
/// yielding ports on g that make the ported covering port-preserving.
PortNumbering lift_ports(const UGraph& g, const SymDigraph& base, const CoveringMap& cover);

/// Searches for an arc map making (vmap, amap) a covering of `base` where
/// vmap is forced (base must have one vertex per needed class); used for
/// bouquet targets. require_symmetric additionally enforces the involution
/// constraint. Exhaustive within budget; nullopt when none exists.
std::optional<CoveringMap> search_covering_map(const SymDigraph& total, const SymDigraph& base,
                                               const std::vector<int>& vmap, bool require_symmetric,
                                               long budget = 50'000'000);

}  // namespace anoncover
