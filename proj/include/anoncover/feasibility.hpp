#pragma once

#include <optional>
#include <string>
#include <vector>

#include "anoncover/covering.hpp"
#include "anoncover/graph.hpp"
#include "anoncover/lifts.hpp"

namespace anoncover {

struct SearchCertificate {
  bool complete = false;
  long nodes = 0;
  std::vector<int> sheet_counts;  // q values the search covered
};

struct AmbiguousLiftPair {
  SymDigraph base;
  int q = 0;
  SymDigraph lift1;
  SymDigraph lift2;
};

/// Decision plus machine-checkable witnesses. Every non-unknown decision
/// carries either covering witnesses or an ambiguous lift pair, except
/// feasible-by-minimality which carries the exhausted-search certificate.
struct FeasibilityVerdict {
  enum class Decision { feasible, infeasible, unknown };
  enum class Reason { minimal, two_sheet_loop, q_gt2_cover, loopless_2_cover, ambiguous_lifts, unique_lifts, budget };
  Decision decision = Decision::unknown;
  Reason reason = Reason::budget;
  std::vector<BaseResult> witness_covers;
  std::optional<AmbiguousLiftPair> witness_lifts;
  SearchCertificate certificate;

  int exit_code() const;
  json to_json() const;
};

std::string to_string(FeasibilityVerdict::Decision d);
std::string to_string(FeasibilityVerdict::Reason r);

/// Feasible iff dir(g) is minimal, or some 2-sheeted base has a loop and no
/// base with more than 2 sheets exists.
FeasibilityVerdict spanning_tree_feasible(const UGraph& g, long budget = 10'000'000);

/// Feasible iff every base (including dir(g) itself) has exactly one simple
/// connected lift of the matching sheet count.
FeasibilityVerdict topology_recognition_feasible(const UGraph& g, long budget = 10'000'000);

struct YkResult {
  enum class Status { holds, fails, unknown };
  Status status = Status::unknown;
  std::optional<UGraph> witness;  // same-size graph with a common finite covering
  long graphs_examined = 0;
  json to_json() const;
};

/// Sufficient condition check: fails iff a non-isomorphic graph of the same
/// size shares g's degree refinement (equivalently, a finite common
/// covering). General search up to n = 12, budget-guarded.
YkResult yk_sufficient_condition(const UGraph& g, long budget = 10'000'000);

struct CounterexampleReport {
  std::vector<std::pair<UGraph, UGraph>> pairs;
  std::vector<UGraph> minimal_graphs;
  std::vector<int> sizes_searched;
  long graphs_examined = 0;
  bool complete = true;
  json to_json() const;
};

/// Pairs of connected d-regular same-size non-isomorphic graphs that are both
/// minimal for the symmetric covering relation; each pair defeats the
/// sufficient condition while recognition stays feasible for both.
CounterexampleReport counterexample_search(int degree, int n_max, long budget = 200'000'000);

struct PairVerification {
  bool same_size = false;
  bool regular = false;
  int degree = -1;
  bool non_isomorphic = false;
  MinimalityResult::Verdict minimal_a = MinimalityResult::Verdict::unknown;
  MinimalityResult::Verdict minimal_b = MinimalityResult::Verdict::unknown;
  std::vector<int> base_sizes_examined;  // divisors of n
  bool is_counterexample() const;
  bool is_unknown() const;
  json to_json() const;
};

/// Full property check for a user-supplied candidate pair.
PairVerification verify_counterexample_pair(const UGraph& a, const UGraph& b, long budget = 200'000'000);

// Exhaustive generation helpers (all results up to isomorphism).
std::vector<UGraph> generate_connected_graphs(int n);  // n <= 6
std::vector<UGraph> generate_connected_regular_graphs(int n, int degree, long& budget);
std::vector<UGraph> generate_connected_graphs_with_degrees(const std::vector<int>& degrees_desc,
                                                           long& budget);

}  // namespace anoncover
