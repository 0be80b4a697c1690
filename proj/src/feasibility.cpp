#include "anoncover/feasibility.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "anoncover/canonical.hpp"

namespace anoncover {

std::string to_string(FeasibilityVerdict::Decision d) {
  switch (d) {
    case FeasibilityVerdict::Decision::feasible: return "feasible";
    case FeasibilityVerdict::Decision::infeasible: return "infeasible";
    default: return "unknown";
  }
}

std::string to_string(FeasibilityVerdict::Reason r) {
  switch (r) {
    case FeasibilityVerdict::Reason::minimal: return "minimal";
    case FeasibilityVerdict::Reason::two_sheet_loop: return "two-sheet-loop";
    case FeasibilityVerdict::Reason::q_gt2_cover: return "q>2-cover";
    case FeasibilityVerdict::Reason::loopless_2_cover: return "loopless-2-cover";
    case FeasibilityVerdict::Reason::ambiguous_lifts: return "ambiguous-lifts";
    case FeasibilityVerdict::Reason::unique_lifts: return "unique-lifts";
    default: return "budget";
  }
}

int FeasibilityVerdict::exit_code() const {
  switch (decision) {
    case Decision::feasible: return 0;
    case Decision::infeasible: return 1;
    default: return 2;
  }
}

json FeasibilityVerdict::to_json() const {
  json covers = json::array();
  for (const auto& w : witness_covers)
    covers.push_back({{"base", anoncover::to_json(w.base)}, {"map", anoncover::to_json(w.map)}});
  json j = {{"decision", to_string(decision)},
            {"reason", to_string(reason)},
            {"witnesses", {{"covers", std::move(covers)}}},
            {"certificate",
             {{"complete", certificate.complete},
              {"nodes", certificate.nodes},
              {"sheet_counts", certificate.sheet_counts}}}};
  if (witness_lifts) {
    j["witnesses"]["lift_pair"] = {{"base", anoncover::to_json(witness_lifts->base)},
                                   {"q", witness_lifts->q},
                                   {"lift1", anoncover::to_json(witness_lifts->lift1)},
                                   {"lift2", anoncover::to_json(witness_lifts->lift2)}};
  }
  return j;
}

namespace {

std::vector<int> divisor_sheet_counts(int n) {
  std::vector<int> qs;
  for (int q = 2; q <= n; ++q)
    if (n % q == 0) qs.push_back(q);
  return qs;
}

}  // namespace

FeasibilityVerdict spanning_tree_feasible(const UGraph& g, long budget) {
  SymDigraph d = dir(g);
  EnumerateOptions opt;
  opt.budget = budget;
  auto en = enumerate_bases(d, opt);

  FeasibilityVerdict v;
  v.certificate = {en.complete, en.nodes, divisor_sheet_counts(g.n)};

  // a base with more than two sheets settles infeasibility even mid-search
  for (auto& b : en.bases) {
    if (b.map.q > 2) {
      v.decision = FeasibilityVerdict::Decision::infeasible;
      v.reason = FeasibilityVerdict::Reason::q_gt2_cover;
      v.witness_covers.push_back(std::move(b));
      return v;
    }
  }
  if (!en.complete) return v;  // unknown

  if (en.bases.empty()) {
    v.decision = FeasibilityVerdict::Decision::feasible;
    v.reason = FeasibilityVerdict::Reason::minimal;
    return v;
  }
  for (auto& b : en.bases) {
    if (b.base.has_loop()) {
      v.decision = FeasibilityVerdict::Decision::feasible;
      v.reason = FeasibilityVerdict::Reason::two_sheet_loop;
      v.witness_covers.push_back(std::move(b));
      return v;
    }
  }
  v.decision = FeasibilityVerdict::Decision::infeasible;
  v.reason = FeasibilityVerdict::Reason::loopless_2_cover;
  v.witness_covers = std::move(en.bases);
  return v;
}

FeasibilityVerdict topology_recognition_feasible(const UGraph& g, long budget) {
  SymDigraph d = dir(g);
  EnumerateOptions opt;
  opt.budget = budget;
  auto en = enumerate_bases(d, opt);

  FeasibilityVerdict v;
  v.certificate = {en.complete, en.nodes, divisor_sheet_counts(g.n)};

  for (auto& b : en.bases) {
    int q = b.map.q;
    auto lifts = enumerate_lifts(b.base, q, true, true, budget, 2);
    if (lifts.lifts.size() >= 2) {
      v.decision = FeasibilityVerdict::Decision::infeasible;
      v.reason = FeasibilityVerdict::Reason::ambiguous_lifts;
      v.witness_lifts = AmbiguousLiftPair{b.base, q, lifts.lifts[0], lifts.lifts[1]};
      v.witness_covers.push_back(std::move(b));
      return v;
    }
    if (!lifts.complete) return v;  // unknown
  }
  if (!en.complete) return v;  // unknown

  v.decision = FeasibilityVerdict::Decision::feasible;
  v.reason = FeasibilityVerdict::Reason::unique_lifts;
  v.witness_covers = std::move(en.bases);
  return v;
}

// ---------------------------------------------------------------------------
// graph generation

std::vector<UGraph> generate_connected_graphs(int n) {
  if (n < 1 || n > 6) throw Error("generate_connected_graphs supports n <= 6");
  std::vector<Edge> all_edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) all_edges.push_back({u, v});
  std::vector<UGraph> out;
  std::set<std::string> seen;
  const int total = static_cast<int>(all_edges.size());
  for (long mask = 0; mask < (1L << total); ++mask) {
    std::vector<Edge> edges;
    for (int i = 0; i < total; ++i)
      if (mask & (1L << i)) edges.push_back(all_edges[i]);
    UGraph g;
    try {
      g = make_ugraph(n, std::move(edges));
    } catch (const Error&) {
      continue;  // disconnected
    }
    if (seen.insert(canonical_key(dir(g))).second) out.push_back(std::move(g));
  }
  return out;
}

namespace {

// Vertex-by-vertex completion. For vertex v all edges toward smaller ids are
// already fixed, so only neighbor sets within {v+1..n-1} are chosen.
// mention_rule: fresh vertices must be introduced in id order (valid for
// uniform degrees; prunes relabelings).
void generate_with_degrees(int n, const std::vector<int>& target, bool mention_rule, long& budget,
                           const std::function<void(const std::vector<Edge>&)>& emit) {
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  std::vector<int> deg(n, 0);
  std::vector<Edge> edges;

  std::function<void(int, int)> complete_vertex = [&](int v, int mentioned) {
    if (budget-- < 0) return;
    if (v == n) {
      emit(edges);
      return;
    }
    int need = target[v] - deg[v];
    if (need < 0) return;
    if (need == 0) {
      complete_vertex(v + 1, std::max(mentioned, v + 1));
      return;
    }
    // choose `need` neighbors among {from..n-1} with spare capacity
    std::vector<int> chosen;
    std::function<void(int, int)> pick = [&](int from, int high) {
      if (budget-- < 0) return;
      if (static_cast<int>(chosen.size()) == need) {
        complete_vertex(v + 1, std::max(high, v + 1));
        return;
      }
      int remaining = need - static_cast<int>(chosen.size());
      for (int w = from; w < n; ++w) {
        if (n - w < remaining) break;
        if (deg[w] >= target[w]) continue;
        // fresh ids may only be introduced in order
        if (mention_rule && w > high && w != high + 1) break;
        adj[v][w] = adj[w][v] = true;
        deg[v]++;
        deg[w]++;
        edges.push_back({v, w});
        chosen.push_back(w);
        pick(w + 1, std::max(high, w));
        chosen.pop_back();
        edges.pop_back();
        deg[v]--;
        deg[w]--;
        adj[v][w] = adj[w][v] = false;
      }
    };
    pick(v + 1, mentioned);
  };

  complete_vertex(0, 0);
}

std::vector<UGraph> collect_generated(int n, const std::vector<int>& target, bool mention_rule,
                                      long& budget) {
  std::vector<UGraph> out;
  std::set<std::string> seen;
  generate_with_degrees(n, target, mention_rule, budget, [&](const std::vector<Edge>& edges) {
    UGraph g;
    try {
      g = make_ugraph(n, edges);
    } catch (const Error&) {
      return;  // disconnected
    }
    if (seen.insert(canonical_key(dir(g))).second) out.push_back(std::move(g));
  });
  return out;
}

}  // namespace

std::vector<UGraph> generate_connected_regular_graphs(int n, int degree, long& budget) {
  if (degree >= n || (n * degree) % 2 != 0) return {};
  return collect_generated(n, std::vector<int>(n, degree), true, budget);
}

std::vector<UGraph> generate_connected_graphs_with_degrees(const std::vector<int>& degrees_desc,
                                                           long& budget) {
  std::vector<int> target = degrees_desc;
  std::sort(target.begin(), target.end(), std::greater<int>());
  return collect_generated(static_cast<int>(target.size()), target, false, budget);
}

// ---------------------------------------------------------------------------

json YkResult::to_json() const {
  json j = {{"status", status == Status::holds ? "holds" : (status == Status::fails ? "fails" : "unknown")},
            {"graphs_examined", graphs_examined}};
  if (witness) j["witness"] = anoncover::to_json(*witness);
  return j;
}

YkResult yk_sufficient_condition(const UGraph& g, long budget) {
  YkResult r;
  if (g.n > 12) {
    r.status = YkResult::Status::unknown;
    return r;
  }
  std::vector<int> degrees;
  for (int v = 0; v < g.n; ++v) degrees.push_back(g.degree(v));
  std::sort(degrees.begin(), degrees.end(), std::greater<int>());

  long gen_budget = budget;
  auto candidates = generate_connected_graphs_with_degrees(degrees, gen_budget);
  r.graphs_examined = static_cast<long>(candidates.size());
  if (gen_budget < 0) {
    r.status = YkResult::Status::unknown;
    return r;
  }

  std::string sig = degree_refinement_signature(g);
  for (auto& h : candidates) {
    if (degree_refinement_signature(h) != sig) continue;
    if (is_isomorphic(g, h)) continue;
    r.status = YkResult::Status::fails;
    r.witness = std::move(h);
    return r;
  }
  r.status = YkResult::Status::holds;
  return r;
}

json CounterexampleReport::to_json() const {
  json arr = json::array();
  for (const auto& [a, b] : pairs)
    arr.push_back({{"a", anoncover::to_json(a)}, {"b", anoncover::to_json(b)}});
  json minimal = json::array();
  for (const auto& g : minimal_graphs) minimal.push_back(anoncover::to_json(g));
  return json{{"pairs", std::move(arr)},
              {"minimal_graphs", std::move(minimal)},
              {"sizes_searched", sizes_searched},
              {"graphs_examined", graphs_examined},
              {"complete", complete}};
}

CounterexampleReport counterexample_search(int degree, int n_max, long budget) {
  if (degree < 3) throw Error("counterexample search requires degree >= 3");
  CounterexampleReport report;
  for (int n = degree + 1; n <= n_max; ++n) {
    if ((n * degree) % 2 != 0) continue;
    long gen_budget = budget;
    auto graphs = generate_connected_regular_graphs(n, degree, gen_budget);
    if (gen_budget < 0) {
      report.complete = false;
      break;
    }
    report.sizes_searched.push_back(n);
    report.graphs_examined += static_cast<long>(graphs.size());
    std::vector<UGraph> minimal_here;
    for (auto& g : graphs) {
      auto res = is_minimal(dir(g), budget);
      if (res.verdict == MinimalityResult::Verdict::minimal) {
        minimal_here.push_back(g);
      } else if (res.verdict == MinimalityResult::Verdict::unknown) {
        report.complete = false;
      }
    }
    for (size_t i = 0; i < minimal_here.size(); ++i)
      for (size_t j = i + 1; j < minimal_here.size(); ++j)
        report.pairs.push_back({minimal_here[i], minimal_here[j]});
    for (auto& g : minimal_here) report.minimal_graphs.push_back(std::move(g));
  }
  return report;
}

bool PairVerification::is_counterexample() const {
  return same_size && regular && degree >= 3 && non_isomorphic &&
         minimal_a == MinimalityResult::Verdict::minimal &&
         minimal_b == MinimalityResult::Verdict::minimal;
}

bool PairVerification::is_unknown() const {
  return same_size && regular && degree >= 3 && non_isomorphic &&
         (minimal_a == MinimalityResult::Verdict::unknown ||
          minimal_b == MinimalityResult::Verdict::unknown) &&
         minimal_a != MinimalityResult::Verdict::not_minimal &&
         minimal_b != MinimalityResult::Verdict::not_minimal;
}

json PairVerification::to_json() const {
  auto verdict = [](MinimalityResult::Verdict v) {
    switch (v) {
      case MinimalityResult::Verdict::minimal: return "minimal";
      case MinimalityResult::Verdict::not_minimal: return "not-minimal";
      default: return "unknown";
    }
  };
  return json{{"same_size", same_size},
              {"regular", regular},
              {"degree", degree},
              {"non_isomorphic", non_isomorphic},
              {"minimal_a", verdict(minimal_a)},
              {"minimal_b", verdict(minimal_b)},
              {"base_sizes_examined", base_sizes_examined},
              {"is_counterexample", is_counterexample()}};
}

PairVerification verify_counterexample_pair(const UGraph& a, const UGraph& b, long budget) {
  PairVerification pv;
  pv.same_size = a.n == b.n;
  int deg = a.n > 0 ? a.degree(0) : 0;
  pv.regular = true;
  for (int v = 0; v < a.n; ++v) pv.regular = pv.regular && a.degree(v) == deg;
  for (int v = 0; v < b.n; ++v) pv.regular = pv.regular && b.degree(v) == deg;
  pv.degree = pv.regular ? deg : -1;
  if (!pv.same_size || !pv.regular) return pv;
  pv.non_isomorphic = !is_isomorphic(a, b);
  for (int q = 2; q <= a.n; ++q)
    if (a.n % q == 0) pv.base_sizes_examined.push_back(a.n / q);
  if (!pv.non_isomorphic) return pv;
  pv.minimal_a = is_minimal(dir(a), budget).verdict;
  pv.minimal_b = is_minimal(dir(b), budget).verdict;
  return pv;
}

}  // namespace anoncover
