// Acceptance suite: one pass/fail line per criterion, with wall time.
// Exit code 0 iff every criterion passes within its stated time bound.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "anoncover/canonical.hpp"
#include "anoncover/covering.hpp"
#include "anoncover/feasibility.hpp"
#include "anoncover/graph.hpp"
#include "anoncover/lifts.hpp"
#include "anoncover/protocols.hpp"
#include "anoncover/sim.hpp"
#include "helpers.hpp"

using namespace anoncover;
using anoncover::testing::random_connected_graph;
using anoncover::testing::random_tree;
using anoncover::testing::with_random_outports;

namespace {

struct Checker {
  int failures = 0;
  std::ostringstream log;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      ++failures;
      log << "    FAILED: " << what << "\n";
    }
  }
};

int g_exit = 0;

void criterion(int number, const std::string& title, double limit_seconds,
               const std::function<void(Checker&)>& body) {
  Checker c;
  auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.require(false, std::string("exception: ") + e.what());
  }
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool in_time = limit_seconds <= 0 || seconds <= limit_seconds;
  if (!in_time) c.require(false, "time limit exceeded");
  bool pass = c.failures == 0;
  std::printf("[%s] criterion %2d: %s (%.2fs%s)\n", pass ? "PASS" : "FAIL", number, title.c_str(),
              seconds, limit_seconds > 0 ? ("/" + std::to_string((int)limit_seconds) + "s").c_str() : "");
  if (!pass) {
    std::fputs(c.log.str().c_str(), stdout);
    g_exit = 1;
  }
  std::fflush(stdout);
}

SimConfig make_cfg(const UGraph& g, const PortNumbering& ports, const std::string& protocol,
                   std::uint64_t seed, SchedulerKind sched) {
  SimConfig cfg;
  cfg.net = dir(g, ports);
  cfg.protocol = protocol;
  cfg.seed = seed;
  cfg.scheduler = sched;
  cfg.n_known = g.n;
  return cfg;
}

Mailbox mailbox_of(const json& state) {
  const json& mj = state.contains("maz") ? state.at("maz") : state;
  return maz_state_from_json(mj).mailbox;
}

std::vector<int> numbers_of(const std::vector<json>& states) {
  std::vector<int> numbers;
  for (const auto& j : states) {
    const json& mj = j.contains("maz") ? j.at("maz") : j;
    numbers.push_back(mj.at("number").get<int>());
  }
  return numbers;
}

bool valid_spanning_tree(const UGraph& g, const std::vector<Edge>& edges) {
  if (static_cast<int>(edges.size()) != g.n - 1) return false;
  std::vector<int> parent(g.n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const auto& [u, v] : edges) {
    if (!g.has_edge(u, v)) return false;
    int ru = find(u), rv = find(v);
    if (ru == rv) return false;
    parent[ru] = rv;
  }
  for (int v = 1; v < g.n; ++v)
    if (find(v) != find(0)) return false;
  return true;
}

// oracle-side base key set over all equitable partitions and loop structures
std::set<std::string> oracle_base_keys(const SymDigraph& d) {
  std::set<std::string> keys;
  for (int q = 2; q <= d.n; ++q) {
    if (d.n % q != 0) continue;
    long budget = 50'000'000;
    for_each_equitable_partition(d, q, budget, [&](const FibrePartition& p) {
      auto block_of = std::vector<int>(d.n, -1);
      for (size_t b = 0; b < p.blocks.size(); ++b)
        for (int v : p.blocks[b]) block_of[v] = static_cast<int>(b);
      // per-block loop count candidates
      std::vector<std::vector<int>> cands;
      for (const auto& block : p.blocks) {
        int c = 0;
        for (int a : d.out_arcs[block[0]])
          if (block_of[d.arcs[a].t] == block_of[block[0]]) ++c;
        std::vector<int> opts;
        for (int ell = c % 2; ell <= c; ell += 2) opts.push_back(ell);
        cands.push_back(opts);
      }
      std::vector<size_t> pick(cands.size(), 0);
      for (;;) {
        std::vector<int> lvec(cands.size());
        for (size_t b = 0; b < cands.size(); ++b) lvec[b] = cands[b][pick[b]];
        if (auto res = brute_force_base_oracle(d, p, lvec, 16)) keys.insert(canonical_key(res->base));
        size_t b = 0;
        while (b < pick.size() && ++pick[b] == cands[b].size()) pick[b++] = 0;
        if (b == pick.size()) break;
      }
      return true;
    });
  }
  return keys;
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");

  criterion(1, "drawn 3-sheeted covering reproduced by the lift construction", 1.0, [](Checker& c) {
    auto base = dir(builtin_ugraph("fig1-base"));
    PermAssignment pa;
    pa.q = 3;
    pa.tree_arcs = {0, 2, 6, 8};  // edges {0,1},{0,2},{2,3},{2,4}
    pa.sigma[4] = {1, 0, 2};      // lower cotree pair {1,3}
    pa.sigma[10] = {0, 2, 1};     // higher cotree pair {3,4}
    auto lift = reidemeister_lift(base, pa);
    c.require(lift.total.n == 15, "lift has 15 vertices");
    c.require(is_isomorphic(lift.total, dir(builtin_ugraph("fig1-total"))),
              "lift isomorphic to the drawn total graph");
    auto report = classify_morphism(lift.total, base, lift.map.vmap, lift.map.amap);
    c.require(report.is_symmetric_covering, "map classifies as a symmetric covering");
    c.require(sheets_of(lift.total, base, lift.map) == 3, "three sheets");
  });

  criterion(2, "non-symmetric covering obstruction on the 16-vertex graph", 10.0, [](Checker& c) {
    auto total = dir(builtin_ugraph("fig4-nonsym"));
    std::vector<int> vmap(total.n, 0);
    bool covering_found = false;
    for (auto base_name : {"bouquet3", "bouquet3-allsym"}) {
      auto base = builtin_digraph(base_name);
      auto plain = search_covering_map(total, base, vmap, false);
      if (plain) {
        auto report = classify_morphism(total, base, plain->vmap, plain->amap);
        covering_found = covering_found || report.is_covering;
      }
      c.require(!search_covering_map(total, base, vmap, true).has_value(),
                std::string("no symmetric arc map onto ") + base_name);
    }
    c.require(covering_found, "a plain covering map exists");

    FibrePartition p;
    p.blocks.push_back({});
    for (int v = 0; v < 16; ++v) p.blocks[0].push_back(v);
    c.require(!partition_to_base(total, p).has_value(), "single-block quotient rejected");

    // the no-perfect-matching witness: deleting the hub leaves 3 odd components
    auto g = builtin_ugraph("fig4-nonsym");
    std::vector<int> comp(g.n, -1);
    int ncomp = 0;
    for (int v = 1; v < g.n; ++v) {
      if (comp[v] != -1) continue;
      std::vector<int> stack{v};
      comp[v] = ncomp;
      int size = 0;
      while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        ++size;
        for (int w : g.adj[u])
          if (w != 0 && comp[w] == -1) {
            comp[w] = ncomp;
            stack.push_back(w);
          }
      }
      c.require(size % 2 == 1, "hub-deleted component has odd size");
      ++ncomp;
    }
    c.require(ncomp == 3, "hub deletion leaves three components");
  });

  criterion(3, "base enumeration matches the covering hierarchy exactly", 60.0, [](Checker& c) {
    struct Row {
      const char* total;
      std::vector<const char*> arrows;  // bases implied by the hierarchy (with compositions)
    };
    const Row rows[] = {
        {"h-g2", {"h-g1"}},
        {"h-g3", {"h-g1"}},
        {"h-g4", {"h-g1"}},
        {"h-g5", {"h-g2", "h-g1"}},
        {"h-g6", {"h-g2", "h-g3", "h-g4", "h-g1"}},
        {"h-g7", {"h-g4", "h-g1"}},
    };
    for (const auto& row : rows) {
      auto d = builtin_as_digraph(row.total);
      auto en = enumerate_bases(d);
      c.require(en.complete, std::string(row.total) + ": enumeration complete");
      std::set<std::string> keys;
      for (const auto& b : en.bases) {
        keys.insert(canonical_key(b.base));
        c.require(check_symmetric_covering(d, b.base, b.map),
                  std::string(row.total) + ": witness verifies");
      }
      for (const char* want : row.arrows)
        c.require(keys.count(canonical_key(builtin_as_digraph(want))) == 1,
                  std::string(row.total) + " has base " + want);
      c.require(keys == oracle_base_keys(d), std::string(row.total) + ": exact against the oracle");
    }
  });

  criterion(4, "unique-lift facts at two and four sheets", 60.0, [](Checker& c) {
    auto r1 = unique_simple_connected_lift(builtin_digraph("h-g1"), 2);
    c.require(r1.status == UniqueLiftResult::Status::unique, "2-lift of h-g1 unique");
    c.require(r1.lift && is_isomorphic(*r1.lift, dir(builtin_ugraph("h-g4"))), "...and is h-g4");

    auto r3 = unique_simple_connected_lift(builtin_digraph("h-g3"), 2);
    c.require(r3.status == UniqueLiftResult::Status::unique, "2-lift of h-g3 unique");
    c.require(r3.lift && is_isomorphic(*r3.lift, dir(builtin_ugraph("h-g6"))), "...and is h-g6");

    auto en = enumerate_lifts(builtin_digraph("h-g1"), 4, true, true);
    c.require(en.complete, "4-lift enumeration complete");
    c.require(en.lifts.size() >= 3, "at least three simple connected 4-lift classes");
    for (auto name : {"h-g5", "h-g6", "h-g7"}) {
      bool found = false;
      for (const auto& g : en.lifts) found = found || is_isomorphic(g, dir(builtin_ugraph(name)));
      c.require(found, std::string("4-lifts include ") + name);
    }
  });

  criterion(5, "feasibility verdicts with re-verifying witnesses", 120.0, [](Checker& c) {
    auto recheck = [&c](const UGraph& g, const FeasibilityVerdict& v, const std::string& tag) {
      auto d = dir(g);
      for (const auto& w : v.witness_covers)
        c.require(check_symmetric_covering(d, w.base, w.map), tag + ": covering witness verifies");
      if (v.witness_lifts) {
        const auto& pair = *v.witness_lifts;
        c.require(pair.lift1.is_simple() && pair.lift2.is_simple() && pair.lift1.is_connected() &&
                      pair.lift2.is_connected(),
                  tag + ": lift pair simple and connected");
        c.require(!is_isomorphic(pair.lift1, pair.lift2), tag + ": lift pair non-isomorphic");
        auto en = enumerate_lifts(pair.base, pair.q, true, true);
        std::set<std::string> keys;
        for (const auto& lift : en.lifts) keys.insert(canonical_key(lift));
        c.require(keys.count(canonical_key(pair.lift1)) == 1 &&
                      keys.count(canonical_key(pair.lift2)) == 1,
                  tag + ": lift pair reproduced by enumeration");
      }
    };

    for (auto name : {"k2", "p3", "h-g4"}) {
      auto g = builtin_ugraph(name);
      auto v = spanning_tree_feasible(g);
      c.require(v.decision == FeasibilityVerdict::Decision::feasible,
                std::string("spanning tree feasible on ") + name);
      recheck(g, v, name);
    }
    for (auto name : {"c4", "c6", "k4", "h-g5", "h-g6", "h-g7"}) {
      auto g = builtin_ugraph(name);
      auto v = spanning_tree_feasible(g);
      c.require(v.decision == FeasibilityVerdict::Decision::infeasible,
                std::string("spanning tree infeasible on ") + name);
      c.require(!v.witness_covers.empty() && v.witness_covers.front().map.q > 2,
                std::string(name) + ": witness has more than two sheets");
      recheck(g, v, name);
    }
    for (auto name : {"p3", "h-g4"}) {
      auto g = builtin_ugraph(name);
      auto v = topology_recognition_feasible(g);
      c.require(v.decision == FeasibilityVerdict::Decision::feasible,
                std::string("topology feasible on ") + name);
      recheck(g, v, name);
    }
    for (auto name : {"h-g5", "h-g6", "h-g7"}) {
      auto g = builtin_ugraph(name);
      auto v = topology_recognition_feasible(g);
      c.require(v.decision == FeasibilityVerdict::Decision::infeasible,
                std::string("topology infeasible on ") + name);
      c.require(v.witness_lifts.has_value(), std::string(name) + ": ambiguous lift pair attached");
      recheck(g, v, name);
    }
  });

  criterion(6, "quotient construction equals the oracle on every small graph", 600.0, [](Checker& c) {
    long disagreements = 0, partitions = 0, graphs = 0;
    for (int n = 1; n <= 6; ++n) {
      for (const auto& g : generate_connected_graphs(n)) {
        ++graphs;
        auto d = dir(g);
        for (int q = 2; q <= n; ++q) {
          if (n % q != 0) continue;
          long budget = 10'000'000;
          for_each_equitable_partition(d, q, budget, [&](const FibrePartition& p) {
            ++partitions;
            bool fast = partition_to_base(d, p).has_value();
            bool slow = brute_force_base_oracle(d, p).has_value();
            if (fast != slow) ++disagreements;
            return true;
          });
        }
      }
    }
    c.require(graphs == 143, "all 143 connected graphs up to six vertices generated");
    c.require(partitions >= 100, "equitable partition space covered");
    c.require(disagreements == 0, "zero disagreements");
  });

  criterion(7, "protocol property suite over 200+ seeded runs", 600.0, [](Checker& c) {
    std::mt19937_64 rng(20260809);
    long maz_runs = 0, election_runs = 0, tree_runs = 0, topo_runs = 0;

    // (a),(b),(c): enumeration runs over corpus + random graphs
    std::vector<UGraph> graphs;
    for (auto name : {"k2", "p3", "p4", "c4", "c6", "k4", "star3", "h-g4", "h-g5", "h-g6", "h-g7",
                      "fig1-base"})
      graphs.push_back(builtin_ugraph(name));
    for (int i = 0; i < 12; ++i) graphs.push_back(random_tree(2 + (int)(rng() % 9), rng));
    for (int i = 0; i < 12; ++i) graphs.push_back(random_connected_graph(3 + (int)(rng() % 8), rng));

    for (const auto& g : graphs) {
      bool minimal = is_minimal(dir(g)).verdict == MinimalityResult::Verdict::minimal;
      for (int rep = 0; rep < 3; ++rep) {
        auto ports = assign_ports_random(g, rng());
        auto cfg = make_cfg(g, ports, "mazurkiewicz", rng(),
                            rep == 2 ? SchedulerKind::lockstep : SchedulerKind::random);
        auto r = run(cfg);
        ++maz_runs;
        c.require(!r.hit_step_cap, "enumeration quiesces");
        auto check = check_maz_run(cfg.net, r.final_states);
        c.require(check.ok, "quiescence properties: " + check.violation);
        auto quotient = build_quotient_from_mailbox(mailbox_of(r.final_states[0]));
        auto cover = quotient_cover_map(cfg.net, numbers_of(r.final_states), quotient);
        auto report = classify_morphism(cfg.net, quotient, cover.vmap, cover.amap);
        c.require(report.is_symmetric_covering && report.is_port_preserving,
                  "quotient symmetrically covered by the network");
        if (minimal) c.require(check.k == g.n, "minimal graph enumerated fully");
      }
    }

    // (d) election on random trees
    for (int i = 0; i < 40; ++i) {
      auto g = random_tree(2 + (int)(rng() % 9), rng);
      auto cfg = make_cfg(g, assign_ports_random(g, rng()), "election-tree", rng(),
                          SchedulerKind::random);
      auto r = run(cfg);
      ++election_runs;
      auto s = protocol_summary("election-tree", cfg.net, r.final_states);
      auto leaders = s.at("leaders").get<std::vector<int>>();
      auto coleaders = s.at("coleaders").get<std::vector<int>>();
      bool single_leader = leaders.size() == 1 && coleaders.empty();
      bool single_pair = leaders.empty() && coleaders.size() == 2 &&
                         g.has_edge(coleaders.size() == 2 ? coleaders[0] : 0,
                                    coleaders.size() == 2 ? coleaders[1] : 0);
      c.require(single_leader || single_pair, "exactly one leader xor one adjacent pair");
    }

    // (e) token flood and the composite on feasible inputs
    for (int i = 0; i < 15; ++i) {
      auto g = random_connected_graph(3 + (int)(rng() % 8), rng);
      auto cfg = make_cfg(g, assign_ports_random(g, rng()), "tarry", rng(), SchedulerKind::random);
      cfg.params = json{{"leader", (int)(rng() % g.n)}};
      auto r = run(cfg);
      ++tree_runs;
      c.require(valid_spanning_tree(g, tree_edges_from_states(cfg.net, r.final_states)),
                "token flood spans");
    }
    for (auto name : {"k2", "p3", "p4", "star3", "h-g4", "fig1-base"}) {
      auto g = builtin_ugraph(name);
      for (int rep = 0; rep < 4; ++rep) {
        auto cfg = make_cfg(g, assign_ports_random(g, rng()), "spanning-tree", rng(),
                            rep == 3 ? SchedulerKind::lockstep : SchedulerKind::random);
        auto r = run(cfg);
        ++tree_runs;
        c.require(valid_spanning_tree(g, tree_edges_from_states(cfg.net, r.final_states)),
                  std::string("composite spans ") + name);
      }
    }

    // (f) topology recognition on feasible inputs
    for (auto name : {"p3", "star3", "h-g4", "fig1-base"}) {
      auto g = builtin_ugraph(name);
      for (int rep = 0; rep < 5; ++rep) {
        auto cfg = make_cfg(g, assign_ports_random(g, rng()), "topology", rng(),
                            rep == 4 ? SchedulerKind::lockstep : SchedulerKind::random);
        auto r = run(cfg);
        ++topo_runs;
        for (const auto& st : r.final_states) {
          c.require(!st.contains("error"), std::string("recognition clean on ") + name);
          if (!st.contains("error"))
            c.require(is_isomorphic(parse_sym_digraph(st.at("output")), dir(g)),
                      std::string("recognized graph matches ") + name);
        }
      }
    }

    c.require(maz_runs + election_runs + tree_runs + topo_runs >= 200, "at least 200 runs");
  });

  criterion(8, "fibre-uniform lifted co-executions", 60.0, [](Checker& c) {
    struct Pair {
      const char* total;
      const char* base_iso;
    };
    const Pair pairs[] = {{"h-g4", "h-g1"}, {"c4", "loop2-pair"}, {"h-g6", "h-g3"}};
    for (const auto& pc : pairs) {
      auto g = builtin_ugraph(pc.total);
      auto wanted = builtin_digraph(pc.base_iso);
      auto en = enumerate_bases(dir(g));
      const BaseResult* found = nullptr;
      for (const auto& b : en.bases)
        if (is_isomorphic(b.base, wanted)) found = &b;
      c.require(found != nullptr, std::string(pc.total) + " has a base like " + pc.base_iso);
      if (!found) continue;

      std::optional<SymDigraph> base_ported;
      for (std::uint64_t seed = 0; seed < 64 && !base_ported; ++seed) {
        auto candidate = seed == 0 ? with_canonical_outports(found->base)
                                   : with_random_outports(found->base, seed);
        if (ported_is_minimal(candidate).verdict == MinimalityResult::Verdict::minimal)
          base_ported = candidate;
      }
      c.require(base_ported.has_value(), "rigid ports found for the base");
      if (!base_ported) continue;

      SimConfig total_cfg;
      total_cfg.net = dir(g, lift_ports(g, *base_ported, found->map));
      total_cfg.protocol = "mazurkiewicz";
      total_cfg.scheduler = SchedulerKind::lockstep;
      total_cfg.n_known = g.n;
      SimConfig base_cfg;
      base_cfg.net = *base_ported;
      base_cfg.protocol = "mazurkiewicz";
      base_cfg.scheduler = SchedulerKind::lockstep;
      base_cfg.n_known = found->base.n;

      auto lifted = lockstep_lifted_run(total_cfg, base_cfg, found->map);
      c.require(lifted.fibre_uniform, std::string(pc.total) + ": fibre-uniform throughout");
      auto check = check_maz_run(total_cfg.net, lifted.total_run.final_states);
      c.require(check.ok && check.k == found->base.n,
                std::string(pc.total) + ": mirrored run computed a base of the base size");
    }
  });

  criterion(9, "counterexample machinery", 900.0, [](Checker& c) {
    auto report = counterexample_search(3, 10);
    c.require(report.complete, "search over all cubic graphs up to 10 vertices completed");
    c.require(report.pairs.empty(), "no small counterexample pair (expected empty)");
    c.require(report.sizes_searched == std::vector<int>({4, 6, 8, 10}), "searched 4,6,8,10");
    c.require(report.graphs_examined == 27, "1+2+5+19 cubic graphs examined");

    // verification mode with the divisor-pruned minimality search
    auto prism14 = [] {
      std::vector<Edge> edges;
      for (int i = 0; i < 14; ++i) {
        edges.push_back(make_edge(i, (i + 1) % 14));
        edges.push_back(make_edge(14 + i, 14 + (i + 1) % 14));
        edges.push_back(make_edge(i, 14 + i));
      }
      return make_ugraph(28, std::move(edges), "prism14");
    }();
    auto mobius14 = [] {
      std::vector<Edge> edges;
      for (int i = 0; i < 28; ++i) edges.push_back(make_edge(i, (i + 1) % 28));
      for (int i = 0; i < 14; ++i) edges.push_back(make_edge(i, i + 14));
      return make_ugraph(28, std::move(edges), "mobius14");
    }();
    auto pv = verify_counterexample_pair(prism14, mobius14, 2'000'000);
    c.require(pv.same_size && pv.regular && pv.degree == 3 && pv.non_isomorphic,
              "28-vertex pair pre-checks executed");
    c.require(pv.base_sizes_examined == std::vector<int>({14, 7, 4, 2, 1}),
              "divisor-pruned base sizes for n=28");
    c.require(pv.minimal_a != MinimalityResult::Verdict::minimal &&
                  pv.minimal_b != MinimalityResult::Verdict::minimal,
              "both graphs admit quotients (perfect matchings exist)");
  });

  criterion(10, "determinism and replay across 20 configurations", 0, [](Checker& c) {
    std::mt19937_64 rng(7);
    int configs = 0;
    struct Combo {
      const char* graph;
      const char* protocol;
    };
    const Combo combos[] = {{"k2", "mazurkiewicz"},   {"p3", "mazurkiewicz"},
                            {"c4", "mazurkiewicz"},   {"h-g4", "mazurkiewicz"},
                            {"h-g6", "mazurkiewicz"}, {"p4", "election-tree"},
                            {"star3", "election-tree"}, {"h-g4", "spanning-tree"},
                            {"p3", "topology"},       {"h-g4", "topology"}};
    for (const auto& combo : combos) {
      for (int rep = 0; rep < 2; ++rep) {
        auto g = builtin_ugraph(combo.graph);
        auto cfg = make_cfg(g, assign_ports_random(g, rng()), combo.protocol, rng(),
                            rep ? SchedulerKind::lockstep : SchedulerKind::random);
        auto r1 = run(cfg);
        auto r2 = run(cfg);
        ++configs;
        c.require(r1.trace.to_jsonl() == r2.trace.to_jsonl(), "byte-identical traces");
        auto replayed = replay_trace(r1.trace, cfg);
        c.require(replayed.final_digest == r1.final_digest &&
                      replayed.final_states == r1.final_states,
                  "replay reproduces final states exactly");
      }
    }
    c.require(configs == 20, "twenty configurations");
  });

  std::printf("%s\n", g_exit == 0 ? "acceptance: ALL PASS" : "acceptance: FAILURES");
  return g_exit;
}
