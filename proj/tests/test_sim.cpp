#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "anoncover/covering.hpp"
#include "anoncover/graph.hpp"
#include "anoncover/protocols.hpp"
#include "anoncover/sim.hpp"

using namespace anoncover;

namespace {

SimConfig config(const std::string& graph, const std::string& protocol, std::uint64_t seed,
                 SchedulerKind sched = SchedulerKind::random, std::uint64_t port_seed = 0) {
  SimConfig cfg;
  auto g = builtin_ugraph(graph);
  cfg.net = dir(g, port_seed == 0 ? assign_ports_canonical(g) : assign_ports_random(g, port_seed));
  cfg.protocol = protocol;
  cfg.seed = seed;
  cfg.scheduler = sched;
  cfg.n_known = cfg.net.n;
  return cfg;
}

// sends and deliveries keyed by channel (arc id), in trace order
std::pair<std::map<int, std::vector<std::uint64_t>>, std::map<int, std::vector<std::uint64_t>>>
channel_history(const SymDigraph& net, const SimTrace& trace) {
  std::map<int, std::vector<std::uint64_t>> sends, delivers;
  for (const auto& e : trace.events) {
    if (e.kind == TraceEvent::Kind::send)
      sends[net.arc_at_port(e.vertex, e.port)].push_back(e.digest);
    else if (e.kind == TraceEvent::Kind::deliver)
      delivers[net.sym[net.arc_at_port(e.vertex, e.port)]].push_back(e.digest);
  }
  return {sends, delivers};
}

}  // namespace

TEST_CASE("identical configs give byte-identical traces") {
  for (auto graph : {"k2", "p3", "c4", "h-g4"}) {
    for (std::uint64_t seed : {1, 7, 42}) {
      auto cfg = config(graph, "mazurkiewicz", seed);
      auto a = run(cfg);
      auto b = run(cfg);
      CHECK(a.trace.to_jsonl() == b.trace.to_jsonl());
      CHECK(a.final_digest == b.final_digest);
      CHECK(a.final_states == b.final_states);
    }
  }
}

TEST_CASE("seeds shift the schedule") {
  auto a = run(config("h-g4", "mazurkiewicz", 1));
  auto b = run(config("h-g4", "mazurkiewicz", 2));
  CHECK(a.trace.to_jsonl() != b.trace.to_jsonl());
}

TEST_CASE("per-channel delivery order equals send order; nothing is lost") {
  for (auto graph : {"c4", "h-g4", "fig1-base"}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto cfg = config(graph, "mazurkiewicz", seed, SchedulerKind::random, seed);
      auto r = run(cfg);
      auto [sends, delivers] = channel_history(cfg.net, r.trace);
      CHECK(sends == delivers);  // reliability: all sent messages delivered in order
      CHECK(r.messages_sent == r.deliveries);
    }
  }
}

TEST_CASE("every delivered message was previously sent") {
  auto cfg = config("c4", "mazurkiewicz", 3);
  auto r = run(cfg);
  std::map<int, size_t> sent, delivered;
  for (const auto& e : r.trace.events) {
    if (e.kind == TraceEvent::Kind::send) sent[cfg.net.arc_at_port(e.vertex, e.port)]++;
    if (e.kind == TraceEvent::Kind::deliver) {
      int arc = cfg.net.sym[cfg.net.arc_at_port(e.vertex, e.port)];
      delivered[arc]++;
      CHECK(delivered[arc] <= sent[arc]);
    }
  }
}

TEST_CASE("trace round trips through jsonl") {
  auto cfg = config("p3", "mazurkiewicz", 9);
  auto r = run(cfg);
  auto text = r.trace.to_jsonl();
  auto back = SimTrace::from_jsonl(text);
  CHECK(back.events.size() == r.trace.events.size());
  CHECK(back.to_jsonl() == text);
}

TEST_CASE("replay reproduces final states bitwise") {
  for (auto graph : {"k2", "c4", "h-g4"}) {
    auto cfg = config(graph, "mazurkiewicz", 11, SchedulerKind::random, 4);
    auto original = run(cfg);
    auto replayed = replay_trace(original.trace, cfg);
    CHECK(replayed.final_digest == original.final_digest);
    CHECK(replayed.final_states == original.final_states);
    CHECK(replayed.trace.to_jsonl() == original.trace.to_jsonl());
  }
}

TEST_CASE("replay of a truncated trace stops at the matching prefix state") {
  auto cfg = config("h-g4", "spanning-tree", 5);
  auto original = run(cfg);
  // cut just before the first quiescence marker: the replayed state digest
  // must equal the digest the marker recorded
  size_t halt_at = 0;
  while (original.trace.events[halt_at].kind != TraceEvent::Kind::halt) ++halt_at;
  SimTrace trunc;
  trunc.header = original.trace.header;
  trunc.events.assign(original.trace.events.begin(), original.trace.events.begin() + halt_at);
  auto replayed = replay_trace(trunc, cfg);
  CHECK(replayed.final_digest == original.trace.events[halt_at].digest);
}

TEST_CASE("tampered traces are rejected") {
  auto cfg = config("c4", "mazurkiewicz", 2);
  auto original = run(cfg);

  SUBCASE("mismatched protocol") {
    SimConfig other = cfg;
    other.protocol = "election-tree";
    CHECK_THROWS_WITH_AS(replay_trace(original.trace, other), doctest::Contains("mismatch"), Error);
  }

  SUBCASE("delivery reordered ahead of its send violates the channel") {
    // find a deliver event and move it to the very front
    auto tampered = original.trace;
    size_t pos = 0;
    while (tampered.events[pos].kind != TraceEvent::Kind::deliver) ++pos;
    auto ev = tampered.events[pos];
    tampered.events.erase(tampered.events.begin() + pos);
    tampered.events.insert(tampered.events.begin(), ev);
    CHECK_THROWS_AS(replay_trace(tampered, cfg), Error);
  }

  SUBCASE("swapping two deliveries on one channel breaks the order") {
    // locate two deliveries of the same channel with distinct payloads
    std::map<int, std::vector<size_t>> by_channel;
    for (size_t i = 0; i < original.trace.events.size(); ++i) {
      const auto& e = original.trace.events[i];
      if (e.kind != TraceEvent::Kind::deliver) continue;
      by_channel[cfg.net.sym[cfg.net.arc_at_port(e.vertex, e.port)]].push_back(i);
    }
    bool exercised = false;
    for (const auto& [arc, idxs] : by_channel) {
      for (size_t i = 0; i + 1 < idxs.size() && !exercised; ++i) {
        if (original.trace.events[idxs[i]].digest == original.trace.events[idxs[i + 1]].digest) continue;
        auto tampered = original.trace;
        std::swap(tampered.events[idxs[i]], tampered.events[idxs[i + 1]]);
        CHECK_THROWS_AS(replay_trace(tampered, cfg), Error);
        exercised = true;
      }
    }
    CHECK(exercised);
  }
}

TEST_CASE("step cap yields a nontermination report with the trace") {
  auto cfg = config("c4", "mazurkiewicz", 1);
  cfg.step_cap = 3;
  auto r = run(cfg);
  CHECK(r.hit_step_cap);
  CHECK(r.trace.events.size() >= 3);
}

TEST_CASE("lockstep scheduler wakes everyone before any delivery") {
  auto cfg = config("c4", "mazurkiewicz", 0, SchedulerKind::lockstep);
  auto r = run(cfg);
  int wakeups = 0;
  for (const auto& e : r.trace.events) {
    if (e.kind == TraceEvent::Kind::deliver) break;
    if (e.kind == TraceEvent::Kind::wakeup) ++wakeups;
  }
  CHECK(wakeups == 4);
}

TEST_CASE("lockstep on a rotation-symmetric ring collapses the enumeration") {
  // port 1 clockwise, port 2 counterclockwise: the ports preserve the
  // rotational symmetry, so the round-synchronized schedule keeps all four
  // processes identical and the quotient has a single vertex
  auto g = builtin_ugraph("c4");
  PortNumbering ports;
  ports.port_of.resize(4);
  for (int i = 0; i < 4; ++i) {
    ports.port_of[i][(i + 1) % 4] = 1;
    ports.port_of[i][(i + 3) % 4] = 2;
  }
  SimConfig cfg;
  cfg.net = dir(g, ports);
  cfg.protocol = "mazurkiewicz";
  cfg.scheduler = SchedulerKind::lockstep;
  cfg.n_known = 4;
  auto r = run(cfg);
  auto summary = protocol_summary("mazurkiewicz", cfg.net, r.final_states);
  CHECK(summary.at("k") == 1);
  // with canonical ports the symmetry is partially broken even in lockstep
  auto cfg2 = config("c4", "mazurkiewicz", 0, SchedulerKind::lockstep);
  auto canonical = run(cfg2);
  auto s2 = protocol_summary("mazurkiewicz", cfg2.net, canonical.final_states);
  CHECK(s2.at("k") == 2);
}

TEST_CASE("lifted run over the identity covering mirrors the trace exactly") {
  auto cfg = config("h-g4", "mazurkiewicz", 3);
  CoveringMap identity;
  identity.q = 1;
  identity.vmap.resize(cfg.net.n);
  identity.amap.resize(cfg.net.arc_count());
  for (int v = 0; v < cfg.net.n; ++v) identity.vmap[v] = v;
  for (int a = 0; a < cfg.net.arc_count(); ++a) identity.amap[a] = a;
  auto lifted = lockstep_lifted_run(cfg, cfg, identity);
  CHECK(lifted.fibre_uniform);
  CHECK(lifted.base_run.trace.to_jsonl() == lifted.total_run.trace.to_jsonl());
}

TEST_CASE("lifted run demands a port-preserving symmetric covering") {
  auto cfg = config("h-g4", "mazurkiewicz", 3);
  CoveringMap bogus;
  bogus.q = 1;
  bogus.vmap.assign(cfg.net.n, 0);
  bogus.amap.assign(cfg.net.arc_count(), 0);
  CHECK_THROWS_WITH_AS(lockstep_lifted_run(cfg, cfg, bogus), doctest::Contains("port-preserving"),
                       Error);
}
