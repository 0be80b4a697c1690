#include "anoncover/sim.hpp"

#include <algorithm>
#include <sstream>

#include "anoncover/protocols.hpp"

namespace anoncover {

std::string to_string(SchedulerKind k) { return k == SchedulerKind::random ? "random" : "lockstep"; }

SchedulerKind scheduler_from_string(const std::string& s) {
  if (s == "random") return SchedulerKind::random;
  if (s == "lockstep" || s == "lockstep-symmetric") return SchedulerKind::lockstep;
  throw Error("unknown scheduler '" + s + "' (random|lockstep)");
}

namespace {

std::string kind_str(TraceEvent::Kind k) {
  switch (k) {
    case TraceEvent::Kind::wakeup: return "wakeup";
    case TraceEvent::Kind::deliver: return "deliver";
    case TraceEvent::Kind::send: return "send";
    default: return "halt";
  }
}

TraceEvent::Kind kind_from(const std::string& s) {
  if (s == "wakeup") return TraceEvent::Kind::wakeup;
  if (s == "deliver") return TraceEvent::Kind::deliver;
  if (s == "send") return TraceEvent::Kind::send;
  if (s == "halt") return TraceEvent::Kind::halt;
  throw Error("unknown trace event kind '" + s + "'");
}

std::string hex64(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << x;
  return os.str();
}

std::uint64_t from_hex64(const std::string& s) { return std::stoull(s, nullptr, 16); }

}  // namespace

json TraceEvent::to_json() const {
  return json{{"step", step}, {"kind", kind_str(kind)}, {"vertex", vertex}, {"port", port},
              {"digest", hex64(digest)}};
}

TraceEvent TraceEvent::from_json(const json& j) {
  TraceEvent e;
  e.step = j.at("step").get<long>();
  e.kind = kind_from(j.at("kind").get<std::string>());
  e.vertex = j.at("vertex").get<int>();
  e.port = j.at("port").get<int>();
  e.digest = from_hex64(j.at("digest").get<std::string>());
  return e;
}

std::string SimTrace::to_jsonl() const {
  std::ostringstream os;
  os << json{{"header", header}}.dump() << "\n";
  for (const auto& e : events) os << e.to_json().dump() << "\n";
  return os.str();
}

SimTrace SimTrace::from_jsonl(const std::string& text) {
  SimTrace t;
  std::istringstream is(text);
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (first && j.contains("header")) {
      t.header = j.at("header");
      first = false;
      continue;
    }
    first = false;
    t.events.push_back(TraceEvent::from_json(j));
  }
  return t;
}

namespace {

std::uint64_t payload_digest(const Payload& p) {
  Fnv1a h;
  p.hash_into(h);
  return h.value();
}

std::uint64_t net_digest(const SymDigraph& net) {
  Fnv1a h;
  h.add(to_json(net).dump());
  return h.value();
}

struct Engine {
  const SimConfig& cfg;
  const SymDigraph& net;
  std::vector<std::unique_ptr<Process>> procs;
  std::vector<std::deque<Msg>> channels;  // one FIFO queue per arc
  std::vector<bool> woken;
  SimTrace trace;
  long steps = 0;  // wakeups + deliveries
  long messages_sent = 0;
  long deliveries = 0;

  explicit Engine(const SimConfig& c) : cfg(c), net(c.net) {
    if (!net.has_ports() && net.arc_count() > 0) throw Error("simulator requires a ported digraph");
    const ProtocolFactory& factory = protocol_by_name(cfg.protocol);
    factory.validate(net, cfg.n_known, cfg.params);
    for (int v = 0; v < net.n; ++v) procs.push_back(factory.make(net, v, cfg.n_known, cfg.params));
    channels.resize(net.arc_count());
    woken.assign(net.n, false);
    trace.header = {{"protocol", cfg.protocol},
                    {"seed", cfg.seed},
                    {"scheduler", to_string(cfg.scheduler)},
                    {"n", net.n},
                    {"net_digest", hex64(net_digest(net))},
                    {"params", cfg.params}};
    if (cfg.n_known) trace.header["n_known"] = *cfg.n_known;
  }

  bool quiescent() const {
    for (bool w : woken)
      if (!w) return false;
    for (const auto& ch : channels)
      if (!ch.empty()) return false;
    return true;
  }

  void record(TraceEvent::Kind kind, int vertex, int port, std::uint64_t digest) {
    trace.events.push_back({static_cast<long>(trace.events.size()), kind, vertex, port, digest});
  }

  void dispatch_sends(int v, const std::vector<Send>& sends) {
    for (const auto& s : sends) {
      int arc = net.arc_at_port(v, s.port);
      record(TraceEvent::Kind::send, v, s.port, payload_digest(*s.payload));
      channels[arc].push_back(s.payload);
      ++messages_sent;
    }
  }

  void wake(int v) {
    if (woken[v]) throw Error("internal: double wakeup");
    woken[v] = true;
    ++steps;
    record(TraceEvent::Kind::wakeup, v, -1, 0);
    dispatch_sends(v, procs[v]->on_wakeup());
  }

  void deliver(int arc) {
    if (channels[arc].empty()) throw Error("internal: delivery from empty channel");
    Msg msg = channels[arc].front();
    channels[arc].pop_front();
    int v = net.arcs[arc].t;
    int port = net.inport(arc);
    ++steps;
    ++deliveries;
    record(TraceEvent::Kind::deliver, v, port, payload_digest(*msg));
    dispatch_sends(v, procs[v]->on_receive(port, *msg));
  }

  std::uint64_t states_digest() const {
    Fnv1a h;
    for (const auto& p : procs) p->hash_state(h);
    return h.value();
  }

  std::uint64_t vertex_digest(int v) const {
    Fnv1a h;
    procs[v]->hash_state(h);
    return h.value();
  }

  /// Quiescence hook round; returns true if any messages were produced.
  bool run_hooks(int phase) {
    long before = messages_sent;
    record(TraceEvent::Kind::halt, -1, phase, states_digest());
    for (int v = 0; v < net.n; ++v) dispatch_sends(v, procs[v]->on_quiescence(phase));
    return messages_sent != before;
  }

  RunResult finish(int phases, bool hit_cap) {
    RunResult r;
    r.trace = std::move(trace);
    for (const auto& p : procs) r.final_states.push_back(p->state_json());
    r.final_digest = states_digest();
    r.messages_sent = messages_sent;
    r.deliveries = deliveries;
    r.phases = phases;
    r.hit_step_cap = hit_cap;
    return r;
  }
};

struct Scheduler {
  SchedulerKind kind;
  std::mt19937_64 rng;
  std::deque<std::pair<bool, int>> pending;  // lockstep round: (is_wakeup, vertex-or-arc)

  explicit Scheduler(const SimConfig& cfg) : kind(cfg.scheduler), rng(cfg.seed) {}

  std::optional<std::pair<bool, int>> next(const Engine& e) {
    if (kind == SchedulerKind::random) {
      std::vector<int> sleeping;
      for (int v = 0; v < e.net.n; ++v)
        if (!e.woken[v]) sleeping.push_back(v);
      std::vector<int> ready;
      for (int a = 0; a < e.net.arc_count(); ++a)
        if (!e.channels[a].empty()) ready.push_back(a);
      std::size_t total = sleeping.size() + ready.size();
      if (total == 0) return std::nullopt;
      std::size_t idx = static_cast<std::size_t>(rng() % total);
      if (idx < sleeping.size()) return std::make_pair(true, sleeping[idx]);
      return std::make_pair(false, ready[idx - sleeping.size()]);
    }
    // lockstep: wake everyone first, then deliver whole rounds of channel
    // heads ordered by (receiver, receiving port) so fibre-symmetric states
    // process their messages in matching order
    if (pending.empty()) {
      for (int v = 0; v < e.net.n; ++v)
        if (!e.woken[v]) pending.push_back({true, v});
      if (pending.empty()) {
        std::vector<std::pair<std::pair<int, int>, int>> round;
        for (int a = 0; a < e.net.arc_count(); ++a)
          if (!e.channels[a].empty()) round.push_back({{e.net.arcs[a].t, e.net.inport(a)}, a});
        std::sort(round.begin(), round.end());
        for (const auto& [key, a] : round) pending.push_back({false, a});
      }
    }
    if (pending.empty()) return std::nullopt;
    auto ev = pending.front();
    pending.pop_front();
    return ev;
  }
};

}  // namespace

RunResult run(const SimConfig& cfg) {
  Engine engine(cfg);
  Scheduler sched(cfg);
  int phase = 0;
  bool hit_cap = false;
  for (;;) {
    while (auto ev = sched.next(engine)) {
      if (engine.steps >= cfg.step_cap) {
        hit_cap = true;
        break;
      }
      if (ev->first)
        engine.wake(ev->second);
      else
        engine.deliver(ev->second);
    }
    if (hit_cap) break;
    if (!engine.run_hooks(phase++)) break;
  }
  return engine.finish(phase, hit_cap);
}

RunResult replay_trace(const SimTrace& trace, const SimConfig& cfg) {
  if (trace.header.contains("protocol") && trace.header.at("protocol") != cfg.protocol)
    throw Error("trace/config mismatch: protocol differs");
  if (trace.header.contains("net_digest") &&
      trace.header.at("net_digest").get<std::string>() != hex64(net_digest(cfg.net)))
    throw Error("trace/config mismatch: network differs");

  Engine engine(cfg);
  int phase = 0;
  size_t cursor = 0;  // position in engine.trace mirrored against input
  // the replayed engine regenerates sends itself; the input must be a prefix
  // of what it produces (a truncated trace replays to the matching prefix)
  auto check_mirror = [&]() {
    for (; cursor < engine.trace.events.size() && cursor < trace.events.size(); ++cursor) {
      if (!(engine.trace.events[cursor] == trace.events[cursor]))
        throw Error("trace/config mismatch at step " + std::to_string(cursor));
    }
  };

  for (const auto& e : trace.events) {
    switch (e.kind) {
      case TraceEvent::Kind::send:
        break;  // produced by handlers; verified via mirroring
      case TraceEvent::Kind::wakeup:
        if (e.vertex < 0 || e.vertex >= engine.net.n || engine.woken[e.vertex])
          throw Error("trace/config mismatch: bad wakeup");
        engine.wake(e.vertex);
        check_mirror();
        break;
      case TraceEvent::Kind::deliver: {
        // receiving (vertex, port) identifies the channel: the sym partner of
        // the out-arc behind that port
        int out = engine.net.arc_at_port(e.vertex, e.port);
        int arc = engine.net.sym[out];
        if (engine.channels[arc].empty())
          throw Error("trace rejected: delivery from empty channel (send order violated)");
        if (payload_digest(*engine.channels[arc].front()) != e.digest)
          throw Error("trace rejected: delivered payload does not match channel head");
        engine.deliver(arc);
        check_mirror();
        break;
      }
      case TraceEvent::Kind::halt: {
        if (!engine.quiescent()) throw Error("trace rejected: halt while events are still enabled");
        if (engine.states_digest() != e.digest)
          throw Error("trace rejected: state digest mismatch at halt");
        engine.run_hooks(phase++);
        check_mirror();
        break;
      }
    }
  }
  check_mirror();
  if (engine.trace.events.size() < trace.events.size())
    throw Error("trace/config mismatch: trace holds events the replay never produced");
  return engine.finish(phase, false);
}

LiftedRunResult lockstep_lifted_run(const SimConfig& total_cfg, const SimConfig& base_cfg,
                                    const CoveringMap& cover) {
  auto report = classify_morphism(total_cfg.net, base_cfg.net, cover.vmap, cover.amap);
  if (!report.is_symmetric_covering || !report.is_port_preserving)
    throw Error("lockstep_lifted_run requires a port-preserving symmetric covering");

  std::vector<std::vector<int>> vertex_fibre(base_cfg.net.n);
  for (int v = 0; v < total_cfg.net.n; ++v) vertex_fibre[cover.vmap[v]].push_back(v);
  std::vector<std::vector<int>> arc_fibre(base_cfg.net.arc_count());
  for (int a = 0; a < total_cfg.net.arc_count(); ++a) arc_fibre[cover.amap[a]].push_back(a);

  Engine base(base_cfg);
  Engine total(total_cfg);
  Scheduler sched(base_cfg);

  LiftedRunResult result;
  auto check_uniform = [&](long base_step) {
    for (int b = 0; b < base.net.n && result.fibre_uniform; ++b) {
      std::uint64_t d0 = total.vertex_digest(vertex_fibre[b][0]);
      for (size_t i = 1; i < vertex_fibre[b].size(); ++i) {
        if (total.vertex_digest(vertex_fibre[b][i]) != d0) {
          result.fibre_uniform = false;
          result.violation = {{"base_step", base_step},
                              {"base_vertex", b},
                              {"fibre", vertex_fibre[b]},
                              {"states", json::array()}};
          for (int v : vertex_fibre[b]) result.violation["states"].push_back(total.procs[v]->state_json());
        }
      }
    }
    return result.fibre_uniform;
  };

  int phase = 0;
  for (;;) {
    while (auto ev = sched.next(base)) {
      if (ev->first) {
        base.wake(ev->second);
        for (int v : vertex_fibre[ev->second]) total.wake(v);
      } else {
        base.deliver(ev->second);
        for (int a : arc_fibre[ev->second]) {
          if (total.channels[a].empty())
            throw Error("lifted run out of sync: fibre channel empty (covering bug)");
          total.deliver(a);
        }
      }
      if (!check_uniform(base.steps)) {
        result.base_run = base.finish(phase, false);
        result.total_run = total.finish(phase, false);
        return result;
      }
    }
    if (!total.quiescent()) throw Error("lifted run out of sync: total not quiescent with base");
    bool base_more = base.run_hooks(phase);
    bool total_more = total.run_hooks(phase);
    ++phase;
    if (base_more != total_more) throw Error("lifted run out of sync: phase sends differ");
    if (!check_uniform(base.steps)) break;
    if (!base_more) break;
  }
  result.base_run = base.finish(phase, false);
  result.total_run = total.finish(phase, false);
  return result;
}

}  // namespace anoncover
