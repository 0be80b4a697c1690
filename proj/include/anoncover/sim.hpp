#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "anoncover/covering.hpp"
#include "anoncover/graph.hpp"

namespace anoncover {

/// FNV-1a over a canonical little-endian byte stream; platform-independent.
struct Fnv1a {
  std::uint64_t state = 14695981039346656037ULL;
  void add_byte(unsigned char b) {
    state ^= b;
    state *= 1099511628211ULL;
  }
  void add(std::uint64_t x) {
    for (int i = 0; i < 8; ++i) add_byte(static_cast<unsigned char>((x >> (8 * i)) & 0xff));
  }
  void add(int x) { add(static_cast<std::uint64_t>(static_cast<std::int64_t>(x))); }
  void add(const std::string& s) {
    add(static_cast<std::uint64_t>(s.size()));
    for (char c : s) add_byte(static_cast<unsigned char>(c));
  }
  std::uint64_t value() const { return state; }
};

/// Immutable message payload.
struct Payload {
  virtual ~Payload() = default;
  virtual void hash_into(Fnv1a& h) const = 0;
  virtual json to_json() const = 0;
};

using Msg = std::shared_ptr<const Payload>;

struct Send {
  int port;
  Msg payload;
};

/// Per-vertex protocol state machine. Handlers are deterministic functions of
/// local state and the event; all interleaving is owned by the simulator.
class Process {
 public:
  virtual ~Process() = default;
  virtual std::vector<Send> on_wakeup() = 0;
  virtual std::vector<Send> on_receive(int port, const Payload& msg) = 0;
  /// Invoked at global quiescence (phase = 0, 1, ...); composite protocols
  /// use this as their phase boundary.
  virtual std::vector<Send> on_quiescence(int phase) {
    (void)phase;
    return {};
  }
  virtual void hash_state(Fnv1a& h) const = 0;
  virtual json state_json() const = 0;
};

class ProtocolFactory {
 public:
  virtual ~ProtocolFactory() = default;
  virtual std::string name() const = 0;
  /// Whole-network preconditions (e.g. tree-ness, initiator designation).
  virtual void validate(const SymDigraph& net, std::optional<int> n_known, const json& params) const {
    (void)net;
    (void)n_known;
    (void)params;
  }
  virtual std::unique_ptr<Process> make(const SymDigraph& net, int vertex, std::optional<int> n_known,
                                        const json& params) const = 0;
};

enum class SchedulerKind { random, lockstep };

std::string to_string(SchedulerKind k);
SchedulerKind scheduler_from_string(const std::string& s);

struct SimConfig {
  SymDigraph net;  // ported symmetric digraph (dir(g, ports) or a base graph)
  std::string protocol;
  std::uint64_t seed = 0;
  SchedulerKind scheduler = SchedulerKind::random;
  std::optional<int> n_known;
  json params = json::object();
  long step_cap = 1'000'000;
};

struct TraceEvent {
  enum class Kind { wakeup, deliver, send, halt };
  long step = 0;
  Kind kind = Kind::wakeup;
  int vertex = -1;
  int port = -1;
  std::uint64_t digest = 0;

  json to_json() const;
  static TraceEvent from_json(const json& j);
  bool operator==(const TraceEvent&) const = default;
};

struct SimTrace {
  json header;
  std::vector<TraceEvent> events;

  std::string to_jsonl() const;
  static SimTrace from_jsonl(const std::string& text);
};

struct RunResult {
  SimTrace trace;
  std::vector<json> final_states;
  std::uint64_t final_digest = 0;
  long messages_sent = 0;
  long deliveries = 0;
  int phases = 0;
  bool hit_step_cap = false;
};

/// Event loop: the scheduler repeatedly picks an enabled event (wakeup of a
/// sleeping process or delivery of a channel head), handlers run and enqueue
/// sends; terminates at quiescence or the step cap. Bitwise deterministic per
/// config.
RunResult run(const SimConfig& cfg);

/// Re-executes a recorded trace; throws on any config mismatch, FIFO
/// violation or digest divergence. Final states are bitwise identical to the
/// original run's.
RunResult replay_trace(const SimTrace& trace, const SimConfig& cfg);

struct LiftedRunResult {
  RunResult base_run;
  RunResult total_run;
  bool fibre_uniform = true;
  json violation;  // first violation details, when any
};

/// Drives the base run with its configured scheduler and mirrors every event
/// to all fibre preimages in the total run, asserting after every step that
/// processes in a common fibre hold identical states.
LiftedRunResult lockstep_lifted_run(const SimConfig& total_cfg, const SimConfig& base_cfg,
                                    const CoveringMap& cover);

}  // namespace anoncover
