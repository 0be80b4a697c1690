#pragma once

#include <array>
#include <set>
#include <utility>

#include "anoncover/sim.hpp"

namespace anoncover {

// Enumeration-protocol label data. A view triple (m, p, q) records a neighbor
// currently numbered m, reached through local port q, which sees us through
// its port p.
using ViewTriple = std::array<int, 3>;
using LocalView = std::set<ViewTriple>;
using MailboxEntry = std::pair<int, LocalView>;
using Mailbox = std::set<MailboxEntry>;

/// Total order on views: triples compared lexicographically; for distinct
/// sets the larger one owns the maximum of the symmetric difference.
/// Returns -1 (a weaker), 0 (equal), or 1 (a stronger).
int view_order_cmp(const LocalView& a, const LocalView& b);
bool view_less(const LocalView& a, const LocalView& b);

struct MazState {
  int number = 0;
  LocalView view;
  Mailbox mailbox;
};

json to_json(const MazState& st);
MazState maz_state_from_json(const json& j);

struct MazPayload : Payload {
  int m = 0;
  int n_old = 0;
  std::shared_ptr<const Mailbox> mailbox;
  int p = 0;  // port the message was sent through

  void hash_into(Fnv1a& h) const override;
  json to_json() const override;
};

/// Spontaneous-start action: pick number 1 and broadcast. No-op unless the
/// vertex is still unnumbered (a message processed first runs the receive
/// action instead).
std::vector<Send> maz_wakeup(MazState& st, int degree);

/// Receive action for a message (n', n'_old, M') sent through port p,
/// arriving on port q.
std::vector<Send> maz_receive(MazState& st, int n_prime, int n_old_prime, const Mailbox& m_prime,
                              int p, int q, int degree);

/// Reconstructs the ported symmetric digraph defined by a quiescent mailbox:
/// vertices are the numbers 1..k, each number's strongest view contributes
/// its arcs. Throws on an inconsistent mailbox.
SymDigraph build_quotient_from_mailbox(const Mailbox& mbox);

/// The fibre map "same identifier": numbers[v] is 1-based.
CoveringMap quotient_cover_map(const SymDigraph& net, const std::vector<int>& numbers,
                               const SymDigraph& quotient);

// ---------------------------------------------------------------------------
// tree election by leaf elimination

struct ElectionState {
  enum class Status { idle, sent, leader, co_leader };
  int degree = 0;
  std::vector<bool> rec;  // rec[p]: a token arrived through port p (1-based)
  bool awake = false;
  Status status = Status::idle;
  int sent_port = -1;

  static ElectionState make(int degree);
};

/// Wakeup transition: once awake, a vertex that has heard all neighbors
/// becomes leader, one that has heard all but one sends the token there.
std::vector<Send> election_wakeup(ElectionState& st);
/// Token received through port q. Hearing back through the port the token
/// was sent through makes the vertex a co-leader.
std::vector<Send> election_token(ElectionState& st, int q);

// ---------------------------------------------------------------------------
// token-flood spanning tree with acknowledgment termination

struct TarryState {
  enum Role { follower = 0, leader = 1, co_leader = 2 };
  enum MsgKind { token = 0, in_tree = 1, already = 2, ack = 3 };

  int degree = 0;
  int role = follower;
  int coleader_port = -1;
  bool token_seen = false;
  int parent_port = -1;
  std::set<int> tree, others;
  std::set<int> awaiting;  // ports the token left through, reply pending
  std::set<int> children, acked;
  bool partner_acked = false;
  bool ack_sent = false;
  bool finished = false;

  json to_json() const;
};

/// Initiator action: co-leaders pre-mark the shared edge and skip it.
std::vector<Send> tarry_start(TarryState& st);
/// One message transition; first token receipt adds the edge to the tree and
/// answers in-the-tree, duplicates answer already-in-the-tree.
std::vector<Send> tarry_step(TarryState& st, int q, int kind);

struct MazRunCheck {
  bool ok = true;
  std::string violation;
  int k = 0;
};

/// The five quiescence properties of the enumeration protocol: contiguous
/// numbers, equal mailboxes, every state recorded, equal numbers imply equal
/// views, and views matching the actual ported neighborhoods.
MazRunCheck check_maz_run(const SymDigraph& net, const std::vector<json>& final_states);

// registry
const ProtocolFactory& protocol_by_name(const std::string& name);
std::vector<std::string> protocol_names();

/// Per-protocol digest of a finished run (quotients, elected vertices, tree
/// edges, recognized topology).
json protocol_summary(const std::string& protocol, const SymDigraph& net,
                      const std::vector<json>& final_states);

/// Tree edges collected from tarry/spanning-tree final states.
std::vector<Edge> tree_edges_from_states(const SymDigraph& net, const std::vector<json>& final_states);

}  // namespace anoncover
