#include "anoncover/protocols.hpp"

#include <algorithm>

#include "anoncover/canonical.hpp"
#include "anoncover/lifts.hpp"

namespace anoncover {

// ---------------------------------------------------------------------------
// view order

int view_order_cmp(const LocalView& a, const LocalView& b) {
  if (a == b) return 0;
  std::vector<ViewTriple> diff;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
  const ViewTriple& mx = *std::max_element(diff.begin(), diff.end());
  return b.count(mx) ? -1 : 1;
}

bool view_less(const LocalView& a, const LocalView& b) { return view_order_cmp(a, b) < 0; }

// ---------------------------------------------------------------------------
// Mazurkiewicz-style enumeration

namespace {

json view_to_json(const LocalView& v) {
  json arr = json::array();
  for (const auto& t : v) arr.push_back({t[0], t[1], t[2]});
  return arr;
}

LocalView view_from_json(const json& j) {
  LocalView v;
  for (const auto& t : j) v.insert({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
  return v;
}

json mailbox_to_json(const Mailbox& m) {
  json arr = json::array();
  for (const auto& [n, view] : m) arr.push_back({n, view_to_json(view)});
  return arr;
}

Mailbox mailbox_from_json(const json& j) {
  Mailbox m;
  for (const auto& e : j) m.insert({e[0].get<int>(), view_from_json(e[1])});
  return m;
}

void hash_view(Fnv1a& h, const LocalView& v) {
  h.add(static_cast<int>(v.size()));
  for (const auto& t : v) {
    h.add(t[0]);
    h.add(t[1]);
    h.add(t[2]);
  }
}

void hash_mailbox(Fnv1a& h, const Mailbox& m) {
  h.add(static_cast<int>(m.size()));
  for (const auto& [n, view] : m) {
    h.add(n);
    hash_view(h, view);
  }
}

std::vector<Send> maz_broadcast(const MazState& st, int n_old, int degree) {
  auto mbox = std::make_shared<const Mailbox>(st.mailbox);
  std::vector<Send> sends;
  for (int i = 1; i <= degree; ++i) {
    auto payload = std::make_shared<MazPayload>();
    payload->m = st.number;
    payload->n_old = n_old;
    payload->mailbox = mbox;
    payload->p = i;
    sends.push_back({i, std::move(payload)});
  }
  return sends;
}

}  // namespace

json to_json(const MazState& st) {
  return json{{"number", st.number}, {"view", view_to_json(st.view)}, {"mailbox", mailbox_to_json(st.mailbox)}};
}

MazState maz_state_from_json(const json& j) {
  MazState st;
  st.number = j.at("number").get<int>();
  st.view = view_from_json(j.at("view"));
  st.mailbox = mailbox_from_json(j.at("mailbox"));
  return st;
}

void MazPayload::hash_into(Fnv1a& h) const {
  h.add(1);  // payload tag
  h.add(m);
  h.add(n_old);
  h.add(p);
  hash_mailbox(h, *mailbox);
}

json MazPayload::to_json() const {
  return json{{"m", m}, {"n_old", n_old}, {"p", p}, {"mailbox", mailbox_to_json(*mailbox)}};
}

std::vector<Send> maz_wakeup(MazState& st, int degree) {
  if (st.number != 0) return {};  // a message arrived first
  st.number = 1;
  st.mailbox = {{1, {}}};
  return maz_broadcast(st, 0, degree);
}

std::vector<Send> maz_receive(MazState& st, int n_prime, int n_old_prime, const Mailbox& m_prime,
                              int p, int q, int degree) {
  const Mailbox m_old = st.mailbox;
  const int n_old = st.number;
  st.mailbox.insert(m_prime.begin(), m_prime.end());

  bool renumber = st.number == 0;
  if (!renumber) {
    for (const auto& [n, view] : st.mailbox) {
      if (n == st.number && view_less(st.view, view)) {
        renumber = true;
        break;
      }
    }
  }
  if (renumber) {
    int mx = 0;
    for (const auto& [n, view] : st.mailbox) mx = std::max(mx, n);
    st.number = 1 + mx;
  }
  st.view.erase({n_old_prime, p, q});
  st.view.insert({n_prime, p, q});
  st.mailbox.insert({st.number, st.view});
  if (st.mailbox == m_old) return {};
  return maz_broadcast(st, n_old, degree);
}

SymDigraph build_quotient_from_mailbox(const Mailbox& mbox) {
  int k = 0;
  for (const auto& [n, view] : mbox) k = std::max(k, n);
  if (k == 0) throw Error("mailbox holds no numbered states");

  // strongest stored view per number
  std::vector<const LocalView*> strongest(k + 1, nullptr);
  for (const auto& [n, view] : mbox) {
    if (n < 1) throw Error("mailbox holds an invalid number");
    if (!strongest[n] || view_less(*strongest[n], view)) strongest[n] = &view;
  }
  for (int i = 1; i <= k; ++i)
    if (!strongest[i]) throw Error("numbers are not contiguous: " + std::to_string(i) + " missing");

  // arcs: triple (m,p,q) of number i's view gives i -> m with outport q,
  // answered by (i,q,p) in m's view
  struct Slot {
    int from, to, outport, inport;
  };
  std::vector<Slot> slots;
  std::vector<std::vector<int>> slot_at(k);  // per vertex, indexed by outport-1
  for (int i = 1; i <= k; ++i) {
    const LocalView& view = *strongest[i];
    slot_at[i - 1].assign(view.size(), -1);
    std::set<int> ports;
    for (const auto& t : view) {
      auto [m, pp, qq] = t;
      if (m < 1 || m > k) throw Error("view of number " + std::to_string(i) + " names a missing number");
      if (!ports.insert(qq).second || qq < 1 || qq > static_cast<int>(view.size()))
        throw Error("view of number " + std::to_string(i) + " is not port-bijective");
      slot_at[i - 1][qq - 1] = static_cast<int>(slots.size());
      slots.push_back({i - 1, m - 1, qq, pp});
    }
  }
  std::vector<ArcRec> arcs;
  std::vector<int> sym(slots.size(), -1);
  std::vector<int> outport;
  for (const auto& s : slots) {
    arcs.push_back({s.from, s.to});
    outport.push_back(s.outport);
  }
  for (size_t a = 0; a < slots.size(); ++a) {
    const Slot& s = slots[a];
    if (s.inport < 1 || s.inport > static_cast<int>(slot_at[s.to].size()))
      throw Error("view arc of number " + std::to_string(s.from + 1) + " names a bad remote port");
    int partner = slot_at[s.to][s.inport - 1];
    const Slot& ps = slots[partner];
    if (ps.to != s.from || ps.inport != s.outport)
      throw Error("views are inconsistent between numbers " + std::to_string(s.from + 1) + " and " +
                  std::to_string(s.to + 1));
    sym[a] = partner;
  }
  return make_sym_digraph(k, std::move(arcs), std::move(sym), std::move(outport));
}

CoveringMap quotient_cover_map(const SymDigraph& net, const std::vector<int>& numbers,
                               const SymDigraph& quotient) {
  CoveringMap c;
  c.q = net.n / quotient.n;
  c.vmap.resize(net.n);
  for (int v = 0; v < net.n; ++v) c.vmap[v] = numbers[v] - 1;
  c.amap.resize(net.arc_count());
  for (int a = 0; a < net.arc_count(); ++a)
    c.amap[a] = quotient.arc_at_port(c.vmap[net.arcs[a].s], net.outport[a]);
  return c;
}

MazRunCheck check_maz_run(const SymDigraph& net, const std::vector<json>& final_states) {
  MazRunCheck r;
  std::vector<MazState> states;
  for (const auto& j : final_states)
    states.push_back(maz_state_from_json(j.contains("maz") ? j.at("maz") : j));

  int k = 0;
  std::set<int> numbers;
  for (const auto& st : states) {
    numbers.insert(st.number);
    k = std::max(k, st.number);
  }
  r.k = k;
  for (int i = 1; i <= k; ++i)
    if (!numbers.count(i)) {
      r.ok = false;
      r.violation = "numbers are not exactly [1,k]";
      return r;
    }
  if (numbers.count(0)) {
    r.ok = false;
    r.violation = "an unnumbered vertex survived";
    return r;
  }
  for (const auto& st : states) {
    if (st.mailbox != states[0].mailbox) {
      r.ok = false;
      r.violation = "final mailboxes differ";
      return r;
    }
  }
  for (const auto& st : states) {
    if (!states[0].mailbox.count({st.number, st.view})) {
      r.ok = false;
      r.violation = "a final state is missing from the mailbox";
      return r;
    }
  }
  for (size_t i = 0; i < states.size(); ++i)
    for (size_t j = i + 1; j < states.size(); ++j)
      if (states[i].number == states[j].number && states[i].view != states[j].view) {
        r.ok = false;
        r.violation = "equal numbers carry different views";
        return r;
      }
  for (int v = 0; v < net.n; ++v) {
    LocalView expected;
    for (int a : net.out_arcs[v])
      expected.insert({states[net.arcs[a].t].number, net.inport(a), net.outport[a]});
    if (expected != states[v].view) {
      r.ok = false;
      r.violation = "view of vertex " + std::to_string(v) + " does not match its neighborhood";
      return r;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// processes

namespace {

struct TokPayload : Payload {
  void hash_into(Fnv1a& h) const override { h.add(2); }
  json to_json() const override { return json{{"kind", "tok"}}; }
};

struct TarryPayload : Payload {
  enum Kind { token = 0, in_tree = 1, already = 2, ack = 3 };
  int kind = token;
  void hash_into(Fnv1a& h) const override {
    h.add(3);
    h.add(kind);
  }
  json to_json() const override {
    static const char* names[] = {"token", "in-the-tree", "already-in-the-tree", "ack"};
    return json{{"kind", names[kind]}};
  }
};

Msg tarry_msg(int kind) {
  auto p = std::make_shared<TarryPayload>();
  p->kind = kind;
  return p;
}

class MazProcess : public Process {
 public:
  explicit MazProcess(int degree) : degree_(degree) {}

  std::vector<Send> on_wakeup() override { return maz_wakeup(st_, degree_); }

  std::vector<Send> on_receive(int port, const Payload& msg) override {
    const auto& m = dynamic_cast<const MazPayload&>(msg);
    return maz_receive(st_, m.m, m.n_old, *m.mailbox, m.p, port, degree_);
  }

  void hash_state(Fnv1a& h) const override {
    h.add(st_.number);
    hash_view(h, st_.view);
    hash_mailbox(h, st_.mailbox);
  }

  json state_json() const override { return to_json(st_); }

 private:
  int degree_;
  MazState st_;
};

void hash_tarry(Fnv1a& h, const TarryState& st) {
  h.add(st.role);
  h.add(st.coleader_port);
  h.add(static_cast<int>(st.token_seen));
  h.add(st.parent_port);
  for (auto* s : {&st.tree, &st.others, &st.awaiting, &st.children, &st.acked}) {
    h.add(static_cast<int>(s->size()));
    for (int p : *s) h.add(p);
  }
  h.add(static_cast<int>(st.partner_acked));
  h.add(static_cast<int>(st.ack_sent));
  h.add(static_cast<int>(st.finished));
}

std::vector<Send> tarry_maybe_ack(TarryState& st) {
  if (!st.token_seen || !st.awaiting.empty()) return {};
  if (!std::includes(st.acked.begin(), st.acked.end(), st.children.begin(), st.children.end()))
    return {};
  std::vector<Send> out;
  switch (st.role) {
    case TarryState::follower:
      if (!st.ack_sent && st.parent_port >= 0) {
        st.ack_sent = true;
        st.finished = true;
        out.push_back({st.parent_port, tarry_msg(TarryState::ack)});
      }
      break;
    case TarryState::leader:
      st.finished = true;  // the initiator detects termination
      break;
    case TarryState::co_leader:
      if (!st.ack_sent) {
        st.ack_sent = true;
        out.push_back({st.coleader_port, tarry_msg(TarryState::ack)});
      }
      if (st.partner_acked) st.finished = true;
      break;
  }
  return out;
}

void append_sends(std::vector<Send>& to, std::vector<Send>&& extra) {
  for (auto& s : extra) to.push_back(std::move(s));
}

}  // namespace

ElectionState ElectionState::make(int degree) {
  ElectionState st;
  st.degree = degree;
  st.rec.assign(degree + 1, false);
  return st;
}

namespace {

std::vector<Send> election_try_act(ElectionState& st) {
  if (!st.awake || st.status != ElectionState::Status::idle) return {};
  std::vector<int> unheard;
  for (int p = 1; p <= st.degree; ++p)
    if (!st.rec[p]) unheard.push_back(p);
  if (unheard.empty()) {
    st.status = ElectionState::Status::leader;  // heard everyone before sending
    return {};
  }
  if (unheard.size() == 1) {
    st.status = ElectionState::Status::sent;
    st.sent_port = unheard[0];
    return {{st.sent_port, std::make_shared<TokPayload>()}};
  }
  return {};
}

}  // namespace

std::vector<Send> election_wakeup(ElectionState& st) {
  st.awake = true;
  return election_try_act(st);
}

std::vector<Send> election_token(ElectionState& st, int q) {
  st.rec[q] = true;
  if (st.status == ElectionState::Status::sent && q == st.sent_port) {
    st.status = ElectionState::Status::co_leader;
    return {};
  }
  return election_try_act(st);
}

json TarryState::to_json() const {
  static const char* names[] = {"follower", "leader", "co-leader"};
  return json{{"role", names[role]},
              {"coleader_port", coleader_port},
              {"parent_port", parent_port},
              {"tree_ports", std::vector<int>(tree.begin(), tree.end())},
              {"other_ports", std::vector<int>(others.begin(), others.end())},
              {"children", std::vector<int>(children.begin(), children.end())},
              {"finished", finished}};
}

std::vector<Send> tarry_start(TarryState& st) {
  st.token_seen = true;
  std::vector<Send> out;
  if (st.role == TarryState::co_leader) st.tree.insert(st.coleader_port);
  for (int p = 1; p <= st.degree; ++p) {
    if (p == st.coleader_port) continue;
    st.awaiting.insert(p);
    out.push_back({p, tarry_msg(TarryState::token)});
  }
  append_sends(out, tarry_maybe_ack(st));
  return out;
}

std::vector<Send> tarry_step(TarryState& st, int q, int kind) {
  std::vector<Send> out;
  switch (kind) {
    case TarryState::token:
      if (!st.token_seen) {
        st.token_seen = true;
        st.parent_port = q;
        st.tree.insert(q);
        out.push_back({q, tarry_msg(TarryState::in_tree)});
        for (int p = 1; p <= st.degree; ++p) {
          if (p == q) continue;
          st.awaiting.insert(p);
          out.push_back({p, tarry_msg(TarryState::token)});
        }
      } else {
        st.others.insert(q);
        out.push_back({q, tarry_msg(TarryState::already)});
      }
      break;
    case TarryState::in_tree:
      st.tree.insert(q);
      st.children.insert(q);
      st.awaiting.erase(q);
      break;
    case TarryState::already:
      st.others.insert(q);
      st.awaiting.erase(q);
      break;
    case TarryState::ack:
      if (st.role == TarryState::co_leader && q == st.coleader_port)
        st.partner_acked = true;
      else
        st.acked.insert(q);
      break;
    default:
      throw Error("unknown tarry message kind");
  }
  append_sends(out, tarry_maybe_ack(st));
  return out;
}

namespace {

// wrappers binding the pure steps into simulator processes

class ElectionProcess : public Process {
 public:
  explicit ElectionProcess(int degree) : st_(ElectionState::make(degree)) {}

  std::vector<Send> on_wakeup() override { return election_wakeup(st_); }

  std::vector<Send> on_receive(int port, const Payload& msg) override {
    (void)dynamic_cast<const TokPayload&>(msg);
    return election_token(st_, port);
  }

  void hash_state(Fnv1a& h) const override {
    h.add(static_cast<int>(st_.status));
    h.add(st_.sent_port);
    h.add(static_cast<int>(st_.awake));
    for (int p = 1; p <= st_.degree; ++p) h.add(static_cast<int>(st_.rec[p]));
  }

  json state_json() const override {
    static const char* names[] = {"idle", "sent", "leader", "co-leader"};
    json rec = json::array();
    for (int p = 1; p <= st_.degree; ++p)
      if (st_.rec[p]) rec.push_back(p);
    return json{{"status", names[static_cast<int>(st_.status)]},
                {"sent_port", st_.sent_port},
                {"received", rec}};
  }

 private:
  ElectionState st_;
};

class TarryProcess : public Process {
 public:
  TarryProcess(int degree, int role, int coleader_port) {
    st_.degree = degree;
    st_.role = role;
    st_.coleader_port = coleader_port;
  }

  std::vector<Send> on_wakeup() override {
    if (st_.role == TarryState::follower) return {};
    return tarry_start(st_);
  }

  std::vector<Send> on_receive(int port, const Payload& msg) override {
    const auto& m = dynamic_cast<const TarryPayload&>(msg);
    return tarry_step(st_, port, m.kind);
  }

  void hash_state(Fnv1a& h) const override { hash_tarry(h, st_); }
  json state_json() const override { return st_.to_json(); }

 private:
  TarryState st_;
};

// Composite: enumeration to quiescence, then leader/co-leader choice from the
// quotient, then the token flood builds the tree.
class SpanningTreeProcess : public Process {
 public:
  SpanningTreeProcess(int degree, int n_known) : degree_(degree), n_known_(n_known) {
    tarry_.degree = degree;
  }

  std::vector<Send> on_wakeup() override {
    if (phase_ == 0) return maz_wakeup(maz_, degree_);
    return {};
  }

  std::vector<Send> on_receive(int port, const Payload& msg) override {
    if (const auto* m = dynamic_cast<const MazPayload*>(&msg))
      return maz_receive(maz_, m->m, m->n_old, *m->mailbox, m->p, port, degree_);
    const auto& t = dynamic_cast<const TarryPayload&>(msg);
    return tarry_step(tarry_, port, t.kind);
  }

  std::vector<Send> on_quiescence(int phase) override {
    if (phase != 0 || phase_ != 0) return {};
    phase_ = 1;
    SymDigraph quotient;
    try {
      quotient = build_quotient_from_mailbox(maz_.mailbox);
    } catch (const Error& e) {
      error_ = e.what();
      return {};
    }
    int k = quotient.n;
    if (k == n_known_) {
      if (maz_.number == 1) {
        tarry_.role = TarryState::leader;
        return tarry_start(tarry_);
      }
      return {};
    }
    if (2 * k == n_known_ && quotient.has_loop()) {
      int loop_vertex = -1;
      for (int v = 0; v < quotient.n && loop_vertex < 0; ++v)
        if (quotient.loops_at(v) > 0) loop_vertex = v;
      if (maz_.number - 1 == loop_vertex) {
        // the co-edge shows up in the local view as a same-number triple
        int port = -1;
        for (const auto& t : maz_.view)
          if (t[0] == maz_.number) {
            if (port >= 0) {
              error_ = "ambiguous co-edge";
              return {};
            }
            port = t[2];
          }
        if (port < 0) {
          error_ = "co-leader has no same-number neighbor";
          return {};
        }
        tarry_.role = TarryState::co_leader;
        tarry_.coleader_port = port;
        return tarry_start(tarry_);
      }
      return {};
    }
    error_ = "no leader rule applies: quotient size " + std::to_string(k) + " with n=" +
             std::to_string(n_known_) + (quotient.has_loop() ? "" : ", no loop");
    return {};
  }

  void hash_state(Fnv1a& h) const override {
    h.add(phase_);
    h.add(maz_.number);
    hash_view(h, maz_.view);
    hash_mailbox(h, maz_.mailbox);
    hash_tarry(h, tarry_);
    h.add(error_);
  }

  json state_json() const override {
    json j = {{"phase", phase_}, {"maz", anoncover::to_json(maz_)}, {"tarry", tarry_.to_json()}};
    if (!error_.empty()) j["error"] = error_;
    return j;
  }

 private:
  int degree_;
  int n_known_;
  int phase_ = 0;
  MazState maz_;
  TarryState tarry_;
  std::string error_;
};

// Composite: enumeration to quiescence, then local lift enumeration of the
// quotient; the unique simple connected lift of the right size is the answer.
class TopologyProcess : public Process {
 public:
  TopologyProcess(int degree, int n_known) : degree_(degree), n_known_(n_known) {}

  std::vector<Send> on_wakeup() override { return maz_wakeup(maz_, degree_); }

  std::vector<Send> on_receive(int port, const Payload& msg) override {
    const auto& m = dynamic_cast<const MazPayload&>(msg);
    return maz_receive(maz_, m.m, m.n_old, *m.mailbox, m.p, port, degree_);
  }

  std::vector<Send> on_quiescence(int phase) override {
    if (phase != 0 || done_) return {};
    done_ = true;
    SymDigraph quotient;
    try {
      quotient = build_quotient_from_mailbox(maz_.mailbox);
    } catch (const Error& e) {
      error_ = e.what();
      return {};
    }
    k_ = quotient.n;
    if (n_known_ % k_ != 0) {
      error_ = "quotient size does not divide n";
      return {};
    }
    q_ = n_known_ / k_;
    auto lifts = enumerate_lifts(strip_outports(quotient), q_, true, true, 10'000'000, 2);
    classes_ = static_cast<int>(lifts.lifts.size());
    if (classes_ == 1 && lifts.complete)
      output_ = to_json(lifts.lifts.front());
    else if (classes_ >= 2)
      error_ = "ambiguous: several simple connected lifts of the computed graph";
    else
      error_ = "lift enumeration incomplete";
    return {};
  }

  void hash_state(Fnv1a& h) const override {
    h.add(static_cast<int>(done_));
    h.add(maz_.number);
    hash_view(h, maz_.view);
    hash_mailbox(h, maz_.mailbox);
    h.add(k_);
    h.add(q_);
    h.add(classes_);
    h.add(output_.is_null() ? std::string{} : output_.dump());
    h.add(error_);
  }

  json state_json() const override {
    json j = {{"maz", anoncover::to_json(maz_)}, {"k", k_}, {"q", q_}, {"classes", classes_}};
    j["output"] = output_;
    if (!error_.empty()) j["error"] = error_;
    return j;
  }

 private:
  int degree_;
  int n_known_;
  MazState maz_;
  bool done_ = false;
  int k_ = 0;
  int q_ = 0;
  int classes_ = 0;
  json output_;
  std::string error_;
};

// ---------------------------------------------------------------------------
// factories

void require_simple_net(const SymDigraph& net, const std::string& protocol) {
  if (!net.is_simple())
    throw Error(protocol + " runs on Dir of a simple graph (no loops or parallel arcs)");
}

class MazFactory : public ProtocolFactory {
 public:
  std::string name() const override { return "mazurkiewicz"; }
  std::unique_ptr<Process> make(const SymDigraph& net, int vertex, std::optional<int>,
                                const json&) const override {
    return std::make_unique<MazProcess>(net.degree(vertex));
  }
};

class ElectionFactory : public ProtocolFactory {
 public:
  std::string name() const override { return "election-tree"; }
  void validate(const SymDigraph& net, std::optional<int>, const json&) const override {
    require_simple_net(net, name());
    if (net.arc_count() != 2 * (net.n - 1) || !net.is_connected())
      throw Error("election-tree requires a tree network");
  }
  std::unique_ptr<Process> make(const SymDigraph& net, int vertex, std::optional<int>,
                                const json&) const override {
    return std::make_unique<ElectionProcess>(net.degree(vertex));
  }
};

class TarryFactory : public ProtocolFactory {
 public:
  std::string name() const override { return "tarry"; }

  void validate(const SymDigraph& net, std::optional<int>, const json& params) const override {
    require_simple_net(net, name());
    const bool has_leader = params.contains("leader");
    const bool has_pair = params.contains("coleaders");
    if (has_leader == has_pair)
      throw Error("tarry needs either params.leader or params.coleaders [u,v]");
    if (has_leader) {
      int v = params.at("leader").get<int>();
      if (v < 0 || v >= net.n) throw Error("leader vertex out of range");
    } else {
      auto pair = params.at("coleaders").get<std::vector<int>>();
      if (pair.size() != 2) throw Error("coleaders must name two vertices");
      coleader_ports(net, pair[0], pair[1]);  // throws unless adjacent
    }
  }

  std::unique_ptr<Process> make(const SymDigraph& net, int vertex, std::optional<int>,
                                const json& params) const override {
    int role = TarryState::follower;
    int coport = -1;
    if (params.contains("leader")) {
      if (params.at("leader").get<int>() == vertex) role = TarryState::leader;
    } else {
      auto pair = params.at("coleaders").get<std::vector<int>>();
      auto [pu, pv] = coleader_ports(net, pair[0], pair[1]);
      if (vertex == pair[0]) {
        role = TarryState::co_leader;
        coport = pu;
      } else if (vertex == pair[1]) {
        role = TarryState::co_leader;
        coport = pv;
      }
    }
    return std::make_unique<TarryProcess>(net.degree(vertex), role, coport);
  }

 private:
  static std::pair<int, int> coleader_ports(const SymDigraph& net, int u, int v) {
    if (u < 0 || u >= net.n || v < 0 || v >= net.n) throw Error("co-leader vertex out of range");
    for (int a : net.out_arcs[u])
      if (net.arcs[a].t == v) return {net.outport[a], net.outport[net.sym[a]]};
    throw Error("co-leaders must be adjacent");
  }
};

class SpanningTreeFactory : public ProtocolFactory {
 public:
  std::string name() const override { return "spanning-tree"; }
  void validate(const SymDigraph& net, std::optional<int> n_known, const json&) const override {
    require_simple_net(net, name());
    if (!n_known || *n_known != net.n) throw Error("spanning-tree requires knowledge of n");
  }
  std::unique_ptr<Process> make(const SymDigraph& net, int vertex, std::optional<int> n_known,
                                const json&) const override {
    return std::make_unique<SpanningTreeProcess>(net.degree(vertex), *n_known);
  }
};

class TopologyFactory : public ProtocolFactory {
 public:
  std::string name() const override { return "topology"; }
  void validate(const SymDigraph& net, std::optional<int> n_known, const json&) const override {
    require_simple_net(net, name());
    if (!n_known || *n_known != net.n) throw Error("topology requires knowledge of n");
  }
  std::unique_ptr<Process> make(const SymDigraph& net, int vertex, std::optional<int> n_known,
                                const json&) const override {
    return std::make_unique<TopologyProcess>(net.degree(vertex), *n_known);
  }
};

}  // namespace

const ProtocolFactory& protocol_by_name(const std::string& name) {
  static const MazFactory maz;
  static const ElectionFactory election;
  static const TarryFactory tarry;
  static const SpanningTreeFactory spanning;
  static const TopologyFactory topology;
  if (name == maz.name()) return maz;
  if (name == election.name()) return election;
  if (name == tarry.name()) return tarry;
  if (name == spanning.name()) return spanning;
  if (name == topology.name()) return topology;
  throw Error("unknown protocol '" + name + "' (mazurkiewicz|election-tree|tarry|spanning-tree|topology)");
}

std::vector<std::string> protocol_names() {
  return {"mazurkiewicz", "election-tree", "tarry", "spanning-tree", "topology"};
}

std::vector<Edge> tree_edges_from_states(const SymDigraph& net, const std::vector<json>& final_states) {
  std::set<Edge> edges;
  for (int v = 0; v < net.n; ++v) {
    const json& st = final_states[v].contains("tarry") ? final_states[v].at("tarry") : final_states[v];
    if (!st.contains("tree_ports")) continue;
    for (int p : st.at("tree_ports").get<std::vector<int>>()) {
      int a = net.arc_at_port(v, p);
      edges.insert(make_edge(v, net.arcs[a].t));
    }
  }
  return {edges.begin(), edges.end()};
}

json protocol_summary(const std::string& protocol, const SymDigraph& net,
                      const std::vector<json>& final_states) {
  json s = {{"protocol", protocol}};
  if (protocol == "mazurkiewicz" || protocol == "spanning-tree" || protocol == "topology") {
    std::vector<int> numbers;
    for (const auto& j : final_states) {
      const json& mj = j.contains("maz") ? j.at("maz") : j;
      numbers.push_back(mj.at("number").get<int>());
    }
    s["numbers"] = numbers;
    const json& mj0 = final_states[0].contains("maz") ? final_states[0].at("maz") : final_states[0];
    try {
      SymDigraph quotient = build_quotient_from_mailbox(mailbox_from_json(mj0.at("mailbox")));
      s["k"] = quotient.n;
      s["quotient"] = to_json(quotient);
    } catch (const Error& e) {
      s["quotient_error"] = e.what();
    }
  }
  if (protocol == "election-tree") {
    json leaders = json::array(), coleaders = json::array();
    for (int v = 0; v < net.n; ++v) {
      auto status = final_states[v].at("status").get<std::string>();
      if (status == "leader") leaders.push_back(v);
      if (status == "co-leader") coleaders.push_back(v);
    }
    s["leaders"] = std::move(leaders);
    s["coleaders"] = std::move(coleaders);
  }
  if (protocol == "tarry" || protocol == "spanning-tree") {
    json edges = json::array();
    for (const auto& [u, v] : tree_edges_from_states(net, final_states)) edges.push_back({u, v});
    s["tree_edges"] = std::move(edges);
    json errors = json::array();
    for (int v = 0; v < net.n; ++v)
      if (final_states[v].contains("error")) errors.push_back({{"vertex", v}, {"error", final_states[v].at("error")}});
    if (!errors.empty()) s["errors"] = std::move(errors);
  }
  if (protocol == "topology") {
    s["classes"] = final_states[0].value("classes", 0);
    s["output"] = final_states[0].value("output", json());
    bool ambiguous = false, all_equal = true;
    for (const auto& j : final_states) {
      if (j.contains("error")) ambiguous = true;
      if (j.value("output", json()) != final_states[0].value("output", json())) all_equal = false;
    }
    s["ambiguous"] = ambiguous;
    s["outputs_equal"] = all_equal;
  }
  return s;
}

}  // namespace anoncover
