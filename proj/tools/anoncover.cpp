// anoncover: coverings, lifts, feasibility verdicts and protocol simulation
// for anonymous port-numbered networks.
//
// JSON goes to stdout, human-readable notes to stderr.
// Exit codes: 0 success/feasible, 1 negative verdict, 2 unknown/budget, 3 usage.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "anoncover/canonical.hpp"
#include "anoncover/feasibility.hpp"
#include "anoncover/graph.hpp"
#include "anoncover/lifts.hpp"
#include "anoncover/protocols.hpp"
#include "anoncover/sim.hpp"

namespace ac = anoncover;
using ac::json;

namespace {

constexpr long kDefaultBudget = 10'000'000;

long env_budget() {
  if (const char* s = std::getenv("ANONCOVER_BUDGET")) {
    try {
      return std::stol(s);
    } catch (...) {
      throw ac::Error("ANONCOVER_BUDGET is not a number");
    }
  }
  return kDefaultBudget;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ac::Error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ac::Error("cannot write '" + path + "'");
  out << text;
}

// graph references: a file path or builtin:NAME
ac::AnyGraph load_ref(const std::string& ref) {
  if (ref.rfind("builtin:", 0) == 0) return ac::builtin(ref.substr(8));
  return ac::load_graph(read_file(ref));
}

ac::UGraph load_ugraph_ref(const std::string& ref) {
  auto g = load_ref(ref);
  if (auto* u = std::get_if<ac::UGraph>(&g)) return *u;
  throw ac::Error("'" + ref + "' is a symmetric digraph; an undirected graph is required");
}

ac::SymDigraph load_digraph_ref(const std::string& ref) {
  auto g = load_ref(ref);
  if (auto* d = std::get_if<ac::SymDigraph>(&g)) return *d;
  return ac::dir(std::get<ac::UGraph>(g));
}

std::optional<ac::PortNumbering> load_ports_of_ref(const std::string& ref, const ac::UGraph& g) {
  if (ref.rfind("builtin:", 0) == 0) return std::nullopt;
  json j = json::parse(read_file(ref));
  return ac::parse_ports(j, g);
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

struct PortSpec {
  std::string mode = "canonical";  // canonical | random | file path
  std::uint64_t seed = 0;
};

ac::SymDigraph ported_net(const std::string& graph_ref, const PortSpec& spec) {
  auto any = load_ref(graph_ref);
  if (auto* d = std::get_if<ac::SymDigraph>(&any)) {
    if (d->has_ports()) return *d;
    return ac::with_canonical_outports(*d);
  }
  const auto& g = std::get<ac::UGraph>(any);
  if (spec.mode == "canonical") {
    if (auto file_ports = load_ports_of_ref(graph_ref, g)) return ac::dir(g, *file_ports);
    return ac::dir(g, ac::assign_ports_canonical(g));
  }
  if (spec.mode == "random") return ac::dir(g, ac::assign_ports_random(g, spec.seed));
  json j = json::parse(read_file(spec.mode));
  auto ports = ac::parse_ports(j, g);
  if (!ports) throw ac::Error("port file '" + spec.mode + "' has no ports array");
  return ac::dir(g, *ports);
}

int run_simulation(const ac::SimConfig& cfg, const std::string& trace_out, const std::string& replay_in) {
  ac::RunResult result;
  if (!replay_in.empty()) {
    auto trace = ac::SimTrace::from_jsonl(read_file(replay_in));
    result = ac::replay_trace(trace, cfg);
    std::cerr << "replayed " << trace.events.size() << " events\n";
  } else {
    result = ac::run(cfg);
  }
  if (!trace_out.empty()) write_file(trace_out, result.trace.to_jsonl());

  json out = {{"final_states", result.final_states},
              {"summary", ac::protocol_summary(cfg.protocol, cfg.net, result.final_states)},
              {"stats",
               {{"events", result.trace.events.size()},
                {"messages_sent", result.messages_sent},
                {"deliveries", result.deliveries},
                {"phases", result.phases},
                {"hit_step_cap", result.hit_step_cap}}}};
  if (cfg.protocol == "mazurkiewicz") {
    // soft complexity note: message count against the 4*m^2*n envelope
    long m = cfg.net.arc_count() / 2;
    long envelope = 4 * m * m * cfg.net.n;
    out["stats"]["message_envelope"] = envelope;
    out["stats"]["within_envelope"] = result.messages_sent <= envelope;
  }
  emit(out);
  if (result.hit_step_cap) {
    std::cerr << "step cap exceeded: nontermination report in trace\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coverings, lifts and protocol simulation for anonymous networks"};
  app.require_subcommand(1);
  long budget = 0;  // 0 = use env/default

  auto effective_budget = [&]() { return budget > 0 ? budget : env_budget(); };

  // ---- graph ----
  auto* graph_cmd = app.add_subcommand("graph", "validate and convert graphs");
  graph_cmd->require_subcommand(1);
  std::string g_in, g_out, g_ports = "none";
  std::uint64_t g_seed = 0;

  auto* g_validate = graph_cmd->add_subcommand("validate", "check invariants, print metrics");
  g_validate->add_option("graph", g_in, "graph file or builtin:NAME")->required();

  auto* g_dir = graph_cmd->add_subcommand("dir", "directed symmetric version of an undirected graph");
  g_dir->add_option("graph", g_in)->required();
  g_dir->add_option("--ports", g_ports, "none|canonical|random|FILE");
  g_dir->add_option("--port-seed", g_seed);
  g_dir->add_option("-o,--out", g_out);

  // ---- cover ----
  auto* cover_cmd = app.add_subcommand("cover", "covering morphisms and bases");
  cover_cmd->require_subcommand(1);
  std::string c_total, c_base, c_map, c_graph;
  int c_max_q = 0;

  auto* c_check = cover_cmd->add_subcommand("check", "classify a candidate morphism");
  c_check->add_option("--total", c_total)->required();
  c_check->add_option("--base", c_base)->required();
  c_check->add_option("--map", c_map, "covering map json file")->required();

  auto* c_bases = cover_cmd->add_subcommand("bases", "enumerate base graphs");
  c_bases->add_option("graph", c_graph)->required();
  c_bases->add_option("--max-q", c_max_q);
  c_bases->add_option("--budget", budget);

  auto* c_minimal = cover_cmd->add_subcommand("minimal", "minimality for the symmetric covering relation");
  c_minimal->add_option("graph", c_graph)->required();
  c_minimal->add_option("--budget", budget);

  // ---- lift ----
  auto* lift_cmd = app.add_subcommand("lift", "lift enumeration and isomorphism");
  lift_cmd->require_subcommand(1);
  std::string l_base, l_a, l_b;
  int l_sheets = 2;
  bool l_simple = false, l_connected = false;

  auto* l_enum = lift_cmd->add_subcommand("enumerate", "all q-sheeted symmetric coverings of a base");
  l_enum->add_option("--base", l_base)->required();
  l_enum->add_option("--sheets", l_sheets)->required();
  l_enum->add_flag("--simple", l_simple);
  l_enum->add_flag("--connected", l_connected);
  l_enum->add_option("--budget", budget);

  auto* l_iso = lift_cmd->add_subcommand("iso", "isomorphism of two graphs");
  l_iso->add_option("a", l_a)->required();
  l_iso->add_option("b", l_b)->required();

  // ---- feasible ----
  auto* feas_cmd = app.add_subcommand("feasible", "feasibility verdicts");
  feas_cmd->require_subcommand(1);
  std::string f_graph;
  auto* f_tree = feas_cmd->add_subcommand("spanning-tree", "spanning tree construction feasibility");
  f_tree->add_option("graph", f_graph)->required();
  f_tree->add_option("--budget", budget);
  auto* f_topo = feas_cmd->add_subcommand("topology", "topology recognition feasibility");
  f_topo->add_option("graph", f_graph)->required();
  f_topo->add_option("--budget", budget);

  // ---- yk-check ----
  auto* yk_cmd = app.add_subcommand("yk-check", "same-size common-covering sufficient condition");
  std::string yk_graph;
  yk_cmd->add_option("graph", yk_graph)->required();
  yk_cmd->add_option("--budget", budget);

  // ---- counterexample ----
  auto* cx_cmd = app.add_subcommand("counterexample", "search for recognizable same-degree pairs");
  int cx_degree = 3, cx_max_n = 10;
  std::vector<std::string> cx_verify;
  cx_cmd->add_option("--degree", cx_degree);
  cx_cmd->add_option("--max-n", cx_max_n);
  cx_cmd->add_option("--verify", cx_verify, "two graph refs: full pair property check")->expected(2);
  cx_cmd->add_option("--budget", budget);

  // ---- simulate ----
  auto* sim_cmd = app.add_subcommand("simulate", "run a protocol under an adversarial schedule");
  std::string s_protocol, s_graph, s_ports = "canonical", s_scheduler = "random";
  std::string s_trace, s_replay, s_params = "{}";
  std::uint64_t s_seed = 0, s_port_seed = 0;
  long s_steps = 1'000'000;
  int s_know_n = -1;
  sim_cmd->add_option("--protocol", s_protocol)->required();
  sim_cmd->add_option("--graph", s_graph)->required();
  sim_cmd->add_option("--ports", s_ports, "canonical|random|FILE");
  sim_cmd->add_option("--port-seed", s_port_seed);
  sim_cmd->add_option("--seed", s_seed);
  sim_cmd->add_option("--scheduler", s_scheduler, "random|lockstep");
  sim_cmd->add_option("--trace", s_trace, "write the event log (jsonl)");
  sim_cmd->add_option("--replay", s_replay, "replay a recorded trace instead of scheduling");
  sim_cmd->add_option("--steps", s_steps, "event cap");
  sim_cmd->add_option("--params", s_params, "protocol parameters (json)");
  sim_cmd->add_option("--know-n", s_know_n, "knowledge of n handed to processes (default: |V|)");

  // ---- batch ----
  auto* batch_cmd = app.add_subcommand("batch", "seed-sweep simulation runs");
  std::vector<std::string> b_graphs;
  std::string b_protocol, b_out, b_ports = "canonical", b_scheduler = "random";
  std::uint64_t b_seed_from = 0, b_seed_to = 9;
  batch_cmd->add_option("--graph", b_graphs)->required();
  batch_cmd->add_option("--protocol", b_protocol)->required();
  batch_cmd->add_option("--out", b_out)->required();
  batch_cmd->add_option("--ports", b_ports, "canonical|random (random re-seeds per run)");
  batch_cmd->add_option("--scheduler", b_scheduler);
  batch_cmd->add_option("--seed-from", b_seed_from);
  batch_cmd->add_option("--seed-to", b_seed_to);

  // ---- builtin ----
  auto* builtin_cmd = app.add_subcommand("builtin", "built-in graph corpus");
  builtin_cmd->require_subcommand(1);
  auto* bi_list = builtin_cmd->add_subcommand("list", "list corpus names");
  std::string bi_name;
  auto* bi_get = builtin_cmd->add_subcommand("get", "print a corpus graph");
  bi_get->add_option("name", bi_name)->required();
  (void)bi_list;

  CLI11_PARSE(app, argc, argv);

  try {
    if (g_validate->parsed()) {
      auto any = load_ref(g_in);
      json j;
      if (auto* u = std::get_if<ac::UGraph>(&any)) {
        auto m = ac::metrics(*u);
        j = {{"kind", "ugraph"}, {"n", m.n}, {"edges", u->m()}, {"max_degree", m.max_degree},
             {"diameter", m.diameter}};
      } else {
        const auto& d = std::get<ac::SymDigraph>(any);
        auto m = ac::metrics(d);
        j = {{"kind", "sym-digraph"}, {"n", m.n}, {"arcs", d.arc_count()}, {"max_degree", m.max_degree},
             {"diameter", m.diameter}, {"ported", d.has_ports()}};
      }
      j["valid"] = true;
      emit(j);
      return 0;
    }
    if (g_dir->parsed()) {
      auto g = load_ugraph_ref(g_in);
      ac::SymDigraph d;
      if (g_ports == "none") {
        d = ac::dir(g);
      } else if (g_ports == "canonical") {
        d = ac::dir(g, ac::assign_ports_canonical(g));
      } else if (g_ports == "random") {
        d = ac::dir(g, ac::assign_ports_random(g, g_seed));
      } else {
        json pj = json::parse(read_file(g_ports));
        auto ports = ac::parse_ports(pj, g);
        if (!ports) throw ac::Error("port file has no ports array");
        d = ac::dir(g, *ports);
      }
      json out = ac::to_json(d);
      if (!g_out.empty())
        write_file(g_out, out.dump(2));
      else
        emit(out);
      return 0;
    }
    if (c_check->parsed()) {
      auto total = load_digraph_ref(c_total);
      auto base = load_digraph_ref(c_base);
      auto cover = ac::covering_map_from_json(json::parse(read_file(c_map)));
      auto report = ac::classify_morphism(total, base, cover.vmap, cover.amap);
      json out = report.to_json();
      if (report.is_symmetric_covering) out["q"] = ac::sheets_of(total, base, cover);
      emit(out);
      return report.is_symmetric_covering ? 0 : 1;
    }
    if (c_bases->parsed()) {
      auto d = load_digraph_ref(c_graph);
      ac::EnumerateOptions opt;
      opt.budget = effective_budget();
      opt.max_q = c_max_q;
      auto en = ac::enumerate_bases(d, opt);
      json arr = json::array();
      for (const auto& b : en.bases)
        arr.push_back({{"base", ac::to_json(b.base)}, {"map", ac::to_json(b.map)}, {"q", b.map.q}});
      emit(json{{"bases", arr}, {"complete", en.complete}, {"nodes", en.nodes}});
      std::cerr << en.bases.size() << " base(s), search " << (en.complete ? "complete" : "incomplete")
                << "\n";
      return en.complete ? 0 : 2;
    }
    if (c_minimal->parsed()) {
      auto d = load_digraph_ref(c_graph);
      auto res = ac::is_minimal(d, effective_budget());
      json out = {{"minimal", res.verdict == ac::MinimalityResult::Verdict::minimal
                                  ? "true"
                                  : (res.verdict == ac::MinimalityResult::Verdict::not_minimal ? "false"
                                                                                               : "unknown")}};
      if (res.witness)
        out["witness"] = {{"base", ac::to_json(res.witness->base)}, {"map", ac::to_json(res.witness->map)}};
      emit(out);
      switch (res.verdict) {
        case ac::MinimalityResult::Verdict::minimal: return 0;
        case ac::MinimalityResult::Verdict::not_minimal: return 1;
        default: return 2;
      }
    }
    if (l_enum->parsed()) {
      auto base = load_digraph_ref(l_base);
      auto en = ac::enumerate_lifts(base, l_sheets, l_simple, l_connected, effective_budget());
      json arr = json::array();
      for (const auto& g : en.lifts) arr.push_back(ac::to_json(g));
      emit(json{{"lifts", arr}, {"complete", en.complete}, {"assignments", en.assignments}});
      return en.complete ? 0 : 2;
    }
    if (l_iso->parsed()) {
      auto a = load_digraph_ref(l_a);
      auto b = load_digraph_ref(l_b);
      auto map = ac::find_isomorphism(a, b);
      if (map) {
        emit(json{{"isomorphic", true}, {"mapping", *map}});
        return 0;
      }
      emit(json{{"isomorphic", false}});
      return 1;
    }
    if (f_tree->parsed() || f_topo->parsed()) {
      auto g = load_ugraph_ref(f_graph);
      auto verdict = f_tree->parsed() ? ac::spanning_tree_feasible(g, effective_budget())
                                      : ac::topology_recognition_feasible(g, effective_budget());
      emit(verdict.to_json());
      std::cerr << (f_tree->parsed() ? "spanning-tree" : "topology") << ": "
                << ac::to_string(verdict.decision) << " (" << ac::to_string(verdict.reason) << ")\n";
      return verdict.exit_code();
    }
    if (yk_cmd->parsed()) {
      auto g = load_ugraph_ref(yk_graph);
      auto res = ac::yk_sufficient_condition(g, effective_budget());
      emit(res.to_json());
      switch (res.status) {
        case ac::YkResult::Status::holds: return 0;
        case ac::YkResult::Status::fails: return 1;
        default: return 2;
      }
    }
    if (cx_cmd->parsed()) {
      if (!cx_verify.empty()) {
        auto a = load_ugraph_ref(cx_verify[0]);
        auto b = load_ugraph_ref(cx_verify[1]);
        auto pv = ac::verify_counterexample_pair(a, b, effective_budget());
        emit(pv.to_json());
        if (pv.is_counterexample()) return 0;
        return pv.is_unknown() ? 2 : 1;
      }
      auto report = ac::counterexample_search(cx_degree, cx_max_n, effective_budget());
      emit(report.to_json());
      if (!report.complete) return 2;
      return report.pairs.empty() ? 1 : 0;
    }
    if (sim_cmd->parsed()) {
      ac::SimConfig cfg;
      cfg.net = ported_net(s_graph, {s_ports, s_port_seed});
      cfg.protocol = s_protocol;
      cfg.seed = s_seed;
      cfg.scheduler = ac::scheduler_from_string(s_scheduler);
      cfg.n_known = s_know_n >= 0 ? s_know_n : cfg.net.n;
      cfg.params = json::parse(s_params);
      cfg.step_cap = s_steps;
      return run_simulation(cfg, s_trace, s_replay);
    }
    if (batch_cmd->parsed()) {
      json index = json::array();
      for (const auto& graph_ref : b_graphs) {
        for (std::uint64_t seed = b_seed_from; seed <= b_seed_to; ++seed) {
          ac::SimConfig cfg;
          cfg.net = ported_net(graph_ref, {b_ports, seed});
          cfg.protocol = b_protocol;
          cfg.seed = seed;
          cfg.scheduler = ac::scheduler_from_string(b_scheduler);
          cfg.n_known = cfg.net.n;
          auto result = ac::run(cfg);
          std::string stem = "run_" + std::to_string(index.size());
          write_file(b_out + "/" + stem + ".trace.jsonl", result.trace.to_jsonl());
          json cfg_json = {{"graph", graph_ref}, {"protocol", b_protocol}, {"seed", seed},
                           {"ports", b_ports}, {"scheduler", b_scheduler},
                           {"net", ac::to_json(cfg.net)}};
          write_file(b_out + "/" + stem + ".config.json", cfg_json.dump(2));
          json final_json = {{"final_states", result.final_states},
                             {"summary", ac::protocol_summary(b_protocol, cfg.net, result.final_states)}};
          write_file(b_out + "/" + stem + ".final.json", final_json.dump(2));
          index.push_back({{"run", stem}, {"graph", graph_ref}, {"seed", seed}});
        }
      }
      write_file(b_out + "/index.json", index.dump(2));
      emit(json{{"runs", index.size()}, {"out", b_out}});
      return 0;
    }
    if (bi_list->parsed()) {
      emit(json{{"names", ac::builtin_names()}});
      return 0;
    }
    if (bi_get->parsed()) {
      auto any = ac::builtin(bi_name);
      if (auto* u = std::get_if<ac::UGraph>(&any))
        emit(ac::to_json(*u));
      else
        emit(ac::to_json(std::get<ac::SymDigraph>(any)));
      return 0;
    }
  } catch (const ac::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
