// pybind11 bindings: the main operations, exchanging graphs and reports as
// plain python dicts/lists (the same JSON shapes the CLI uses).

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "anoncover/canonical.hpp"
#include "anoncover/feasibility.hpp"
#include "anoncover/graph.hpp"
#include "anoncover/lifts.hpp"
#include "anoncover/protocols.hpp"
#include "anoncover/sim.hpp"

namespace py = pybind11;
namespace ac = anoncover;
using ac::json;

namespace {

py::object to_py(const json& j) {
  py::module_ pyjson = py::module_::import("json");
  return pyjson.attr("loads")(j.dump());
}

json to_json(const py::object& obj) {
  py::module_ pyjson = py::module_::import("json");
  return json::parse(pyjson.attr("dumps")(obj).cast<std::string>());
}

ac::SymDigraph digraph_from(const py::object& obj) {
  auto any = ac::load_graph_json(to_json(obj));
  if (auto* d = std::get_if<ac::SymDigraph>(&any)) return *d;
  return ac::dir(std::get<ac::UGraph>(any));
}

ac::UGraph ugraph_from(const py::object& obj) {
  auto any = ac::load_graph_json(to_json(obj));
  if (auto* u = std::get_if<ac::UGraph>(&any)) return *u;
  throw ac::Error("an undirected graph is required");
}

ac::SymDigraph ported_digraph_from(const py::object& obj, const std::string& ports,
                                   std::uint64_t port_seed) {
  json j = to_json(obj);
  auto any = ac::load_graph_json(j);
  if (auto* d = std::get_if<ac::SymDigraph>(&any))
    return d->has_ports() ? *d : ac::with_canonical_outports(*d);
  const auto& g = std::get<ac::UGraph>(any);
  if (ports == "random") return ac::dir(g, ac::assign_ports_random(g, port_seed));
  if (auto file_ports = ac::parse_ports(j, g)) return ac::dir(g, *file_ports);
  return ac::dir(g, ac::assign_ports_canonical(g));
}

json run_result_json(const ac::SimConfig& cfg, const ac::RunResult& r) {
  json events = json::array();
  for (const auto& e : r.trace.events) events.push_back(e.to_json());
  return json{{"final_states", r.final_states},
              {"summary", ac::protocol_summary(cfg.protocol, cfg.net, r.final_states)},
              {"trace", std::move(events)},
              {"final_digest", r.final_digest},
              {"messages_sent", r.messages_sent},
              {"hit_step_cap", r.hit_step_cap}};
}

ac::SimConfig make_config(const py::object& graph, const std::string& protocol, std::uint64_t seed,
                          const std::string& scheduler, const std::string& ports,
                          std::uint64_t port_seed, py::object n_known, const py::object& params,
                          long step_cap) {
  ac::SimConfig cfg;
  cfg.net = ported_digraph_from(graph, ports, port_seed);
  cfg.protocol = protocol;
  cfg.seed = seed;
  cfg.scheduler = ac::scheduler_from_string(scheduler);
  cfg.n_known = n_known.is_none() ? std::optional<int>(cfg.net.n) : std::optional<int>(n_known.cast<int>());
  cfg.params = params.is_none() ? json::object() : to_json(params);
  cfg.step_cap = step_cap;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "coverings, lifts, feasibility and protocol simulation for anonymous networks";

  py::register_exception<ac::Error>(m, "AnoncoverError");

  m.def("builtin_names", &ac::builtin_names);
  m.def("builtin", [](const std::string& name) {
    auto any = ac::builtin(name);
    if (auto* u = std::get_if<ac::UGraph>(&any)) return to_py(ac::to_json(*u));
    return to_py(ac::to_json(std::get<ac::SymDigraph>(any)));
  });
  m.def("validate", [](const py::object& g) {
    auto any = ac::load_graph_json(to_json(g));
    ac::GraphMetrics gm =
        std::holds_alternative<ac::UGraph>(any) ? ac::metrics(std::get<ac::UGraph>(any))
                                                : ac::metrics(std::get<ac::SymDigraph>(any));
    return to_py(json{{"n", gm.n}, {"max_degree", gm.max_degree}, {"diameter", gm.diameter}});
  });
  m.def("dir_graph", [](const py::object& g, const std::string& ports, std::uint64_t port_seed) {
    return to_py(ac::to_json(ported_digraph_from(g, ports, port_seed)));
  }, py::arg("graph"), py::arg("ports") = "canonical", py::arg("port_seed") = 0);

  m.def("classify_morphism", [](const py::object& total, const py::object& base,
                                const std::vector<int>& vmap, const std::vector<int>& amap) {
    return to_py(ac::classify_morphism(digraph_from(total), digraph_from(base), vmap, amap).to_json());
  });
  m.def("enumerate_bases", [](const py::object& g, long budget) {
    ac::EnumerateOptions opt;
    opt.budget = budget;
    auto en = ac::enumerate_bases(digraph_from(g), opt);
    json arr = json::array();
    for (const auto& b : en.bases)
      arr.push_back({{"base", ac::to_json(b.base)}, {"map", ac::to_json(b.map)}, {"q", b.map.q}});
    return to_py(json{{"bases", arr}, {"complete", en.complete}});
  }, py::arg("graph"), py::arg("budget") = 10'000'000L);
  m.def("is_minimal", [](const py::object& g, long budget) {
    auto res = ac::is_minimal(digraph_from(g), budget);
    json out = {{"verdict", res.verdict == ac::MinimalityResult::Verdict::minimal
                                ? "minimal"
                                : (res.verdict == ac::MinimalityResult::Verdict::not_minimal
                                       ? "not-minimal"
                                       : "unknown")}};
    if (res.witness) out["witness"] = {{"base", ac::to_json(res.witness->base)}, {"map", ac::to_json(res.witness->map)}};
    return to_py(out);
  }, py::arg("graph"), py::arg("budget") = 10'000'000L);

  m.def("enumerate_lifts", [](const py::object& base, int sheets, bool simple, bool connected,
                              long budget) {
    auto en = ac::enumerate_lifts(digraph_from(base), sheets, simple, connected, budget);
    json arr = json::array();
    for (const auto& g : en.lifts) arr.push_back(ac::to_json(g));
    return to_py(json{{"lifts", arr}, {"complete", en.complete}});
  }, py::arg("base"), py::arg("sheets"), py::arg("simple") = false, py::arg("connected") = false,
     py::arg("budget") = 10'000'000L);
  m.def("is_isomorphic", [](const py::object& a, const py::object& b) {
    auto map = ac::find_isomorphism(digraph_from(a), digraph_from(b));
    return to_py(map ? json{{"isomorphic", true}, {"mapping", *map}} : json{{"isomorphic", false}});
  });

  m.def("spanning_tree_feasible", [](const py::object& g, long budget) {
    return to_py(ac::spanning_tree_feasible(ugraph_from(g), budget).to_json());
  }, py::arg("graph"), py::arg("budget") = 10'000'000L);
  m.def("topology_recognition_feasible", [](const py::object& g, long budget) {
    return to_py(ac::topology_recognition_feasible(ugraph_from(g), budget).to_json());
  }, py::arg("graph"), py::arg("budget") = 10'000'000L);
  m.def("yk_check", [](const py::object& g, long budget) {
    return to_py(ac::yk_sufficient_condition(ugraph_from(g), budget).to_json());
  }, py::arg("graph"), py::arg("budget") = 10'000'000L);
  m.def("counterexample_search", [](int degree, int max_n, long budget) {
    return to_py(ac::counterexample_search(degree, max_n, budget).to_json());
  }, py::arg("degree") = 3, py::arg("max_n") = 8, py::arg("budget") = 200'000'000L);

  m.def("simulate", [](const py::object& graph, const std::string& protocol, std::uint64_t seed,
                       const std::string& scheduler, const std::string& ports, std::uint64_t port_seed,
                       py::object n_known, py::object params, long step_cap) {
    auto cfg = make_config(graph, protocol, seed, scheduler, ports, port_seed, n_known, params, step_cap);
    return to_py(run_result_json(cfg, ac::run(cfg)));
  }, py::arg("graph"), py::arg("protocol"), py::arg("seed") = 0, py::arg("scheduler") = "random",
     py::arg("ports") = "canonical", py::arg("port_seed") = 0, py::arg("n_known") = py::none(),
     py::arg("params") = py::none(), py::arg("step_cap") = 1'000'000L);
}
