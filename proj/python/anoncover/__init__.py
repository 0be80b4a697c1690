"""Coverings, lifts, feasibility verdicts and protocol simulation for
anonymous port-numbered networks.

Graphs are plain dicts in the same JSON shapes the CLI uses:
undirected ``{"n": 4, "edges": [[0, 1], ...]}`` and directed symmetric
``{"n": 2, "arcs": [{"id": 0, "s": 0, "t": 1, "sym": 1}, ...]}``.
"""

from ._core import (
    AnoncoverError,
    builtin,
    builtin_names,
    classify_morphism,
    counterexample_search,
    dir_graph,
    enumerate_bases,
    enumerate_lifts,
    is_isomorphic,
    is_minimal,
    simulate,
    spanning_tree_feasible,
    topology_recognition_feasible,
    validate,
    yk_check,
)

__all__ = [
    "AnoncoverError",
    "builtin",
    "builtin_names",
    "classify_morphism",
    "counterexample_search",
    "dir_graph",
    "enumerate_bases",
    "enumerate_lifts",
    "is_isomorphic",
    "is_minimal",
    "simulate",
    "spanning_tree_feasible",
    "topology_recognition_feasible",
    "validate",
    "yk_check",
]
