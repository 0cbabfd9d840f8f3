"""Causal DAGs, d-separation and stable-set enumeration.

Intervention variables are plain root nodes flagged on the graph.  A set Z is
*stable* for (intervention, target) when Z d-separates the two, which makes
P(target | Z) invariant across every shift the intervention node indexes.
"""
from __future__ import annotations

from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass, field
from itertools import combinations

from .errors import ConfigError, CyclicGraphError, EnumerationLimitError, UnknownNodeError

MAX_OBSERVED = 20


@dataclass(frozen=True)
class Dag:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    intervention_nodes: frozenset[str] = frozenset()
    observed_nodes: frozenset[str] | None = None
    parents: dict = field(init=False, repr=False, compare=False)
    children: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        nodes = tuple(dict.fromkeys(str(n) for n in self.nodes))
        edges = tuple(dict.fromkeys((str(a), str(b)) for a, b in self.edges))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        known = set(nodes)
        for a, b in edges:
            for n in (a, b):
                if n not in known:
                    raise UnknownNodeError(f"edge {a}->{b} references unknown node {n!r}")
        parents = {n: set() for n in nodes}
        children = {n: set() for n in nodes}
        for a, b in edges:
            parents[b].add(a)
            children[a].add(b)
        object.__setattr__(self, "parents", {n: frozenset(s) for n, s in parents.items()})
        object.__setattr__(self, "children", {n: frozenset(s) for n, s in children.items()})

        interventions = frozenset(self.intervention_nodes)
        for n in interventions:
            self._require(n)
            if parents[n]:
                raise ValueError(f"intervention node {n!r} must be a root")
        object.__setattr__(self, "intervention_nodes", interventions)
        observed = self.observed_nodes
        observed = frozenset(known - interventions) if observed is None else frozenset(observed)
        for n in observed:
            self._require(n)
        object.__setattr__(self, "observed_nodes", observed)
        self._check_acyclic()

    def _require(self, node: str) -> None:
        if node not in self.parents:
            raise UnknownNodeError(f"unknown node {node!r}")

    def _check_acyclic(self) -> None:
        indegree = {n: len(ps) for n, ps in self.parents.items()}
        queue = deque(n for n, d in indegree.items() if d == 0)
        seen = 0
        while queue:
            n = queue.popleft()
            seen += 1
            for c in self.children[n]:
                indegree[c] -= 1
                if indegree[c] == 0:
                    queue.append(c)
        if seen != len(self.nodes):
            cyclic = sorted(n for n, d in indegree.items() if d > 0)
            raise CyclicGraphError(f"graph has a directed cycle through {cyclic}")

    def ancestors(self, nodes: Iterable[str]) -> set[str]:
        """``nodes`` together with all of their ancestors."""
        out = set()
        stack = list(nodes)
        while stack:
            n = stack.pop()
            if n not in out:
                out.add(n)
                stack.extend(self.parents[n])
        return out


def parse_edge(text: str) -> tuple[str, str]:
    parts = [p.strip() for p in text.split("->")]
    if len(parts) != 2 or not all(parts):
        raise ConfigError(f"edge must look like 'A->B', got {text!r}")
    return parts[0], parts[1]


def from_config(cfg: dict) -> Dag:
    """Build a DAG from ``edges = ["A->B", ...]`` plus optional ``nodes``,
    ``interventions``, ``observed`` and ``latent`` lists."""
    unknown = set(cfg) - {"nodes", "edges", "interventions", "observed", "latent"}
    if unknown:
        raise ConfigError(f"unknown graph config keys: {sorted(unknown)}")
    edges = [parse_edge(e) for e in cfg.get("edges", [])]
    nodes = list(cfg.get("nodes", []))
    for a, b in edges:
        nodes += [a, b]
    interventions = frozenset(cfg.get("interventions", []))
    observed = cfg.get("observed")
    if observed is None:
        observed = set(nodes) - interventions - set(cfg.get("latent", []))
    return Dag(tuple(nodes), tuple(edges), interventions, frozenset(observed))


def load_graph(path) -> Dag:
    from .dgp import load_toml

    return from_config(load_toml(path))


def d_separated(dag: Dag, a: str, b: str, z: Iterable[str] = ()) -> bool:
    """True iff ``a`` and ``b`` are d-separated given ``z``.

    Reachability ("Bayes-ball") search over (node, direction) states; runs in
    time linear in the number of edges.
    """
    z = frozenset(z)
    for n in (a, b, *z):
        dag._require(n)
    if a in z or b in z:
        raise ValueError("query endpoints may not be in the conditioning set")
    if a == b:
        return False

    # colliders are open iff they are in An(z)
    open_colliders = dag.ancestors(z)
    # direction "up": arrived from a child; "down": arrived from a parent
    start = (a, "up")
    visited = {start}
    queue = deque([start])
    while queue:
        node, direction = queue.popleft()
        if node == b:
            return False
        nxt = []
        if direction == "up" and node not in z:
            nxt += [(p, "up") for p in dag.parents[node]]
            nxt += [(c, "down") for c in dag.children[node]]
        elif direction == "down":
            if node not in z:
                nxt += [(c, "down") for c in dag.children[node]]
            if node in open_colliders:
                nxt += [(p, "up") for p in dag.parents[node]]
        for state in nxt:
            if state not in visited:
                visited.add(state)
                queue.append(state)
    return True


@dataclass(frozen=True)
class StableSetReport:
    target: str
    intervention: str
    stable_sets: list[frozenset[str]]
    candidates_examined: int


def stable_sets(dag: Dag, intervention: str, target: str) -> StableSetReport:
    """All subsets Z of the observed nodes (minus the target) that d-separate
    ``intervention`` from ``target``, ordered by size and then lexically."""
    dag._require(intervention)
    dag._require(target)
    if intervention not in dag.intervention_nodes:
        raise ValueError(f"{intervention!r} is not an intervention node")
    if target not in dag.observed_nodes:
        raise ValueError(f"{target!r} is not an observed node")
    pool = sorted(dag.observed_nodes - {target, intervention})
    if len(pool) > MAX_OBSERVED:
        raise EnumerationLimitError(
            f"{len(pool)} candidate nodes exceeds the enumeration cap of {MAX_OBSERVED}"
        )
    found = []
    examined = 0
    for size in range(len(pool) + 1):
        for combo in combinations(pool, size):
            examined += 1
            if d_separated(dag, intervention, target, combo):
                found.append(frozenset(combo))
    return StableSetReport(target, intervention, found, examined)


def builtin(fig: str) -> Dag:
    """The two graphs of the setting: ``spurious_1a`` (V <- C -> Y, C latent)
    and ``causal_1b`` (V -> Y)."""
    if fig == "spurious_1a":
        return Dag(
            nodes=("C", "Y", "V", "X", "I_V"),
            edges=(("C", "Y"), ("C", "V"), ("I_V", "V"), ("V", "X"), ("Y", "X")),
            intervention_nodes=frozenset({"I_V"}),
            observed_nodes=frozenset({"X", "Y", "V"}),
        )
    if fig == "causal_1b":
        return Dag(
            nodes=("Y", "V", "X", "I_V"),
            edges=(("V", "Y"), ("V", "X"), ("Y", "X"), ("I_V", "V")),
            intervention_nodes=frozenset({"I_V"}),
            observed_nodes=frozenset({"X", "Y", "V"}),
        )
    raise ValueError(f"unknown builtin graph {fig!r}; expected 'spurious_1a' or 'causal_1b'")


def multi_covariate(m: int = 2) -> Dag:
    """Causal graph with covariates V1..Vm, each a parent of both Y and X,
    all shifted by a single intervention node."""
    vs = [f"V{i}" for i in range(1, m + 1)]
    edges = [("Y", "X")]
    for v in vs:
        edges += [("I_V", v), (v, "Y"), (v, "X")]
    return Dag(
        nodes=("Y", "X", *vs, "I_V"),
        edges=tuple(edges),
        intervention_nodes=frozenset({"I_V"}),
    )
