"""Static program analysis: weak acyclicity and stratification."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

import networkx as nx

from ..errors import ContractViolation, NotStratifiable
from .syntax import Program

Position = tuple[str, int]  # (predicate, 1-based argument index)


@dataclass(frozen=True)
class Edge:
    source: Position
    target: Position
    special: bool

    def __str__(self):
        arrow = "=>" if self.special else "->"
        return f"({self.source[0]},{self.source[1]}) {arrow} ({self.target[0]},{self.target[1]})"


@dataclass(frozen=True)
class WeakAcyclicity:
    weakly_acyclic: bool
    cycle: tuple[Edge, ...] = ()

    def __bool__(self):
        return self.weakly_acyclic

    def __str__(self):
        if self.weakly_acyclic:
            return "weakly acyclic"
        return "not weakly acyclic; cycle: " + ", ".join(map(str, self.cycle))


def position_graph(program: Program) -> nx.MultiDiGraph:
    """Dependency graph over argument positions; edges carry ``special``."""
    g = nx.MultiDiGraph()
    for pred, n in program.arities.items():
        g.add_nodes_from((pred, i) for i in range(1, n + 1))
    for rule in program.rules:
        head = rule.head
        ex_positions = [(head.predicate, j + 1) for j, a in enumerate(head.args)
                        if a in rule.existential_vars]
        for x in rule.frontier:
            head_positions = [(head.predicate, j + 1) for j, a in enumerate(head.args) if a == x]
            for lit in rule.body:
                for i, a in enumerate(lit.atom.args):
                    if a != x:
                        continue
                    p = (lit.atom.predicate, i + 1)
                    for q in head_positions:
                        if not g.has_edge(p, q, key=False):
                            g.add_edge(p, q, key=False, special=False)
                    for q in ex_positions:
                        if not g.has_edge(p, q, key=True):
                            g.add_edge(p, q, key=True, special=True)
    return g


def check_weak_acyclicity(program: Program) -> WeakAcyclicity:
    g = position_graph(program)
    special = sorted((u, v) for u, v, k in g.edges(keys=True) if k)
    if not special:
        return WeakAcyclicity(True)
    simple = nx.DiGraph(g)
    for u, v in special:
        if u == v:
            return WeakAcyclicity(False, (Edge(u, v, True),))
        try:
            path = nx.shortest_path(simple, v, u)
        except nx.NetworkXNoPath:
            continue
        cycle = [Edge(u, v, True)]
        for a, b in zip(path, path[1:]):
            cycle.append(Edge(a, b, g.has_edge(a, b, key=True) and not g.has_edge(a, b, key=False)))
        return WeakAcyclicity(False, tuple(cycle))
    return WeakAcyclicity(True)


# -- stratification --------------------------------------------------------

@dataclass(frozen=True)
class StratificationResult:
    """Strata ``Π₁..Πₙ`` (1-based ``level`` of each intensional predicate)."""

    strata: tuple[tuple, ...]
    level: dict = field(compare=False)

    @property
    def n(self) -> int:
        return len(self.strata)

    def programs(self) -> list[Program]:
        return [Program(s) for s in self.strata]


def predicate_graph(program: Program) -> nx.DiGraph:
    """Edges head -> body predicate; ``strict`` when under a unary operator."""
    g = nx.DiGraph()
    for rule in program.rules:
        h = rule.head.predicate
        g.add_node(h)
        for lit in rule.body:
            b = lit.atom.predicate
            strict = lit.op is not None
            if g.has_edge(h, b):
                g[h][b]["strict"] = g[h][b]["strict"] or strict
            else:
                g.add_edge(h, b, strict=strict)
    return g


def _idb_condensation(program: Program):
    idb = program.idb()
    g = predicate_graph(program).subgraph(idb).copy()
    for comp in nx.strongly_connected_components(g):
        for u in comp:
            for v in g.successors(u):
                if v in comp and g[u][v]["strict"]:
                    path = nx.shortest_path(g, v, u) if v != u else [u]
                    raise NotStratifiable([u] + path)
    return g, nx.condensation(g)


def _levels(program: Program) -> dict[str, int]:
    g, cond = _idb_condensation(program)
    members = cond.graph["mapping"]
    level_of_comp: dict[int, int] = {}
    # successors are dependencies, so process the reversed topological order
    for c in reversed(list(nx.topological_sort(cond))):
        lvl = 1
        for u in cond.nodes[c]["members"]:
            for v in g.successors(u):
                dc = members[v]
                if dc == c:
                    continue
                need = level_of_comp[dc] + (1 if g[u][v]["strict"] else 0)
                lvl = max(lvl, need)
        level_of_comp[c] = lvl
    return {p: level_of_comp[members[p]] for p in g.nodes}


def _result(program: Program, level: dict[str, int]) -> StratificationResult:
    n = max(level.values(), default=1)
    strata = tuple(
        tuple(r for r in program.rules if level[r.head.predicate] == i)
        for i in range(1, n + 1))
    return StratificationResult(strata, dict(level))


def compute_stratification(program: Program) -> StratificationResult:
    """Minimal-level stratification of a program without existential rules."""
    if program.uses_existentials:
        raise ContractViolation("stratification is defined for programs without existential variables")
    if not program.rules:
        return StratificationResult(((),), {})
    return _result(program, _levels(program))


def is_stratifiable(program: Program) -> tuple[bool, Optional[StratificationResult]]:
    """Stratifiability check that also accepts existential programs."""
    if not program.rules:
        return True, StratificationResult(((),), {})
    try:
        return True, _result(program, _levels(program))
    except NotStratifiable:
        return False, None


def alternative_stratifications(program: Program, limit: int = 8) -> Iterator[StratificationResult]:
    """Finest stratifications, one per topological order of the condensation.

    Each strongly connected component of intensional predicates gets its own
    stratum, in a dependency-respecting order.  Yields at most ``limit``.
    """
    if program.uses_existentials:
        raise ContractViolation("stratification is defined for programs without existential variables")
    g, cond = _idb_condensation(program)
    if not program.rules:
        return
    members = cond.graph["mapping"]
    # reverse edges: dependencies first
    order_graph = cond.reverse(copy=True)
    for k, order in enumerate(nx.all_topological_sorts(order_graph)):
        if k >= limit:
            return
        comp_level = {c: i + 1 for i, c in enumerate(order)}
        yield _result(program, {p: comp_level[members[p]] for p in g.nodes})


def count_topological_orders(program: Program, cap: int = 2) -> int:
    g, cond = _idb_condensation(program)
    n = 0
    for _ in nx.all_topological_sorts(cond.reverse(copy=True)):
        n += 1
        if n >= cap:
            break
    return n


def is_semipositive(program: Program) -> bool:
    idb = program.idb()
    return all(lit.atom.predicate not in idb
               for r in program.rules for lit in r.body if lit.op is not None)
