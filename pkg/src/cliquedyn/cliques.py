"""Maximal cliques and the clique graph operator with its iterates."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .actions import CoveringMap, GroupAction
from .graph import Graph, build_graph

DEFAULT_VERTEX_BUDGET = 2_000_000


class BudgetExceeded(RuntimeError):
    pass


class CliqueConsistencyError(RuntimeError):
    """An induced map sent a clique to something that is not a clique."""


def max_cliques(graph: Graph, limit: int | None = None) -> list[tuple[int, ...]]:
    """All maximal cliques, each sorted, in lexicographic order.

    Bron-Kerbosch with Tomita pivoting; the pivot is the vertex of P u X with
    the most neighbours in P, ties broken by the lowest id. Raises
    :class:`BudgetExceeded` once more than ``limit`` cliques are found.
    """
    adj = graph.adj
    out: list[tuple[int, ...]] = []

    def expand(r: list[int], p: set[int], x: set[int]) -> None:
        if not p:
            if not x:
                out.append(tuple(sorted(r)))
                if limit is not None and len(out) > limit:
                    raise BudgetExceeded(f"more than {limit} cliques")
            return
        pivot = min(p | x, key=lambda u: (-len(p & adj[u]), u))
        for v in sorted(p - adj[pivot]):
            nv = adj[v]
            r.append(v)
            expand(r, p & nv, x & nv)
            r.pop()
            p.discard(v)
            x.add(v)

    # each maximal clique is reported once, from its least vertex
    for v in range(graph.vertex_count):
        nv = adj[v]
        expand([v], {w for w in nv if w > v}, {w for w in nv if w < v})
    out.sort()
    return out


@dataclass(frozen=True, eq=False)
class CliqueGraphResult:
    graph: Graph
    cliques: tuple[tuple[int, ...], ...]
    host_size: int

    @cached_property
    def index(self) -> dict[tuple[int, ...], int]:
        return {q: i for i, q in enumerate(self.cliques)}

    @cached_property
    def membership(self) -> tuple[tuple[int, ...], ...]:
        """Clique ids containing each host vertex."""
        member: list[list[int]] = [[] for _ in range(self.host_size)]
        for i, q in enumerate(self.cliques):
            for v in q:
                member[v].append(i)
        return tuple(tuple(m) for m in member)

    def clique_of(self, vertices: Iterable[int]) -> int | None:
        return self.index.get(tuple(sorted(set(vertices))))


def clique_graph(graph: Graph, limit: int | None = None) -> CliqueGraphResult:
    cliques = max_cliques(graph, limit)
    member: list[list[int]] = [[] for _ in range(graph.vertex_count)]
    for i, q in enumerate(cliques):
        for v in q:
            member[v].append(i)
    edges = set()
    for ids in member:
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                edges.add((ids[a], ids[b]))
    return CliqueGraphResult(build_graph(len(cliques), edges), tuple(cliques), graph.vertex_count)


@dataclass
class IterationResult:
    levels: list[CliqueGraphResult] = field(default_factory=list)
    budget_hit: bool = False

    def sizes(self) -> list[int]:
        return [lvl.graph.vertex_count for lvl in self.levels]


def iterate_clique_graph(
    graph: Graph, n: int, vertex_budget: int = DEFAULT_VERTEX_BUDGET
) -> IterationResult:
    """``[kG, k^2 G, ..., k^n G]``, stopping early (flagged) once a level would exceed the budget."""
    if n < 0:
        raise ValueError("n must be non-negative")
    result = IterationResult()
    current = graph
    for _ in range(n):
        try:
            kg = clique_graph(current, limit=vertex_budget)
        except BudgetExceeded:
            result.budget_hit = True
            break
        result.levels.append(kg)
        current = kg.graph
    return result


def induced_clique_action(action: GroupAction, kg: CliqueGraphResult) -> GroupAction:
    """The action on cliques by elementwise image."""
    gens = []
    for g in action.generators:
        perm = []
        for q in kg.cliques:
            j = kg.clique_of(g[v] for v in q)
            if j is None:
                raise CliqueConsistencyError(f"image of clique {q} is not a clique")
            perm.append(j)
        gens.append(tuple(perm))
    return GroupAction(tuple(gens), action.cap)


def map_pk(p: CoveringMap, kg_cover: CliqueGraphResult, kg_base: CliqueGraphResult) -> CoveringMap:
    """The induced map on clique graphs, sending a clique to its elementwise image.

    Where ``p`` is only asserted on an interior, cover cliques whose closed
    neighbourhood is not interior are mapped when possible but excluded from
    the asserted region; a non-clique image there maps to ``-1``.
    """
    vmap = []
    interior = None if p.interior is None else set()
    for i, q in enumerate(kg_cover.cliques):
        j = kg_base.clique_of(p(v) for v in q)
        safe = p.interior is None or p.source.closed_neighbourhood_of_set(q) <= p.interior
        if j is None:
            if safe:
                raise CliqueConsistencyError(f"image of cover clique {q} is not a maximal clique")
            j = -1
        if interior is not None and safe:
            interior.add(i)
        vmap.append(j)
    return CoveringMap(
        kg_cover.graph, kg_base.graph, tuple(vmap), None if interior is None else frozenset(interior)
    )
