"""Permutation group actions on graphs (general and by lattice translations) and covering-map records."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Hashable, Sequence

from .graph import Graph
from .hexgeo import Lattice, add, axial_to_cube

CLOSURE_CAP = 10_000


class ActionError(ValueError):
    pass


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


@dataclass(frozen=True, eq=False)
class GroupAction:
    """A group generated by vertex permutations of a finite graph."""

    generators: tuple[tuple[int, ...], ...]
    cap: int = CLOSURE_CAP

    @classmethod
    def trivial(cls, n: int) -> "GroupAction":
        return cls((tuple(range(n)),))

    @property
    def degree(self) -> int:
        return len(self.generators[0]) if self.generators else 0

    def check_automorphisms(self, graph: Graph) -> int | None:
        """Index of the first generator that is not an automorphism, or ``None``."""
        for i, g in enumerate(self.generators):
            if sorted(g) != list(range(graph.vertex_count)):
                return i
            for u, v in graph.edges():
                if not graph.has_edge(g[u], g[v]):
                    return i
        return None

    def elements(self) -> list[tuple[int, ...]]:
        ident = tuple(range(self.degree))
        seen = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for a in frontier:
                for g in self.generators:
                    c = tuple(g[x] for x in a)
                    if c not in seen:
                        seen.add(c)
                        if len(seen) > self.cap:
                            raise ActionError(f"group closure exceeds cap {self.cap}")
                        nxt.append(c)
            frontier = nxt
        return sorted(seen)

    def orbit_keys(self, graph: Graph | None = None) -> list[int]:
        """Orbit of every vertex, named by its least member."""
        uf = _UnionFind(self.degree)
        for g in self.generators:
            for v, w in enumerate(g):
                uf.union(v, w)
        return [uf.find(v) for v in range(self.degree)]

    def orbits(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for v, k in enumerate(self.orbit_keys()):
            groups.setdefault(k, []).append(v)
        return [groups[k] for k in sorted(groups)]

    def to_json(self) -> dict[str, Any]:
        return {"generators": [list(g) for g in self.generators]}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "GroupAction":
        return cls(tuple(tuple(int(x) for x in g) for g in data["generators"]))


def compose(g: Sequence[int], h: Sequence[int]) -> tuple[int, ...]:
    """The permutation ``g o h`` (apply ``h`` first)."""
    return tuple(g[h[v]] for v in range(len(h)))


def invert(g: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(g)
    for v, w in enumerate(g):
        out[w] = v
    return tuple(out)


@dataclass(frozen=True, eq=False)
class TranslationAction:
    """Grid translations by a lattice, acting on a host labelled with height-0 coordinates.

    On a finite window the translations are only partial maps, so the action is
    described by orbit keys (coordinates reduced modulo the lattice) rather
    than by permutations.
    """

    lattice: Lattice

    @classmethod
    def from_basis(cls, basis: Sequence[Sequence[int]]) -> "TranslationAction":
        return cls(Lattice(basis))

    @property
    def generators(self) -> list[tuple[int, int]]:
        return list(self.lattice.generators)

    def key_of_coord(self, c: Sequence[int]) -> tuple[int, int, int]:
        return self.lattice.reduce_cube(c)

    def orbit_keys(self, graph: Graph) -> list[Hashable]:
        return [self.key_of_coord(lab) for lab in graph.labels]  # type: ignore[union-attr]

    def apply(self, graph: Graph, vec: Sequence[int], v: int) -> int | None:
        """Image of ``v`` under the translation by axial ``vec``; ``None`` if it leaves the host."""
        c = add(graph.labels[v], axial_to_cube(vec[0], vec[1]))  # type: ignore[index]
        return graph.label_index.get(c)


@dataclass(frozen=True, eq=False)
class CoveringMap:
    """A vertex map ``source -> target`` claimed to be a local isomorphism.

    ``interior`` restricts where the local-isomorphism property is asserted
    (rim vertices of finite windows lack full neighbourhoods); ``None`` means
    everywhere.
    """

    source: Graph
    target: Graph
    vertex_map: tuple[int, ...]
    interior: frozenset[int] | None = None

    def __call__(self, v: int) -> int:
        return self.vertex_map[v]

    def checked_vertices(self) -> list[int]:
        if self.interior is None:
            return list(self.source.vertices())
        return sorted(self.interior)

    def fibre(self, w: int) -> list[int]:
        return [v for v, x in enumerate(self.vertex_map) if x == w]


def identity_cover(graph: Graph) -> CoveringMap:
    return CoveringMap(graph, graph, tuple(range(graph.vertex_count)))


def projection_to_torus(window: Graph, torus) -> CoveringMap:
    """Coordinate projection of a lattice window onto a torus, asserted off the rim."""
    vmap = tuple(torus.vertex_of(lab) for lab in window.labels)  # type: ignore[union-attr]
    return CoveringMap(window, torus.graph, vmap, frozenset(range(window.vertex_count)) - window.rim())
