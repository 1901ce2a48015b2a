"""Finite simple graphs with dense integer vertex ids.

Graphs are immutable once built. Every set-valued result is returned sorted so
that runs are reproducible and easy to diff.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Any, Iterable, Sequence


class GraphError(ValueError):
    """Raised on malformed graph input or a violated precondition."""


@dataclass(frozen=True, eq=False)
class Graph:
    vertex_count: int
    adjacency: tuple[tuple[int, ...], ...]
    labels: tuple[Any, ...] | None = None

    def __post_init__(self):
        if len(self.adjacency) != self.vertex_count:
            raise GraphError("adjacency length does not match vertex_count")
        if self.labels is not None and len(self.labels) != self.vertex_count:
            raise GraphError("labels length does not match vertex_count")

    @cached_property
    def adj(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.adjacency)

    @property
    def n(self) -> int:
        return self.vertex_count

    def __len__(self) -> int:
        return self.vertex_count

    def __repr__(self) -> str:
        return f"Graph(vertices={self.vertex_count}, edges={self.edge_count})"

    def vertices(self) -> range:
        return range(self.vertex_count)

    @cached_property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.vertex_count) for v in self.adjacency[u] if u < v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def label(self, v: int) -> Any:
        return None if self.labels is None else self.labels[v]

    @cached_property
    def label_index(self) -> dict[Any, int]:
        if self.labels is None:
            raise GraphError("graph carries no labels")
        return {lab: v for v, lab in enumerate(self.labels)}

    def _check(self, v: int) -> None:
        if not 0 <= v < self.vertex_count:
            raise GraphError(f"invalid vertex id {v}")

    def neighbourhood(self, v: int, closed: bool = False) -> list[int]:
        self._check(v)
        nb = set(self.adjacency[v])
        if closed:
            nb.add(v)
        return sorted(nb)

    def closed_neighbourhood_of_set(self, vertices: Iterable[int]) -> frozenset[int]:
        out: set[int] = set()
        for v in vertices:
            out.add(v)
            out.update(self.adjacency[v])
        return frozenset(out)

    def distance(self, source: int, targets: Iterable[int]) -> float:
        """BFS distance from ``source`` to the nearest target; ``inf`` if none is reachable."""
        self._check(source)
        targets = set(targets)
        for t in targets:
            self._check(t)
        if not targets:
            return math.inf
        if source in targets:
            return 0
        dist = {source: 0}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for w in self.adjacency[u]:
                if w not in dist:
                    if w in targets:
                        return dist[u] + 1
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return math.inf

    def bfs_distances(self, sources: Iterable[int], limit: int | None = None) -> dict[int, int]:
        """Multi-source BFS; vertices farther than ``limit`` are omitted."""
        dist: dict[int, int] = {}
        queue: deque[int] = deque()
        for s in sources:
            if s not in dist:
                dist[s] = 0
                queue.append(s)
        while queue:
            u = queue.popleft()
            d = dist[u]
            if limit is not None and d >= limit:
                continue
            for w in self.adjacency[u]:
                if w not in dist:
                    dist[w] = d + 1
                    queue.append(w)
        return dist

    def is_connected(self) -> bool:
        if self.vertex_count == 0:
            return True
        return len(self.bfs_distances([0])) == self.vertex_count

    def induced_subgraph(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph on ``vertices``; returns it with the new-to-old id map."""
        keep = sorted(set(vertices))
        index = {v: i for i, v in enumerate(keep)}
        adjacency = tuple(
            tuple(sorted(index[w] for w in self.adjacency[v] if w in index)) for v in keep
        )
        labels = None if self.labels is None else tuple(self.labels[v] for v in keep)
        return Graph(len(keep), adjacency, labels), keep

    @cached_property
    def triangles(self) -> tuple[tuple[int, int, int], ...]:
        out = []
        adj = self.adj
        for u in range(self.vertex_count):
            higher = [w for w in self.adjacency[u] if w > u]
            for i, v in enumerate(higher):
                av = adj[v]
                for w in higher[i + 1:]:
                    if w in av:
                        out.append((u, v, w))
        return tuple(out)

    def common_neighbours(self, u: int, v: int) -> frozenset[int]:
        return self.adj[u] & self.adj[v]

    def neighbourhood_is_cycle(self, v: int) -> bool:
        """Whether the open neighbourhood of ``v`` induces one cycle of length >= 3."""
        nb = self.adjacency[v]
        if len(nb) < 3:
            return False
        nbset = self.adj[v]
        adj = self.adj
        for w in nb:
            if len(adj[w] & nbset) != 2:
                return False
        # 2-regular: connected iff a walk around it visits every vertex
        start = nb[0]
        prev, cur, steps = None, start, 0
        while True:
            a, b = sorted(adj[cur] & nbset)
            nxt = a if a != prev else b
            prev, cur = cur, nxt
            steps += 1
            if cur == start:
                break
        return steps == len(nb)

    def neighbourhood_cycle(self, v: int) -> list[int]:
        """Cyclic order of N(v), starting at its least vertex towards the smaller of the two choices."""
        if not self.neighbourhood_is_cycle(v):
            raise GraphError(f"neighbourhood of {v} is not a cycle")
        nbset = self.adj[v]
        start = self.adjacency[v][0]
        order = [start]
        prev, cur = None, start
        while True:
            a, b = sorted(self.adj[cur] & nbset)
            nxt = a if a != prev else b
            if nxt == start:
                break
            order.append(nxt)
            prev, cur = cur, nxt
        return order

    def rim(self) -> frozenset[int]:
        """Vertices whose neighbourhood is not a cycle (the boundary of a window host)."""
        return frozenset(v for v in range(self.vertex_count) if not self.neighbourhood_is_cycle(v))

    def is_locally_cyclic(self) -> "LocalCyclicity":
        if self.vertex_count == 0:
            raise GraphError("empty graph")
        witness = None
        for v in range(self.vertex_count):
            if not self.neighbourhood_is_cycle(v):
                witness = v
                break
        return LocalCyclicity(witness is None, min(self.degrees()), witness)

    def triangles_per_edge(self) -> dict[tuple[int, int], int]:
        return {(u, v): len(self.adj[u] & self.adj[v]) for u, v in self.edges()}

    def is_closed_surface(self) -> bool:
        """Every edge lies in exactly two triangles."""
        return all(c == 2 for c in self.triangles_per_edge().values())

    def euler_characteristic(self) -> int:
        if not self.is_locally_cyclic().ok:
            raise GraphError("euler_characteristic needs a locally cyclic graph")
        return self.vertex_count - self.edge_count + len(self.triangles)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"vertices": self.vertex_count, "edges": [list(e) for e in self.edges()]}
        if self.labels is not None:
            out["labels"] = {str(v): _jsonable(lab) for v, lab in enumerate(self.labels)}
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True)
class LocalCyclicity:
    ok: bool
    min_degree: int
    witness: int | None = None


def _jsonable(label: Any) -> Any:
    if isinstance(label, tuple):
        return [_jsonable(x) for x in label]
    return label


def _from_jsonable(label: Any) -> Any:
    if isinstance(label, list):
        return tuple(_from_jsonable(x) for x in label)
    return label


def build_graph(
    vertices: int,
    edges: Iterable[Sequence[int]],
    labels: Sequence[Any] | None = None,
) -> Graph:
    """Build a graph from a vertex count and an edge list; duplicate edges collapse."""
    if vertices < 0:
        raise GraphError("vertex count must be non-negative")
    nbrs: list[set[int]] = [set() for _ in range(vertices)]
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < vertices and 0 <= v < vertices):
            raise GraphError(f"edge {(u, v)} has an id outside 0..{vertices - 1}")
        if u == v:
            raise GraphError(f"self-loop {(u, v)}")
        nbrs[u].add(v)
        nbrs[v].add(u)
    adjacency = tuple(tuple(sorted(s)) for s in nbrs)
    return Graph(vertices, adjacency, None if labels is None else tuple(labels))


def graph_from_json(data: dict[str, Any]) -> Graph:
    n = int(data["vertices"])
    labels = None
    if data.get("labels") is not None:
        raw = data["labels"]
        if isinstance(raw, dict):
            labels = [None] * n
            for k, lab in raw.items():
                labels[int(k)] = _from_jsonable(lab)
        else:
            labels = [_from_jsonable(lab) for lab in raw]
    return build_graph(n, data.get("edges", []), labels)


def load_graph(path: str) -> Graph:
    with open(path) as fh:
        return graph_from_json(json.load(fh))


def save_graph(graph: Graph, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(graph.to_json(), fh, sort_keys=True)
        fh.write("\n")


def complete_graph(k: int) -> Graph:
    return build_graph(k, combinations(range(k), 2))


def cycle_graph(k: int) -> Graph:
    return build_graph(k, [(i, (i + 1) % k) for i in range(k)])


def path_graph(k: int) -> Graph:
    return build_graph(k, [(i, i + 1) for i in range(k - 1)])


def octahedron() -> Graph:
    antipodal = {(0, 3), (1, 4), (2, 5)}
    return build_graph(6, [e for e in combinations(range(6), 2) if e not in antipodal])


def icosahedron() -> Graph:
    # two poles, two staggered pentagons
    edges = []
    for i in range(5):
        a, b = 1 + i, 1 + (i + 1) % 5
        c, d = 6 + i, 6 + (i + 1) % 5
        edges += [(0, a), (a, b), (11, c), (c, d), (a, c), (b, c)]
    return build_graph(12, edges)


def disjoint_union(g: Graph, h: Graph) -> Graph:
    off = g.vertex_count
    edges = g.edges() + [(u + off, v + off) for u, v in h.edges()]
    return build_graph(g.vertex_count + h.vertex_count, edges)
