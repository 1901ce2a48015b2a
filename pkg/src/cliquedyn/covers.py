"""Walk homotopy, triangular covering maps, universal-cover development and quotients."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Any, Hashable, Iterable, Sequence

from .actions import CoveringMap, GroupAction, TranslationAction, _UnionFind
from .cliques import CliqueGraphResult
from .graph import Graph, GraphError, build_graph

Walk = tuple[int, ...]

MOVE_KINDS = ("triangle_insert", "triangle_remove", "deadend_insert", "deadend_remove")
DEFAULT_REDUCE_BUDGET = 100_000


class MoveError(ValueError):
    pass


class CoverError(ValueError):
    pass


def is_walk(graph: Graph, w: Sequence[int]) -> bool:
    if not w:
        return False
    return all(graph.has_edge(w[i], w[i + 1]) for i in range(len(w) - 1))


# ---------------------------------------------------------------------------
# elementary moves


@dataclass(frozen=True)
class ElementaryMove:
    kind: str
    position: int
    inserted_vertex: int | None = None

    def __post_init__(self):
        if self.kind not in MOVE_KINDS:
            raise MoveError(f"unknown move kind {self.kind!r}")

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind, "position": self.position}
        if self.inserted_vertex is not None:
            out["inserted_vertex"] = self.inserted_vertex
        return out


def apply_move(graph: Graph, w: Sequence[int], move: ElementaryMove) -> Walk:
    """Apply one elementary move; the endpoints of the walk never change.

    ``position`` is the index ``i`` of the affected walk vertex: removals delete
    ``w[i]`` (and ``w[i + 1]`` for a dead end), insertions go right after ``w[i]``.
    """
    w = tuple(w)
    i, v, kind = move.position, move.inserted_vertex, move.kind
    if kind == "triangle_remove":
        if not 0 < i < len(w) - 1:
            raise MoveError("triangle_remove needs an inner position")
        a, b, c = w[i - 1], w[i], w[i + 1]
        if not (graph.has_edge(a, b) and graph.has_edge(b, c) and graph.has_edge(a, c)):
            raise MoveError(f"{a}, {b}, {c} are not pairwise adjacent")
        return w[:i] + w[i + 1:]
    if kind == "triangle_insert":
        if not 0 <= i < len(w) - 1:
            raise MoveError("triangle_insert needs a walk edge after the position")
        a, c = w[i], w[i + 1]
        if v is None or not (graph.has_edge(a, c) and graph.has_edge(a, v) and graph.has_edge(v, c)):
            raise MoveError(f"inserted vertex {v} does not span a triangle with {a}, {c}")
        return w[:i + 1] + (v,) + w[i + 1:]
    if kind == "deadend_remove":
        if not 0 < i < len(w) - 1:
            raise MoveError("deadend_remove needs an inner position")
        if w[i - 1] != w[i + 1]:
            raise MoveError(f"w[{i - 1}] != w[{i + 1}], no dead end to remove")
        return w[:i] + w[i + 2:]
    # deadend_insert
    if not 0 <= i < len(w):
        raise MoveError("deadend_insert position out of range")
    if v is None or not graph.has_edge(w[i], v):
        raise MoveError(f"inserted vertex {v} is not adjacent to {w[i]}")
    return w[:i + 1] + (v, w[i]) + w[i + 1:]


def _moves(graph: Graph, w: Walk) -> list[ElementaryMove]:
    """Applicable moves, removals first."""
    out = []
    adj = graph.adj
    for i in range(1, len(w) - 1):
        if w[i - 1] == w[i + 1]:
            out.append(ElementaryMove("deadend_remove", i))
        elif w[i + 1] in adj[w[i - 1]]:
            out.append(ElementaryMove("triangle_remove", i))
    for i in range(len(w) - 1):
        for v in sorted(adj[w[i]] & adj[w[i + 1]]):
            out.append(ElementaryMove("triangle_insert", i, v))
    for i in range(len(w)):
        for v in graph.adjacency[w[i]]:
            out.append(ElementaryMove("deadend_insert", i, v))
    return out


@dataclass(frozen=True)
class ReduceResult:
    trivial: bool
    final: Walk
    moves: tuple[ElementaryMove, ...]
    expanded: int


def reduce_walk(graph: Graph, w: Sequence[int], budget: int = DEFAULT_REDUCE_BUDGET) -> ReduceResult:
    """Search for a move sequence turning the closed walk ``w`` into a trivial one.

    Best-first on (length, walk), so removals are tried before the walk grows.
    A success carries the move list as a certificate; otherwise the shortest
    walk seen is returned.
    """
    w = tuple(w)
    if not is_walk(graph, w) or w[0] != w[-1]:
        raise MoveError("reduce_walk needs a closed walk")
    parent: dict[Walk, tuple[Walk, ElementaryMove] | None] = {w: None}
    heap = [(len(w), w)]
    best = w
    expanded = 0
    while heap and expanded < budget:
        _, cur = heapq.heappop(heap)
        expanded += 1
        if (len(cur), cur) < (len(best), best):
            best = cur
        if len(cur) == 1:
            break
        for mv in _moves(graph, cur):
            nxt = apply_move(graph, cur, mv)
            if nxt not in parent:
                parent[nxt] = (cur, mv)
                heapq.heappush(heap, (len(nxt), nxt))
    moves = []
    node = best
    while parent[node] is not None:
        prev, mv = parent[node]  # type: ignore[misc]
        moves.append(mv)
        node = prev
    moves.reverse()
    return ReduceResult(len(best) == 1, best, tuple(moves), expanded)


def replay_moves(graph: Graph, w: Sequence[int], moves: Iterable[ElementaryMove]) -> Walk:
    cur = tuple(w)
    for mv in moves:
        cur = apply_move(graph, cur, mv)
    return cur


# ---------------------------------------------------------------------------
# covering maps


@dataclass(frozen=True)
class CoverReport:
    ok: bool
    checked: int
    restricted: bool
    witness: int | None = None
    reason: str = ""


def is_covering_map(p: CoveringMap) -> CoverReport:
    """Homomorphism plus a bijection ``N[v] -> N[p(v)]`` preserving edges both ways.

    Only the vertices of ``p.interior`` are checked when it is set.
    """
    src, dst = p.source, p.target
    if len(p.vertex_map) != src.vertex_count:
        return CoverReport(False, 0, p.interior is not None, None, "vertex map has the wrong length")
    checked = p.checked_vertices()
    for v in checked:
        pv = p(v)
        if not 0 <= pv < dst.vertex_count:
            return CoverReport(False, 0, p.interior is not None, v, "image outside the target")
        nb = src.neighbourhood(v, closed=True)
        image = [p(x) for x in nb]
        if any(not (0 <= y < dst.vertex_count) for y in image):
            return CoverReport(False, 0, p.interior is not None, v, "image outside the target")
        for x in src.adjacency[v]:
            if not dst.has_edge(pv, p(x)):
                return CoverReport(False, 0, p.interior is not None, v, "not a homomorphism")
        if len(set(image)) != len(image) or set(image) != set(dst.neighbourhood(pv, closed=True)):
            return CoverReport(False, 0, p.interior is not None, v, "closed neighbourhood not mapped bijectively")
        for a in range(len(nb)):
            for b in range(a + 1, len(nb)):
                if src.has_edge(nb[a], nb[b]) != dst.has_edge(image[a], image[b]):
                    return CoverReport(False, 0, p.interior is not None, v, "edges not preserved both ways")
    return CoverReport(True, len(checked), p.interior is not None)


def _lift_step(p: CoveringMap, x: int, target: int) -> int:
    hits = [y for y in p.source.adjacency[x] if p(y) == target]
    if len(hits) != 1:
        raise CoverError(f"no unique lift of {target} next to source vertex {x}")
    return hits[0]


def lift_walk(p: CoveringMap, w: Sequence[int], start: int) -> Walk:
    """The source walk over ``w`` starting at ``start``."""
    if not w:
        raise CoverError("empty walk")
    if p(start) != w[0]:
        raise CoverError(f"p({start}) = {p(start)} is not the walk start {w[0]}")
    out = [start]
    for t in w[1:]:
        out.append(_lift_step(p, out[-1], t))
    return tuple(out)


def lift_triangle(p: CoveringMap, tri: Sequence[int], u_tilde: int) -> tuple[int, int, int]:
    a, b, c = tri
    t = p.target
    if not (t.has_edge(a, b) and t.has_edge(b, c) and t.has_edge(a, c)):
        raise CoverError(f"{tuple(tri)} is not a triangle")
    pu = p(u_tilde)
    if pu not in (a, b, c):
        raise CoverError(f"p({u_tilde}) = {pu} is not a corner of the triangle")
    x, y = [v for v in (a, b, c) if v != pu]
    xt, yt = _lift_step(p, u_tilde, x), _lift_step(p, u_tilde, y)
    if not p.source.has_edge(xt, yt):
        raise CoverError("lifted corners are not adjacent")
    return tuple(sorted((u_tilde, xt, yt)))  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# universal cover by neighbourhood development


class _Development:
    def __init__(self, graph: Graph):
        self.g = graph
        self.proj: list[int] = []
        self.link: list[dict[int, int]] = []
        self.uf = _UnionFind(0)
        self.pending: list[tuple[int, int]] = []

    def new(self, v: int) -> int:
        self.proj.append(v)
        self.link.append({})
        self.uf.parent.append(len(self.uf.parent))
        return len(self.proj) - 1

    def find(self, x: int) -> int:
        return self.uf.find(x)

    def set_link(self, x: int, c: int, y: int) -> None:
        x, y = self.find(x), self.find(y)
        if self.proj[y] != c:
            raise CoverError("development conflict: projection mismatch")
        old = self.link[x].get(c)
        if old is None:
            self.link[x][c] = y
        elif self.find(old) != y:
            self.pending.append((old, y))

    def settle(self) -> None:
        while self.pending:
            a, b = self.pending.pop()
            a, b = self.find(a), self.find(b)
            if a == b:
                continue
            if self.proj[a] != self.proj[b]:
                raise CoverError("development conflict: merging vertices over different points")
            keep, drop = min(a, b), max(a, b)
            self.uf.parent[drop] = keep
            moved = self.link[drop]
            self.link[drop] = {}
            for c, y in moved.items():
                self.set_link(keep, c, y)

    def complete(self, x: int) -> list[int]:
        """Fill in the whole link of ``x``; returns newly created vertices."""
        x = self.find(x)
        v = self.proj[x]
        cycle = self.g.neighbourhood_cycle(v)
        created = []
        for c in cycle:
            if c not in self.link[x]:
                y = self.new(c)
                created.append(y)
                self.link[x][c] = y
        d = len(cycle)
        for i in range(d):
            c, c2 = cycle[i], cycle[(i + 1) % d]
            x = self.find(x)
            y, y2 = self.find(self.link[x][c]), self.find(self.link[x][c2])
            self.set_link(y, v, x)
            self.set_link(y2, v, x)
            self.set_link(y, c2, y2)
            self.set_link(y2, c, y)
            self.settle()
        x = self.find(x)
        images = {self.find(y) for y in self.link[x].values()}
        if len(images) != d or x in images:
            raise CoverError("development conflict: link map is not injective")
        return created


@dataclass(frozen=True, eq=False)
class DevelopedCover:
    graph: Graph
    cover: CoveringMap
    base: int
    closed: bool


def develop_universal_cover(graph: Graph, radius: int, base: int = 0) -> DevelopedCover:
    """Ball of ``radius`` around a lift of ``base`` in the universal triangular cover.

    Vertices are completed (their full cyclic neighbourhood glued in) in BFS
    order up to distance ``radius - 1``. Forced identifications are merged; a
    merge of vertices over different host points is a conflict. ``closed`` is
    set when every vertex got completed, i.e. the cover is finite and equals
    the returned graph.
    """
    lc = graph.is_locally_cyclic()
    if not lc.ok:
        raise GraphError(f"host is not locally cyclic (vertex {lc.witness})")
    if lc.min_degree < 4:
        raise GraphError("host has a vertex of degree below 4")
    if radius < 1:
        raise ValueError("radius must be >= 1")
    dev = _Development(graph)
    root = dev.new(base)
    dist = {root: 0}
    queue = [root]
    done: set[int] = set()
    head = 0
    while head < len(queue):
        x = dev.find(queue[head])
        head += 1
        if x in done or dist.get(x, radius) >= radius:
            continue
        created = dev.complete(x)
        done.add(dev.find(x))
        dx = dist[x]
        for y in created:
            dist[y] = dx + 1
        # representatives can change after merges
        for y in list(dev.link[dev.find(x)].values()):
            y = dev.find(y)
            if dist.get(y, radius + 1) > dx + 1:
                dist[y] = dx + 1
            queue.append(y)
        done = {dev.find(z) for z in done}
    reps = sorted({dev.find(z) for z in range(len(dev.proj))})
    index = {r: i for i, r in enumerate(reps)}
    edges = set()
    for r in reps:
        for y in dev.link[r].values():
            y = dev.find(y)
            edges.add((min(index[r], index[y]), max(index[r], index[y])))
    g = build_graph(len(reps), sorted(edges))
    # final distances from the base in the developed ball
    bdist = g.bfs_distances([index[dev.find(root)]])
    keep = sorted(v for v, d in bdist.items() if d <= radius)
    ball, old = g.induced_subgraph(keep)
    vmap = tuple(dev.proj[reps[o]] for o in old)
    done_ids = {index[dev.find(z)] for z in done}
    interior = frozenset(i for i, o in enumerate(old) if o in done_ids and bdist[o] < radius)
    closed = len(done_ids) == len(reps)
    cover = CoveringMap(ball, graph, vmap, None if closed else interior)
    return DevelopedCover(ball, cover, old.index(index[dev.find(root)]), closed)


# ---------------------------------------------------------------------------
# quotients and Galois checks


@dataclass(frozen=True, eq=False)
class QuotientResult:
    quotient: Graph
    projection: tuple[int, ...]
    keys: tuple[Hashable, ...]
    loops: int


def _keys(graph: Graph, action: Any) -> list[Hashable]:
    if isinstance(action, GroupAction):
        action.elements()  # enforces the closure cap
        return list(action.orbit_keys())
    return list(action.orbit_keys(graph))


def quotient_graph(
    graph: Graph, action: Any, representatives: Iterable[int] | None = None
) -> QuotientResult:
    """Orbit graph; two orbits are adjacent when they contain adjacent vertices.

    With ``representatives`` only edges at those vertices are used, which is
    how a finite window stands in for an infinite host. Edges inside one orbit
    are dropped and counted in ``loops``.
    """
    keys = _keys(graph, action)
    order = sorted(set(keys))
    oid = {k: i for i, k in enumerate(order)}
    proj = tuple(oid[k] for k in keys)
    reps = None if representatives is None else set(representatives)
    edges = set()
    loops = 0
    for u, v in graph.edges():
        if reps is not None and u not in reps and v not in reps:
            continue
        a, b = proj[u], proj[v]
        if a == b:
            loops += 1
        else:
            edges.add((min(a, b), max(a, b)))
    return QuotientResult(build_graph(len(order), sorted(edges), order), proj, tuple(order), loops)


@dataclass(frozen=True)
class GaloisReport:
    ok: bool
    fibres_are_orbits: bool
    deck: bool
    witness: Any = None


def is_galois(p: CoveringMap, action: Any) -> GaloisReport:
    """Fibres of ``p`` are exactly the orbits, and ``p o gamma = p`` for every generator."""
    src = p.source
    keys = _keys(src, action)
    by_key: dict[Hashable, int] = {}
    by_image: dict[int, Hashable] = {}
    fibres_ok, witness = True, None
    for v in range(src.vertex_count):
        k, pv = keys[v], p(v)
        if by_key.setdefault(k, pv) != pv or by_image.setdefault(pv, k) != k:
            fibres_ok, witness = False, v
            break
    deck_ok = True
    if isinstance(action, GroupAction):
        for g in action.generators:
            bad = next((v for v in range(src.vertex_count) if p(g[v]) != p(v)), None)
            if bad is not None:
                deck_ok = False
                witness = witness if witness is not None else bad
                break
    elif isinstance(action, TranslationAction):
        for vec in action.generators:
            for v in range(src.vertex_count):
                w = action.apply(src, vec, v)
                if w is not None and p(w) != p(v):
                    deck_ok = False
                    witness = witness if witness is not None else v
                    break
    return GaloisReport(fibres_ok and deck_ok, fibres_ok, deck_ok, witness)


# ---------------------------------------------------------------------------
# walks in clique graphs, simple connectivity of surfaces


def corresponding_walk(kg: CliqueGraphResult, w: Sequence[int]) -> Walk:
    """Host walk following a closed walk of cliques; picks the least vertex of each overlap."""
    if not w or w[0] != w[-1]:
        raise MoveError("corresponding_walk needs a closed walk")
    if len(w) == 1:
        return (min(kg.cliques[w[0]]),)
    picks = []
    for i in range(1, len(w)):
        common = set(kg.cliques[w[i - 1]]) & set(kg.cliques[w[i]])
        if not common:
            raise MoveError(f"cliques {w[i - 1]} and {w[i]} do not meet")
        picks.append(min(common))
    seq = [picks[-1]] + picks
    out = [seq[0]]
    for v in seq[1:]:
        if v != out[-1]:
            out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class TscReport:
    tsc: bool
    chi: int


def is_tsc_locally_cyclic(graph: Graph) -> TscReport:
    """Simple connectivity of a closed triangulated surface: the sphere is the one with chi = 2."""
    if not graph.is_locally_cyclic().ok:
        raise GraphError("graph is not locally cyclic")
    if not graph.is_connected():
        raise GraphError("graph is not connected")
    if not graph.is_closed_surface():
        raise GraphError("some edge does not lie in exactly two triangles")
    chi = graph.euler_characteristic()
    return TscReport(chi == 2, chi)
