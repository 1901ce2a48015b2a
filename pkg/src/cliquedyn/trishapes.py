"""Triangular-shaped subgraphs and the geometric clique graph G_n.

A shape of side ``m`` is the image of a chart ``Delta_m -> G`` sending grid
edges to host edges injectively. Charts are found by fixing an oriented
triangle ``(a, b, c)`` of the host and developing row by row: row ``r`` of the
chart holds the template points ``(m - r, j, r - j)``, and every new point is a
common neighbour of two already placed points that is not yet used. On a
locally cyclic host the extension is forced; elsewhere all choices are tried.

Two shapes are the same when they have the same side and vertex set.
"""

from __future__ import annotations

import math
import os
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .graph import Graph, build_graph
from .hexgeo import (
    DeltaTemplate,
    HexCoord,
    LatticeTriangle,
    WindowSpec,
    hex_distance,
    triangles_in_box,
)

GAP = 6
DEFAULT_MARGIN = GAP + 4
TYPES = (-6, -4, -2, 0, 2, 4, 6)


class ShapeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TriShape:
    """A triangular-shaped subgraph with one chart.

    ``chart[i]`` is the host vertex of ``DeltaTemplate(side).base_coords[i]``.
    """

    side: int
    chart: tuple[int, ...]
    orientation: int = 1
    host: Graph | None = field(default=None, repr=False)

    @cached_property
    def key(self) -> tuple[int, frozenset[int]]:
        return (self.side, frozenset(self.chart))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TriShape) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    @property
    def vertices(self) -> frozenset[int]:
        return self.key[1]

    @cached_property
    def vertex_set(self) -> tuple[int, ...]:
        return tuple(sorted(self.vertices))

    @property
    def anchor(self) -> int:
        return self.vertex_set[0]

    def image(self, coord: HexCoord) -> int:
        return self.chart[DeltaTemplate(self.side).index[coord]]

    def images(self, coords: Iterable[HexCoord]) -> frozenset[int]:
        idx = DeltaTemplate(self.side).index
        return frozenset(self.chart[idx[c]] for c in coords)

    @cached_property
    def boundary(self) -> frozenset[int]:
        t = DeltaTemplate(self.side)
        return frozenset(v for c, v in zip(t.base_coords, self.chart) if 0 in c)

    @cached_property
    def interior(self) -> frozenset[int]:
        """``S`` minus its boundary."""
        return self.vertices - self.boundary

    @cached_property
    def closed_nbhd(self) -> frozenset[int]:
        return self._host().closed_neighbourhood_of_set(self.chart)

    @cached_property
    def core(self) -> frozenset[int]:
        """``S`` minus the closed host neighbourhood of its boundary."""
        return self.vertices - self._host().closed_neighbourhood_of_set(self.boundary)

    def _host(self) -> Graph:
        if self.host is None:
            raise ShapeError("shape carries no host graph")
        return self.host

    def corner_subtriangle(self, e: int) -> frozenset[int]:
        """Vertex set of the side ``m - 1`` sub-triangle at corner ``e`` (0, 1, 2)."""
        m = self.side
        return self.images(c for c in DeltaTemplate(m).base_coords if c[e] >= 1)


# ---------------------------------------------------------------------------
# enumeration


def _positions(rows: int) -> list[tuple[int, int]]:
    """Placement order: rows top-down, each row's inner points first, then its two ends."""
    order = [(0, 0), (1, 0), (1, 1)]
    for r in range(2, rows):
        order += [(r, j) for j in range(1, r)] + [(r, 0), (r, r)]
    return order


@dataclass(frozen=True)
class _Plan:
    positions: tuple[tuple[int, int], ...]
    # for each position: two placed neighbours forming a triangle with it, then the rest
    anchors: tuple[tuple[int, int], ...]
    extras: tuple[tuple[int, ...], ...]
    # chart order for side m: template index -> position index
    chart_order: dict[int, tuple[int, ...]]


_PLANS: dict[int, _Plan] = {}


def _plan(max_side: int) -> _Plan:
    if max_side in _PLANS:
        return _PLANS[max_side]
    positions = _positions(max_side + 1)
    where = {p: i for i, p in enumerate(positions)}
    anchors, extras = [], []
    for i, (r, j) in enumerate(positions):
        if i < 3:
            anchors.append((-1, -1))
            extras.append(())
            continue
        nbrs = [(r - 1, j - 1), (r - 1, j), (r, j - 1), (r, j + 1)]
        placed = [where[q] for q in nbrs if q in where and where[q] < i]
        if 0 < j < r:
            pair = (where[(r - 1, j - 1)], where[(r - 1, j)])
        elif j == 0:
            pair = (where[(r - 1, 0)], where[(r, 1)])
        else:
            pair = (where[(r - 1, r - 1)], where[(r, r - 1)])
        anchors.append(pair)
        extras.append(tuple(q for q in placed if q not in pair))
    chart_order = {}
    for m in range(max_side + 1):
        order = []
        for a, b, c in DeltaTemplate(m).base_coords:
            r = m - a
            order.append(where[(r, b)])
        chart_order[m] = tuple(order)
    plan = _Plan(tuple(positions), tuple(anchors), tuple(extras), chart_order)
    _PLANS[max_side] = plan
    return plan


def _develop(
    adj: Sequence[frozenset[int]],
    seed: tuple[int, int, int],
    plan: _Plan,
    max_side: int,
    parity: int,
) -> Iterator[tuple[int, tuple[int, ...]]]:
    """All charts grown from ``seed``; yields ``(side, chart)`` for each completed row."""
    total = (max_side + 1) * (max_side + 2) // 2
    done_rows = {(r + 1) * (r + 2) // 2: r for r in range(1, max_side + 1) if r % 2 == parity}
    anchors, extras = plan.anchors, plan.extras
    assign: list[int] = list(seed) + [-1] * (total - 3)
    used = set(seed)
    iters: list[Iterator[int]] = []
    k, push = 3, True
    while True:
        if push:
            side = done_rows.get(k)
            if side is not None:
                yield side, tuple(assign[i] for i in plan.chart_order[side])
            if k < total:
                p, q = anchors[k]
                cands = (adj[assign[p]] & adj[assign[q]]) - used
                ex = extras[k]
                if ex:
                    cands = [c for c in cands if all(assign[e] in adj[c] for e in ex)]
                iters.append(iter(sorted(cands)))
        if not iters:
            return
        top = 2 + len(iters)
        if assign[top] >= 0:
            used.discard(assign[top])
            assign[top] = -1
        nxt = next(iters[-1], None)
        if nxt is None:
            iters.pop()
            push = False
            continue
        assign[top] = nxt
        used.add(nxt)
        k = top + 1
        push = True


def _seeds(graph: Graph) -> list[tuple[int, int, int]]:
    # one of the two mirror charts per corner suffices: (a, b, c) with b < c
    out = []
    for t in graph.triangles:
        for a in t:
            b, c = [x for x in t if x != a]
            out.append((a, b, c))
    out.sort()
    return out


def _orientation(graph: Graph, seed: Sequence[int]) -> int:
    labels = graph.labels
    if labels is None or not isinstance(labels[0], tuple) or len(labels[0]) != 3:
        return 1
    a, b, c = (labels[v] for v in seed)
    db = [b[i] - a[i] for i in range(3)]
    dc = [c[i] - a[i] for i in range(3)]
    if max(map(abs, db + dc)) > 1:
        return 1  # steps wrap around a torus
    return 1 if any(db[i] == -1 and dc[i] == -1 for i in range(3)) else -1


def _enumerate_chunk(
    graph: Graph, seeds: Sequence[tuple[int, int, int]], max_side: int, parity: int
) -> list[tuple[int, tuple[int, ...], int]]:
    plan = _plan(max(max_side, 1))
    adj = graph.adj
    seen: set[tuple[int, frozenset[int]]] = set()
    out = []
    for seed in seeds:
        orient = None
        for side, chart in _develop(adj, seed, plan, max_side, parity):
            key = (side, frozenset(chart))
            if key in seen:
                continue
            seen.add(key)
            if orient is None:
                orient = _orientation(graph, seed)
            out.append((side, chart, orient))
    return out


def worker_count() -> int:
    env = os.environ.get("CLIQUE_DYN_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def enumerate_trishapes(
    graph: Graph, max_side: int, parity: int, workers: int | None = None
) -> list[TriShape]:
    """All shapes of side ``m <= max_side`` with ``m % 2 == parity``.

    Sorted by side, then by sorted vertex tuple. Each chart is the first one
    found, seeds taken in lexicographic order.
    """
    if max_side < 0:
        raise ValueError("max_side must be non-negative")
    parity %= 2
    found: list[tuple[int, tuple[int, ...], int]] = []
    if parity == 0:
        found += [(0, (v,), 1) for v in graph.vertices()]
    if max_side >= 1:
        seeds = _seeds(graph)
        workers = workers or worker_count()
        if workers > 1 and len(seeds) > 1000:
            size = -(-len(seeds) // workers)
            chunks = [seeds[i:i + size] for i in range(0, len(seeds), size)]
            with ProcessPoolExecutor(workers) as pool:
                parts = list(pool.map(_enumerate_chunk, [graph] * len(chunks), chunks,
                                      [max_side] * len(chunks), [parity] * len(chunks)))
        else:
            parts = [_enumerate_chunk(graph, seeds, max_side, parity)]
        seen: set[tuple[int, frozenset[int]]] = set()
        for part in parts:
            for side, chart, orient in part:
                key = (side, frozenset(chart))
                if key not in seen:
                    seen.add(key)
                    found.append((side, chart, orient))
    shapes = [TriShape(side, chart, orient, graph) for side, chart, orient in found]
    shapes.sort(key=lambda s: (s.side, s.vertex_set))
    return shapes


# ---------------------------------------------------------------------------
# adjacency


def adjacency_test(s1: TriShape, s2: TriShape, graph: Graph | None = None) -> int | None:
    """Type of ``s2`` as a neighbour of ``s1`` (``side(s2) - side(s1)``), or ``None``."""
    host = graph if graph is not None else s1.host
    if s1.host is not None and s2.host is not None and s1.host is not s2.host:
        raise ShapeError("shapes come from different hosts")
    if host is None:
        raise ShapeError("no host graph given")
    if s1 == s2:
        raise ShapeError("a shape is not adjacent to itself")
    gap = s2.side - s1.side
    small, big = (s1, s2) if gap >= 0 else (s2, s1)
    s = abs(gap)
    if s == 0:
        ok = s1.vertices <= host.closed_neighbourhood_of_set(s2.chart)
    elif s == 2:
        ok = small.vertices < big.vertices
    elif s == 4:
        ok = small.vertices <= big.interior
    elif s == 6:
        ok = small.vertices == big.vertices - host.closed_neighbourhood_of_set(big.boundary)
    else:
        ok = False
    return gap if ok else None


@dataclass(frozen=True, eq=False)
class GeoCliqueGraph:
    level: int
    host: Graph
    shapes: tuple[TriShape, ...]
    graph: Graph
    # (i, j) with i < j -> side(j) - side(i)
    edge_types: dict[tuple[int, int], int]

    @cached_property
    def index(self) -> dict[tuple[int, frozenset[int]], int]:
        return {s.key: i for i, s in enumerate(self.shapes)}

    def id_of(self, shape: TriShape | tuple[int, Iterable[int]]) -> int:
        key = shape.key if isinstance(shape, TriShape) else (shape[0], frozenset(shape[1]))
        try:
            return self.index[key]
        except KeyError:
            raise ShapeError(f"unknown shape {key[0]}:{sorted(key[1])}") from None

    @cached_property
    def by_anchor(self) -> dict[tuple[int, int], list[int]]:
        """Shape ids keyed by (side, least vertex)."""
        return _anchor_index(self.shapes)

    def shapes_near(self, side: int, vertices: Iterable[int]) -> list[int]:
        """Ids of the side-``side`` shapes whose least vertex lies in ``vertices``."""
        out = []
        for v in vertices:
            out += self.by_anchor.get((side, v), [])
        return sorted(out)

    def find(self, side: int, vertices: Iterable[int]) -> int | None:
        return self.index.get((side, frozenset(vertices)))

    def edge_type(self, i: int, j: int) -> int | None:
        """Type of shape ``j`` as a neighbour of shape ``i``."""
        if i < j:
            return self.edge_types.get((i, j))
        t = self.edge_types.get((j, i))
        return None if t is None else -t

    def sides(self) -> Counter:
        return Counter(s.side for s in self.shapes)


def _anchor_index(shapes: Sequence[TriShape]) -> dict[tuple[int, int], list[int]]:
    out: dict[tuple[int, int], list[int]] = {}
    for i, s in enumerate(shapes):
        out.setdefault((s.side, s.anchor), []).append(i)
    return out


def geo_clique_graph(graph: Graph, n: int, workers: int | None = None) -> GeoCliqueGraph:
    """G_n over ``graph``: shapes of side ``<= n`` and parity ``n``, with the four adjacency rules."""
    if n < 0:
        raise ValueError("level must be non-negative")
    if graph.vertex_count and graph.rim() == frozenset(range(graph.vertex_count)):
        warnings.warn("host has no vertex with a cyclic neighbourhood", stacklevel=2)
    elif graph.vertex_count and graph.is_locally_cyclic().ok and min(graph.degrees()) < 6:
        warnings.warn("host has minimum degree below 6", stacklevel=2)
    shapes = enumerate_trishapes(graph, n, n % 2, workers)
    index = {s.key: i for i, s in enumerate(shapes)}
    by_anchor = _anchor_index(shapes)

    types: dict[tuple[int, int], int] = {}
    for i, s in enumerate(shapes):
        m = s.side
        nb = s.closed_nbhd
        for v in nb:
            for j in by_anchor.get((m, v), ()):
                if j > i and shapes[j].vertices <= nb:
                    types[(i, j)] = 0
        for gap, pool in ((2, s.vertices), (4, s.interior if m >= 4 else ())):
            for v in pool:
                for j in by_anchor.get((m - gap, v), ()):
                    t = shapes[j]
                    if (t.vertices < s.vertices) if gap == 2 else (t.vertices <= pool):
                        a, b = min(i, j), max(i, j)
                        types[(a, b)] = shapes[b].side - shapes[a].side
        if m >= GAP:
            j = index.get((m - GAP, s.core))
            if j is not None:
                a, b = min(i, j), max(i, j)
                types[(a, b)] = shapes[b].side - shapes[a].side
    g = build_graph(len(shapes), types.keys())
    return GeoCliqueGraph(n, graph, tuple(shapes), g, types)


def neighbour_type_profile(gcg: GeoCliqueGraph, shape: TriShape | int) -> dict[int, int]:
    i = shape if isinstance(shape, int) else gcg.id_of(shape)
    if not 0 <= i < len(gcg.shapes):
        raise ShapeError(f"unknown shape id {i}")
    counts = Counter(gcg.edge_type(i, j) for j in gcg.graph.adjacency[i])
    return {t: counts[t] for t in sorted(counts)}


# ---------------------------------------------------------------------------
# census and the invariant D


@dataclass(frozen=True)
class Deg26Census:
    deg26: frozenset[int]
    not26: frozenset[int]
    excluded: frozenset[int]
    boundary_margin: int

    def classifiable(self) -> frozenset[int]:
        # a grid census also classifies excluded shapes, as targets only
        return (self.deg26 | self.not26) - self.excluded


def rim_distances(graph: Graph) -> dict[int, int] | None:
    """Host distance of every vertex to the rim; ``None`` when there is no rim."""
    rim = graph.rim()
    if not rim:
        return None
    return graph.bfs_distances(rim)


def shape_rim_distance(shape: TriShape, dist: dict[int, int] | None) -> float:
    if dist is None:
        return math.inf
    return min(dist.get(v, math.inf) for v in shape.chart)


def deg26_census(gcg: GeoCliqueGraph, margin: int = DEFAULT_MARGIN) -> Deg26Census:
    """Split shapes at host distance ``>= margin`` from the rim by whether their degree is 26."""
    dist = rim_distances(gcg.host)
    deg26, not26, excluded = set(), set(), set()
    for i, s in enumerate(gcg.shapes):
        if shape_rim_distance(s, dist) < margin:
            excluded.add(i)
        elif gcg.graph.degree(i) == 26:
            deg26.add(i)
        else:
            not26.add(i)
    return Deg26Census(frozenset(deg26), frozenset(not26), frozenset(excluded), margin)


def is_grid_graph(graph: Graph) -> bool:
    """Whether the host is labelled by height-0 grid points with unit-step edges."""
    labels = graph.labels
    if labels is None or not all(isinstance(c, tuple) and len(c) == 3 and sum(c) == 0 for c in labels):
        return False
    return all(hex_distance(labels[u], labels[v]) == 1 for u, v in graph.edges())


def grid_census(gcg: GeoCliqueGraph, margin: int = DEFAULT_MARGIN) -> Deg26Census:
    """Census of a grid window's ``G_n`` by degrees in the whole grid.

    Shapes near the rim keep their true class and count as targets; only the
    split into classifiable and excluded probes uses ``margin``. The grid is
    translation invariant, so the degree depends on side and orientation only.
    """
    if not is_grid_graph(gcg.host):
        raise ShapeError("host is not a window of the triangular grid")
    model = LatticeGn(gcg.level)
    seen: dict[tuple[int, int], int] = {}
    dist = rim_distances(gcg.host)
    deg26, not26, excluded = set(), set(), set()
    for i, s in enumerate(gcg.shapes):
        t = lattice_triangle_of(s)
        key = (t.side, t.orientation)
        if key not in seen:
            seen[key] = model.degree(t)
        (deg26 if seen[key] == 26 else not26).add(i)
        if shape_rim_distance(s, dist) < margin:
            excluded.add(i)
    return Deg26Census(frozenset(deg26), frozenset(not26), frozenset(excluded), margin)


@dataclass(frozen=True)
class DReport:
    distances: dict[int, float]
    maximum: float
    not26_empty: bool


def invariant_D(gcg: GeoCliqueGraph, probes: Iterable[int], census: Deg26Census | None = None) -> DReport:
    """BFS distance in G_n from every probe to the not-26 set, and their maximum."""
    census = census or deg26_census(gcg)
    probes = sorted(set(probes))
    if not census.not26:
        return DReport({p: math.inf for p in probes}, math.inf if probes else 0, True)
    dist = gcg.graph.bfs_distances(census.not26)
    out = {p: dist.get(p, math.inf) for p in probes}
    return DReport(out, max(out.values(), default=0), False)


def has_plus6(gcg: GeoCliqueGraph, i: int) -> bool:
    return any(gcg.edge_type(i, j) == GAP for j in gcg.graph.adjacency[i])


# ---------------------------------------------------------------------------
# lattice model: G_n on a grid window by coordinate arithmetic


def lattice_triangle_of(shape: TriShape) -> LatticeTriangle:
    """The coordinate box of a shape on a host labelled by height-0 grid points."""
    labels = shape._host().labels
    pts = [labels[v] for v in shape.chart]  # type: ignore[index]
    lo = tuple(min(p[i] for p in pts) for i in range(3))
    hi = tuple(max(p[i] for p in pts) for i in range(3))
    return LatticeTriangle(lo, hi)  # type: ignore[arg-type]


class LatticeGn:
    """G_n of a grid window, evaluated lazily on :class:`LatticeTriangle` values.

    Only the neighbourhoods actually visited are computed, which keeps large
    levels (``n = 48``) tractable. ``window=None`` stands for the whole grid.
    """

    def __init__(self, level: int, window: WindowSpec | None = None):
        if level < 0:
            raise ValueError("level must be non-negative")
        self.level = level
        self.window = window
        self._cache: dict[LatticeTriangle, tuple[tuple[LatticeTriangle, int], ...]] = {}

    def is_vertex(self, t: LatticeTriangle) -> bool:
        m = t.side
        if m < 0 or m > self.level or (self.level - m) % 2:
            return False
        return self.window is None or t.inside_window(self.window)

    def rim_distance(self, t: LatticeTriangle) -> float:
        if self.window is None:
            return math.inf
        w = self.window
        return w.radius - max(hex_distance(c, w.center) for c in t.corners())

    def _candidates(self, t: LatticeTriangle) -> Iterator[tuple[LatticeTriangle, int]]:
        m, lo, hi = t.side, t.lo, t.hi
        lo1 = tuple(x - 1 for x in lo)
        hi1 = tuple(x + 1 for x in hi)
        for u in triangles_in_box(m, lo_min=lo1, hi_max=hi1):  # type: ignore[arg-type]
            if u != t:
                yield u, 0
        if m >= 2:
            for u in triangles_in_box(m - 2, lo_min=lo, hi_max=hi):
                yield u, -2
        if m >= 4:
            inner = t.interior()
            for u in triangles_in_box(m - 4, lo_min=inner.lo, hi_max=inner.hi):
                yield u, -4
        if m >= 6:
            yield t.core(), -6
        for u in triangles_in_box(m + 2, lo_max=lo, hi_min=hi):
            yield u, 2
        for u in triangles_in_box(m + 4, lo_max=lo1, hi_min=hi1):  # type: ignore[arg-type]
            if u.interior().contains(t):
                yield u, 4
        for u in (LatticeTriangle.up(tuple(x - 2 for x in lo), m + 6),  # type: ignore[arg-type]
                  LatticeTriangle.down(tuple(x + 2 for x in hi), m + 6)):  # type: ignore[arg-type]
            if u.is_valid() and u.core() == t:
                yield u, 6

    def neighbours(self, t: LatticeTriangle) -> tuple[tuple[LatticeTriangle, int], ...]:
        got = self._cache.get(t)
        if got is None:
            found = {u: ty for u, ty in self._candidates(t) if self.is_vertex(u)}
            got = tuple(sorted(found.items()))
            self._cache[t] = got
        return got

    def degree(self, t: LatticeTriangle) -> int:
        return len(self.neighbours(t))

    def profile(self, t: LatticeTriangle) -> dict[int, int]:
        counts = Counter(ty for _, ty in self.neighbours(t))
        return {k: counts[k] for k in sorted(counts)}

    def distance_to_not26(
        self, start: LatticeTriangle, margin: int = DEFAULT_MARGIN, max_depth: int = 8
    ) -> tuple[float, list[LatticeTriangle], list[int]]:
        """BFS from ``start`` to the nearest classifiable shape of degree other than 26.

        Returns the distance, the not-26 shapes of the first layer that has any,
        and the layer sizes.
        """
        if not self.is_vertex(start):
            raise ShapeError("start is not a vertex of this G_n")

        def hit(u: LatticeTriangle) -> bool:
            return self.rim_distance(u) >= margin and self.degree(u) != 26

        seen = {start}
        layer = [start]
        sizes = [1]
        for depth in range(max_depth + 1):
            witnesses = sorted(u for u in layer if hit(u))
            if witnesses:
                return depth, witnesses, sizes
            nxt = []
            for u in layer:
                for w, _ in self.neighbours(u):
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            if not nxt:
                break
            layer = nxt
            sizes.append(len(nxt))
        return math.inf, [], sizes


def shape_of_triangle(gcg: GeoCliqueGraph, t: LatticeTriangle) -> int | None:
    """Id of the shape of ``gcg`` covering the coordinate triangle ``t``."""
    idx = gcg.host.label_index
    try:
        verts = [idx[p] for p in t.points()]
    except KeyError:
        return None
    return gcg.find(t.side, verts)
