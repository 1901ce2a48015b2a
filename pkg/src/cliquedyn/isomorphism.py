"""Graph isomorphism search and the explicit map C_{n+1}: G_{n+1} -> kG_n, used by the structure check."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Hashable, Sequence

from .actions import GroupAction
from .cliques import CliqueGraphResult, clique_graph, iterate_clique_graph
from .covers import quotient_graph
from .graph import Graph, GraphError
from .hexgeo import NABLA1, Torus, WindowSpec, add, hex_window
from .trishapes import (
    DEFAULT_MARGIN,
    GeoCliqueGraph,
    TriShape,
    geo_clique_graph,
    lattice_triangle_of,
    rim_distances,
    shape_rim_distance,
)

ISO_CAP = 100_000


class IsoCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class IsoWitness:
    bijection: tuple[int, ...]


def is_isomorphism(g: Graph, h: Graph, phi: Sequence[int]) -> bool:
    """Independent check: ``phi`` is a bijection preserving adjacency both ways."""
    n = g.vertex_count
    if n != h.vertex_count or len(phi) != n or sorted(phi) != list(range(n)):
        return False
    if g.edge_count != h.edge_count:
        return False
    return all(h.has_edge(phi[u], phi[v]) for u, v in g.edges())


def is_equivariant(
    phi: Sequence[int], gens_g: Sequence[Sequence[int]], gens_h: Sequence[Sequence[int]]
) -> bool:
    return all(phi[g[v]] == h[phi[v]] for g, h in zip(gens_g, gens_h) for v in range(len(phi)))


class _Search:
    """Colour refinement on the disjoint union, then individualisation with backtracking."""

    def __init__(self, g: Graph, h: Graph, gens: list[tuple[Sequence[int], Sequence[int]]]):
        self.g, self.h = g, h
        self.n = g.vertex_count
        off = self.n
        self.adj = [g.adjacency[v] for v in g.vertices()] + [
            tuple(w + off for w in h.adjacency[v]) for v in h.vertices()
        ]
        self.gens = gens

    def refine(self, colors: list[int]) -> list[int]:
        adj = self.adj
        count = len(set(colors))
        while True:
            sig = [(colors[v], tuple(sorted(colors[u] for u in adj[v]))) for v in range(len(adj))]
            table = {s: i for i, s in enumerate(sorted(set(sig)))}
            new = [table[s] for s in sig]
            if len(table) == count:
                return new
            colors, count = new, len(table)

    def balanced(self, colors: list[int]) -> bool:
        n = self.n
        left: dict[int, int] = {}
        for c in colors[:n]:
            left[c] = left.get(c, 0) + 1
        for c in colors[n:]:
            if left.get(c, 0) == 0:
                return False
            left[c] -= 1
        return True

    def pairs(self, v: int, w: int, colors: list[int]) -> dict[int, int] | None:
        """The forced pairs ``g v -> h w`` for paired generators, or ``None`` on a clash."""
        n = self.n
        phi = {v: w}
        used = {w}
        todo = [(v, w)]
        while todo:
            x, y = todo.pop()
            for ga, hb in self.gens:
                x2, y2 = ga[x], hb[y]
                if x2 in phi:
                    if phi[x2] != y2:
                        return None
                    continue
                if y2 in used or colors[x2] != colors[n + y2]:
                    return None
                phi[x2] = y2
                used.add(y2)
                todo.append((x2, y2))
        return phi

    def run(self, colors: list[int]) -> tuple[int, ...] | None:
        colors = self.refine(colors)
        if not self.balanced(colors):
            return None
        n = self.n
        classes: dict[int, list[int]] = {}
        for v in range(n):
            classes.setdefault(colors[v], []).append(v)
        open_classes = [(len(vs), c) for c, vs in classes.items() if len(vs) > 1]
        if not open_classes:
            where = {colors[n + w]: w for w in range(self.h.vertex_count)}
            phi = tuple(where[colors[v]] for v in range(n))
            if not is_isomorphism(self.g, self.h, phi):
                return None
            if self.gens and not is_equivariant(phi, [a for a, _ in self.gens], [b for _, b in self.gens]):
                return None
            return phi
        _, c = min(open_classes)
        v = classes[c][0]
        for w in range(self.h.vertex_count):
            if colors[n + w] != c:
                continue
            forced = self.pairs(v, w, colors) if self.gens else {v: w}
            if forced is None:
                continue
            new = list(colors)
            fresh = max(colors) + 1
            for x, y in sorted(forced.items()):
                new[x] = fresh
                new[n + y] = fresh
                fresh += 1
            found = self.run(new)
            if found is not None:
                return found
        return None


def _start(g: Graph, h: Graph, cap: int) -> list[int] | None:
    if max(g.vertex_count, h.vertex_count) > cap:
        raise IsoCapExceeded(f"graph exceeds {cap} vertices")
    if g.vertex_count != h.vertex_count or g.edge_count != h.edge_count:
        return None
    if sorted(g.degrees()) != sorted(h.degrees()):
        return None
    return [0] * (g.vertex_count + h.vertex_count)


def are_isomorphic(g: Graph, h: Graph, cap: int = ISO_CAP) -> IsoWitness | None:
    colors = _start(g, h, cap)
    if colors is None:
        return None
    if g.vertex_count == 0:
        return IsoWitness(())
    phi = _Search(g, h, []).run(colors)
    return None if phi is None else IsoWitness(phi)


def are_gamma_isomorphic(
    g: Graph,
    h: Graph,
    action_g: GroupAction,
    action_h: GroupAction,
    pairing: Sequence[tuple[int, int]] | None = None,
    cap: int = ISO_CAP,
) -> IsoWitness | None:
    """An isomorphism with ``phi(a_i v) = b_j phi(v)`` for every paired ``(i, j)``."""
    if pairing is None:
        if len(action_g.generators) != len(action_h.generators):
            raise ValueError("generator lists differ in length and no pairing was given")
        pairing = [(i, i) for i in range(len(action_g.generators))]
    gens = [(action_g.generators[i], action_h.generators[j]) for i, j in pairing]
    colors = _start(g, h, cap)
    if colors is None:
        return None
    if g.vertex_count == 0:
        return IsoWitness(())
    phi = _Search(g, h, gens).run(colors)
    return None if phi is None else IsoWitness(phi)


# ---------------------------------------------------------------------------
# the explicit map C


SIDE0_PARTS = ("delta1", "delta3")
PARTS = ("M-1", "M+1", "M+3", "case")


@dataclass(frozen=True, eq=False)
class ExplicitCMap:
    upper: GeoCliqueGraph
    lower: GeoCliqueGraph
    # upper shape id -> part name -> lower shape ids
    parts: dict[int, dict[str, tuple[int, ...]]]
    # upper shapes where some part could not be formed (host rim or low degree)
    flagged: frozenset[int]
    # upper shapes far enough from the rim to be checked
    safe: frozenset[int]

    def image(self, i: int) -> frozenset[int]:
        return frozenset(x for ids in self.parts[i].values() for x in ids)

    def domain(self) -> list[int]:
        return sorted(self.safe - self.flagged)


def _corner_parts(s: TriShape, lower: GeoCliqueGraph) -> tuple[list[int], bool]:
    out, missing = [], False
    for e in range(3):
        j = lower.find(s.side - 1, s.corner_subtriangle(e))
        if j is None:
            missing = True
        else:
            out.append(j)
    return sorted(set(out)), missing


def _hat_extension(s: TriShape, host: Graph, lower: GeoCliqueGraph) -> int | None:
    """The side-2 shape whose middle triangle is the side-1 shape ``s``."""
    a, b, c = s.chart
    tips = []
    for x, y in ((a, b), (b, c), (a, c)):
        outside = host.common_neighbours(x, y) - s.vertices
        if len(outside) != 1:
            return None
        tips.append(next(iter(outside)))
    return lower.find(2, s.vertices | set(tips))


def explicit_C(
    upper: GeoCliqueGraph, lower: GeoCliqueGraph, host: Graph | None = None, margin: int = DEFAULT_MARGIN
) -> ExplicitCMap:
    """The clique ``C(S)`` of ``G_n`` for every shape ``S`` of ``G_{n+1}``."""
    host = host if host is not None else upper.host
    if upper.host is not lower.host or upper.host is not host:
        raise GraphError("both levels must be built over the same host")
    if upper.level != lower.level + 1:
        raise ValueError("levels must be consecutive")
    n = lower.level
    dist = rim_distances(host)
    parts: dict[int, dict[str, tuple[int, ...]]] = {}
    flagged, safe = set(), set()
    for i, s in enumerate(upper.shapes):
        if shape_rim_distance(s, dist) >= margin:
            safe.add(i)
        m = s.side
        if m == 0:
            v = s.chart[0]
            d1 = [j for j in lower.shapes_near(1, host.neighbourhood(v, closed=True)) if v in lower.shapes[j].vertices]
            ball = host.closed_neighbourhood_of_set(host.neighbourhood(v, closed=True))
            d3 = [j for j in lower.shapes_near(3, ball) if v in lower.shapes[j].interior]
            parts[i] = {"delta1": tuple(d1), "delta3": tuple(d3)}
            continue
        minus, missing = _corner_parts(s, lower)
        near = s.closed_nbhd
        plus1 = [
            j for j in lower.shapes_near(m + 1, near)
            if any(lower.shapes[j].corner_subtriangle(e) == s.vertices for e in range(3))
        ]
        far = host.closed_neighbourhood_of_set(near)
        plus3 = [j for j in lower.shapes_near(m + 3, far) if lower.shapes[j].interior == s.vertices]
        case: list[int] = []
        if m == 1:
            if n >= 2:
                j = _hat_extension(s, host, lower)
                if j is None:
                    missing = True
                else:
                    case = [j]
        elif m == 2:
            j = lower.find(1, s.images(NABLA1))
            if j is None:
                missing = True
            else:
                case = [j]
        else:
            j = lower.find(m - 3, s.interior)
            if j is None:
                missing = True
            else:
                case = [j]
        if missing:
            flagged.add(i)
        parts[i] = {"M-1": tuple(minus), "M+1": tuple(plus1), "M+3": tuple(plus3), "case": tuple(case)}
    return ExplicitCMap(upper, lower, parts, frozenset(flagged), frozenset(safe))


@dataclass
class VerifyCReport:
    maximal: bool = True
    injective: bool = True
    adjacency: bool = True
    sizes: bool = True
    checked: int = 0
    excluded: int = 0
    bijective: bool | None = None
    failures: list[tuple[str, int, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.maximal and self.injective and self.adjacency and self.sizes

    def fail(self, check: str, shape: int, detail: Any) -> None:
        setattr(self, check, False)
        if len(self.failures) < 50:
            self.failures.append((check, shape, detail))


def _expected_sizes(cmap: ExplicitCMap, i: int) -> dict[str, tuple[int, int]]:
    """Allowed (low, high) size per part."""
    n = cmap.lower.level
    s = cmap.upper.shapes[i]
    m = s.side
    if m == 0:
        deg = cmap.upper.host.degree(s.chart[0])
        if deg == 6 and n >= 3:
            d3 = (2, 2)
        elif deg >= 7 or n <= 2:
            d3 = (0, 0)
        else:
            d3 = (0, math.inf)
        return {"delta1": (deg, deg), "delta3": d3}  # type: ignore[dict-item]
    case = (0, 0) if (m == 1 and n <= 1) else (1, 1)
    return {
        "M-1": (3, 3),
        "M+1": (0, 0) if n == m else (0, 3),
        "M+3": (0, 0) if n <= m + 2 else (0, 1),
        "case": case,
    }


def verify_C(cmap: ExplicitCMap, kg_lower: CliqueGraphResult) -> VerifyCReport:
    """The four checks: maximal cliques, injectivity, adjacency both ways, part sizes."""
    rep = VerifyCReport()
    dom = cmap.domain()
    rep.checked = len(dom)
    rep.excluded = len(cmap.upper.shapes) - len(dom)
    lg = cmap.lower.graph
    clique_id: dict[int, int] = {}
    for i in dom:
        img = cmap.image(i)
        j = kg_lower.clique_of(img)
        if j is None:
            pair = next(((a, b) for a in img for b in img if a < b and not lg.has_edge(a, b)), None)
            if pair is not None:
                rep.fail("maximal", i, {"non_adjacent": pair})
            else:
                wit = next((q for q in kg_lower.cliques if img <= set(q)), None)
                rep.fail("maximal", i, {"contained_in": wit})
        else:
            clique_id[i] = j
        for part, (lo, hi) in _expected_sizes(cmap, i).items():
            size = len(cmap.parts[i][part])
            if not lo <= size <= hi:
                rep.fail("sizes", i, {part: size})
    seen: dict[int, int] = {}
    for i, j in clique_id.items():
        if j in seen:
            rep.fail("injective", i, {"same_as": seen[j]})
        seen.setdefault(j, i)
    # adjacency: S ~ S' iff their cliques meet
    holders: dict[int, list[int]] = {}
    for i in dom:
        for x in cmap.image(i):
            holders.setdefault(x, []).append(i)
    domset = set(dom)
    ug = cmap.upper.graph
    for i in dom:
        img = cmap.image(i)
        meet = {k for x in img for k in holders[x] if k != i}
        adj = {k for k in ug.adjacency[i] if k in domset}
        if meet != adj:
            rep.fail("adjacency", i, {"extra": sorted(meet - adj), "missing": sorted(adj - meet)})
    if rep.excluded == 0:
        rep.bijective = rep.ok and len(seen) == len(kg_lower.cliques)
    return rep


def psi_chain(host: Graph, n: int) -> tuple[list[GeoCliqueGraph], list[CliqueGraphResult], list[tuple[int, ...]]]:
    """Maps ``psi_j: G_j -> k^j G`` for ``j = 1..n``, built as ``k(psi_{j-1}) o C_j``.

    ``G_0`` has the host's own vertex order, so ``psi_0`` is the identity.
    """
    levels = [geo_clique_graph(host, j) for j in range(n + 1)]
    iters = iterate_clique_graph(host, n)
    if iters.budget_hit:
        raise RuntimeError("clique iteration hit the vertex budget")
    ks = [clique_graph(levels[0].graph)] + iters.levels[1:]
    maps: list[tuple[int, ...]] = []
    prev: tuple[int, ...] = tuple(range(host.vertex_count))
    for j in range(1, n + 1):
        cmap = explicit_C(levels[j], levels[j - 1], host, margin=0)
        kg = ks[j - 1]
        out = []
        for i in range(len(levels[j].shapes)):
            q = kg.clique_of(prev[x] for x in cmap.image(i))
            if q is None:
                raise RuntimeError(f"image of shape {i} at level {j} is not a clique")
            out.append(q)
        prev = tuple(out)
        maps.append(prev)
    return levels, ks, maps


# ---------------------------------------------------------------------------
# structure check: k^n T against the quotient of the lifted G_n


class ShapeOrbitKeys:
    """Orbit keys of window shapes under the torus translations."""

    def __init__(self, gcg: GeoCliqueGraph, torus: Torus):
        self.gcg = gcg
        self.torus = torus

    def key(self, s: TriShape) -> Hashable:
        t = lattice_triangle_of(s)
        # a grid translation keeps the height of lo, so shift by a height-0 vector
        x, y = self.torus.lattice.reduce(t.lo[:2])
        dx, dy = x - t.lo[0], y - t.lo[1]
        shift = (dx, dy, -dx - dy)
        return (t.side, add(t.lo, shift), add(t.hi, shift))

    def orbit_keys(self, graph: Graph | None = None) -> list[Hashable]:
        return [self.key(s) for s in self.gcg.shapes]


@dataclass(frozen=True, eq=False)
class StructureReport:
    ok: bool
    level: int
    iterate_size: int
    quotient_size: int
    loops: int
    witness: IsoWitness | None
    quotient: Graph
    iterate: Graph


def structure_check(torus: Torus, n: int, margin: int = DEFAULT_MARGIN) -> StructureReport:
    """Compare ``k^n T`` with the lifted ``G_n`` modulo the translations.

    The lift lives on a window of radius ``diam(T) + n + margin``; only edges at
    shapes at least ``margin`` from the rim enter the quotient.
    """
    if n < 1:
        raise ValueError("level must be >= 1")
    iters = iterate_clique_graph(torus.graph, n)
    if iters.budget_hit:
        raise RuntimeError("clique iteration hit the vertex budget")
    target = iters.levels[-1].graph
    radius = torus.diameter + n + margin
    window = hex_window(WindowSpec((0, 0, 0), radius))
    gcg = geo_clique_graph(window, n)
    keys = ShapeOrbitKeys(gcg, torus)
    dist = rim_distances(window)
    reps = [i for i, s in enumerate(gcg.shapes) if shape_rim_distance(s, dist) >= margin]
    all_keys = set(keys.orbit_keys())
    if {keys.key(gcg.shapes[i]) for i in reps} != all_keys:
        raise RuntimeError("some orbit has no shape far enough from the rim")
    q = quotient_graph(gcg.graph, keys, representatives=reps)
    wit = are_isomorphic(target, q.quotient)
    return StructureReport(
        wit is not None, n, target.vertex_count, q.quotient.vertex_count, q.loops, wit, q.quotient, target
    )
