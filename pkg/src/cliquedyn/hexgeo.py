"""Hexagonal-grid coordinates and the finite hosts built from them.

Points of the grid of height ``h`` are integer triples summing to ``h``; two
points are adjacent when their difference is one of the six vectors in
``DIRECTIONS``. The triangular-shaped graph of side ``m`` is the induced
subgraph on the non-negative triples of height ``m``.

Lattice windows and tori live in height 0. Torus and window specs use axial
coordinates ``(q, r)``, which stand for the cube triple ``(q, r, -q - r)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import permutations
from math import gcd
from typing import Callable, Iterable, Iterator, Sequence

from .graph import Graph, GraphError, build_graph

HexCoord = tuple[int, int, int]

DIRECTIONS: tuple[HexCoord, ...] = (
    (1, -1, 0), (1, 0, -1), (-1, 1, 0), (0, 1, -1), (-1, 0, 1), (0, -1, 1),
)
UNIT_VECTORS: tuple[HexCoord, ...] = ((1, 0, 0), (0, 1, 0), (0, 0, 1))

# downward side-1 triangle in the middle of Delta_2
NABLA1: tuple[HexCoord, ...] = ((1, 1, 0), (0, 1, 1), (1, 0, 1))
# corners of the downward side-2 triangle whose central triangle is Delta_1
NABLA2_PRIME: tuple[HexCoord, ...] = ((1, 1, -1), (-1, 1, 1), (1, -1, 1))


def add(a: Sequence[int], b: Sequence[int]) -> HexCoord:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def sub(a: Sequence[int], b: Sequence[int]) -> HexCoord:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def hex_distance(a: Sequence[int], b: Sequence[int]) -> int:
    """Graph distance between two points of the same height."""
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]), abs(a[2] - b[2]))


def axial_to_cube(q: int, r: int) -> HexCoord:
    return (q, r, -q - r)


def axial_norm(v: Sequence[int]) -> int:
    return max(abs(v[0]), abs(v[1]), abs(v[0] + v[1]))


def is_adjacent(a: Sequence[int], b: Sequence[int]) -> bool:
    return sub(a, b) in _DIRSET


_DIRSET = frozenset(DIRECTIONS)


# ---------------------------------------------------------------------------
# triangular-shaped templates


@dataclass(frozen=True, eq=False)
class DeltaTemplate:
    """Delta_m, optionally translated by ``offset`` (so it sits in Hex_{m + sum(offset)})."""

    m: int
    offset: HexCoord = (0, 0, 0)

    @cached_property
    def base_coords(self) -> tuple[HexCoord, ...]:
        m = self.m
        return tuple(sorted((a, b, m - a - b) for a in range(m + 1) for b in range(m + 1 - a)))

    @cached_property
    def coords(self) -> tuple[HexCoord, ...]:
        return tuple(add(c, self.offset) for c in self.base_coords)

    @cached_property
    def index(self) -> dict[HexCoord, int]:
        return {c: i for i, c in enumerate(self.coords)}

    @cached_property
    def graph(self) -> Graph:
        idx = self.index
        edges = []
        for c, i in idx.items():
            for d in DIRECTIONS:
                j = idx.get(add(c, d))
                if j is not None and i < j:
                    edges.append((i, j))
        return build_graph(len(self.coords), edges, self.coords)

    @property
    def height(self) -> int:
        return self.m + sum(self.offset)

    def vertex_count(self) -> int:
        return (self.m + 1) * (self.m + 2) // 2

    @cached_property
    def boundary_coords(self) -> frozenset[HexCoord]:
        return frozenset(c for c, b in zip(self.coords, self.base_coords) if 0 in b)


def delta_graph(m: int) -> DeltaTemplate:
    if m < 0:
        raise ValueError("side length must be non-negative")
    return DeltaTemplate(m)


def boundary(t: DeltaTemplate) -> tuple[frozenset[HexCoord], frozenset[tuple[HexCoord, HexCoord]]]:
    """Boundary vertices and edges of a template.

    Vertices of degree below six and edges lying in a single triangle. For
    ``m = 0`` this is the lone vertex with no edges.
    """
    g = t.graph
    verts = frozenset(t.coords[v] for v in g.vertices() if g.degree(v) < 6)
    edges = frozenset(
        (t.coords[u], t.coords[v]) for u, v in g.edges() if len(g.adj[u] & g.adj[v]) == 1
    )
    return verts, edges


def erode(t: DeltaTemplate, mode: str) -> DeltaTemplate:
    """Remove the boundary (``"boundary"``) or its closed neighbourhood (``"closed_nbhd"``)."""
    if mode == "boundary":
        if t.m < 3:
            raise ValueError("boundary erosion needs side length >= 3")
        return DeltaTemplate(t.m - 3, add(t.offset, (1, 1, 1)))
    if mode == "closed_nbhd":
        if t.m < 6:
            raise ValueError("closed-neighbourhood erosion needs side length >= 6")
        return DeltaTemplate(t.m - 6, add(t.offset, (2, 2, 2)))
    raise ValueError(f"unknown erosion mode {mode!r}")


def triangle_inclusion(m: int, t: Sequence[int]) -> Callable[[HexCoord], HexCoord]:
    """The map Delta_m -> Hex_{m + t1 + t2 + t3}, a -> a + t."""
    off = (t[0], t[1], t[2])

    def include(a: HexCoord) -> HexCoord:
        return add(a, off)

    include.side = m  # type: ignore[attr-defined]
    include.offset = off  # type: ignore[attr-defined]
    return include


def symmetries(m: int) -> list[Callable[[HexCoord], HexCoord]]:
    """The six coordinate permutations acting on Delta_m.

    Odd permutations are the reflections, even ones the rotations. The identity
    comes first.
    """
    if m < 0:
        raise ValueError("side length must be non-negative")
    maps = []
    for perm in permutations(range(3)):
        def sym(a: HexCoord, perm=perm) -> HexCoord:
            return (a[perm[0]], a[perm[1]], a[perm[2]])

        sym.perm = perm  # type: ignore[attr-defined]
        maps.append(sym)
    return maps


def permutation_parity(perm: Sequence[int]) -> int:
    inversions = sum(1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


# ---------------------------------------------------------------------------
# lattice windows


@dataclass(frozen=True)
class WindowSpec:
    center: HexCoord = (0, 0, 0)
    radius: int = 0

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("window radius must be non-negative")

    def contains(self, c: Sequence[int]) -> bool:
        return hex_distance(c, self.center) <= self.radius

    @classmethod
    def from_json(cls, data: dict) -> "WindowSpec":
        return cls(tuple(data.get("center", (0, 0, 0))), int(data["radius"]))  # type: ignore[arg-type]


def hex_points(center: Sequence[int], radius: int) -> list[HexCoord]:
    cx, cy, cz = center
    pts = []
    for dx in range(-radius, radius + 1):
        for dy in range(max(-radius, -dx - radius), min(radius, -dx + radius) + 1):
            pts.append((cx + dx, cy + dy, cz - dx - dy))
    return sorted(pts)


def lattice_graph(points: Iterable[HexCoord]) -> Graph:
    """Induced subgraph of the grid on ``points``, labelled by coordinate."""
    pts = sorted(set(points))
    idx = {c: i for i, c in enumerate(pts)}
    edges = []
    for c, i in idx.items():
        for d in DIRECTIONS:
            j = idx.get(add(c, d))
            if j is not None and i < j:
                edges.append((i, j))
    return build_graph(len(pts), edges, pts)


def hex_window(spec: WindowSpec | None = None, *, center: HexCoord = (0, 0, 0), radius: int | None = None) -> Graph:
    if spec is None:
        if radius is None:
            raise ValueError("hex_window needs a spec or a radius")
        spec = WindowSpec(center, radius)
    return lattice_graph(hex_points(spec.center, spec.radius))


# ---------------------------------------------------------------------------
# translation lattices and tori


class Lattice:
    """A sublattice of the axial grid Z^2, kept in Hermite normal form.

    Rows ``(a, b)`` and ``(0, d)`` with ``a, d > 0`` and ``0 <= b < d`` when the
    rank is two; rank-one lattices keep a single row.
    """

    def __init__(self, generators: Sequence[Sequence[int]]):
        rows = [[int(g[0]), int(g[1])] for g in generators if tuple(g) != (0, 0)]
        self.generators = [tuple(g) for g in rows]
        # Euclid on the first column
        while sum(1 for r in rows if r[0] != 0) > 1:
            rows.sort(key=lambda r: (r[0] == 0, abs(r[0])))
            pivot = rows[0]
            for r in rows[1:]:
                if r[0] != 0:
                    k = r[0] // pivot[0]
                    r[0] -= k * pivot[0]
                    r[1] -= k * pivot[1]
            rows = [r for r in rows if r != [0, 0]]
        first = [r for r in rows if r[0] != 0]
        rest = [r[1] for r in rows if r[0] == 0]
        d = 0
        for v in rest:
            d = gcd(d, v)
        if first:
            a, b = first[0]
            if a < 0:
                a, b = -a, -b
            if d:
                b %= d
            self.top: tuple[int, int] | None = (a, b)
        else:
            self.top = None
        self.d = abs(d)

    @property
    def rank(self) -> int:
        return (self.top is not None) + (self.d > 0)

    @property
    def index(self) -> int:
        if self.rank != 2:
            raise ValueError("lattice is not of full rank")
        return self.top[0] * self.d  # type: ignore[index]

    def reduce(self, v: Sequence[int]) -> tuple[int, int]:
        """Canonical representative of ``v`` modulo the lattice."""
        x, y = v[0], v[1]
        if self.top is not None:
            a, b = self.top
            k = x // a
            x -= k * a
            y -= k * b
        if self.d:
            y %= self.d
        return (x, y)

    def contains(self, v: Sequence[int]) -> bool:
        return self.reduce(v) == (0, 0)

    def min_norm(self, bound: int = 8) -> int:
        """Least hex norm of a non-zero lattice vector, searched up to ``bound``."""
        for r in range(1, bound + 1):
            for q in range(-r, r + 1):
                for s in range(-r, r + 1):
                    if axial_norm((q, s)) == r and self.contains((q, s)):
                        return r
        return bound + 1

    def fundamental_domain(self) -> list[tuple[int, int]]:
        a = self.top[0]  # type: ignore[index]
        return [(x, y) for x in range(a) for y in range(self.d)]

    def reduce_cube(self, c: Sequence[int]) -> HexCoord:
        x, y = self.reduce((c[0], c[1]))
        return (x, y, -x - y)


@dataclass(frozen=True)
class TorusSpec:
    basis: tuple[tuple[int, int], tuple[int, int]]

    @classmethod
    def from_json(cls, data: dict) -> "TorusSpec":
        b = data["basis"]
        return cls(((int(b[0][0]), int(b[0][1])), (int(b[1][0]), int(b[1][1]))))

    def to_json(self) -> dict:
        return {"basis": [list(self.basis[0]), list(self.basis[1])]}


MIN_TORUS_NORM = 4


@dataclass(frozen=True, eq=False)
class Torus:
    """A 6-regular torus: the grid modulo a translation lattice."""

    spec: TorusSpec
    lattice: Lattice
    graph: Graph

    def vertex_of(self, c: Sequence[int]) -> int:
        return self.graph.label_index[self.lattice.reduce_cube(c)]

    def translation(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Vertex permutation of the translation by the axial vector ``vec``."""
        shift = axial_to_cube(vec[0], vec[1])
        return tuple(self.vertex_of(add(c, shift)) for c in self.graph.labels)  # type: ignore[union-attr]

    @property
    def diameter(self) -> int:
        # vertex-transitive, so one BFS suffices
        return max(self.graph.bfs_distances([0]).values())


def torus_graph(spec: TorusSpec) -> Torus:
    lat = Lattice(spec.basis)
    if lat.rank != 2:
        raise GraphError("torus basis is not linearly independent")
    norm = lat.min_norm(MIN_TORUS_NORM - 1)
    if norm < MIN_TORUS_NORM:
        raise GraphError(
            f"torus lattice has a vector of hex norm {norm} < {MIN_TORUS_NORM}; "
            "the quotient would not be simple and locally cyclic"
        )
    reps = [axial_to_cube(x, y) for x, y in lat.fundamental_domain()]
    reps.sort()
    idx = {c: i for i, c in enumerate(reps)}
    edges = []
    for c, i in idx.items():
        for d in DIRECTIONS:
            j = idx[lat.reduce_cube(add(c, d))]
            edges.append((i, j))
    return Torus(spec, lat, build_graph(len(reps), edges, reps))


def square_torus(k: int) -> Torus:
    """Torus with basis (k, 0), (0, k) in axial steps."""
    return torus_graph(TorusSpec(((k, 0), (0, k))))


# ---------------------------------------------------------------------------
# cone lattices

_SECTOR_STEPS = ((1, 0), (0, 1), (1, -1))
APEX_LABEL = (-1, 0, 0)


def cone_lattice(apex_degree: int, radius: int) -> Graph:
    """Planar triangulated disc with one apex of the given degree, degree 6 elsewhere inside.

    Built from ``apex_degree`` 60-degree sectors of the grid. Sector ``k`` owns
    the points ``(a, b)`` with ``a >= 1, b >= 0, a + b <= radius``; its ray
    ``a = 0`` is glued to the ray ``b = 0`` of sector ``k + 1``. Labels are
    ``(k, a, b)``; the apex is labelled ``(-1, 0, 0)``.
    """
    d, r = apex_degree, radius
    if d < 6:
        raise ValueError("apex degree must be >= 6")
    if r < 1:
        raise ValueError("radius must be >= 1")

    def canon(k: int, a: int, b: int) -> tuple[int, int, int]:
        if a == 0 and b == 0:
            return APEX_LABEL
        if a == 0:
            return ((k + 1) % d, b, 0)
        return (k % d, a, b)

    labels = [APEX_LABEL] + sorted(
        (k, a, b) for k in range(d) for a in range(1, r + 1) for b in range(0, r + 1 - a)
    )
    idx = {lab: i for i, lab in enumerate(labels)}
    edges = set()
    for k in range(d):
        for a in range(r + 1):
            for b in range(r + 1 - a):
                u = idx[canon(k, a, b)]
                for da, db in _SECTOR_STEPS:
                    a2, b2 = a + da, b + db
                    if a2 < 0 or b2 < 0 or a2 + b2 > r:
                        continue
                    v = idx[canon(k, a2, b2)]
                    edges.add((min(u, v), max(u, v)))
    return build_graph(len(labels), sorted(edges), labels)


# ---------------------------------------------------------------------------
# lattice triangles as coordinate boxes


@dataclass(frozen=True, order=True)
class LatticeTriangle:
    """A triangular-shaped subgraph of the height-0 grid.

    It is the set of points ``x`` with ``lo <= x <= hi`` componentwise and
    ``hi - lo = (m, m, m)``. Upward triangles have ``sum(lo) = -m``,
    downward ones ``sum(hi) = m``; for ``m = 0`` both coincide.
    """

    lo: HexCoord
    hi: HexCoord

    @property
    def side(self) -> int:
        return self.hi[0] - self.lo[0]

    @property
    def orientation(self) -> int:
        return 1 if sum(self.lo) == -self.side else -1

    def is_valid(self) -> bool:
        """A genuine triangle: equal side along all axes and the right height for its corner."""
        m = self.side
        if m < 0 or any(self.hi[i] - self.lo[i] != m for i in range(3)):
            return False
        return sum(self.lo) == -m or sum(self.hi) == m

    @staticmethod
    def up(t: HexCoord, m: int) -> "LatticeTriangle":
        return LatticeTriangle(t, add(t, (m, m, m)))

    @staticmethod
    def down(u: HexCoord, m: int) -> "LatticeTriangle":
        return LatticeTriangle(sub(u, (m, m, m)), u)

    def corners(self) -> tuple[HexCoord, ...]:
        m = self.side
        if self.orientation == 1:
            return tuple(add(self.lo, tuple(m * e for e in u)) for u in UNIT_VECTORS)  # type: ignore[arg-type]
        return tuple(sub(self.hi, tuple(m * e for e in u)) for u in UNIT_VECTORS)  # type: ignore[arg-type]

    def points(self) -> list[HexCoord]:
        lo, hi = self.lo, self.hi
        out = []
        for x in range(lo[0], hi[0] + 1):
            for y in range(lo[1], hi[1] + 1):
                z = -x - y
                if lo[2] <= z <= hi[2]:
                    out.append((x, y, z))
        return out

    def contains(self, other: "LatticeTriangle") -> bool:
        return all(self.lo[i] <= other.lo[i] and other.hi[i] <= self.hi[i] for i in range(3))

    def interior(self) -> "LatticeTriangle":
        m = self.side
        if m < 3:
            raise ValueError("interior of a triangle needs side >= 3")
        if self.orientation == 1:
            return LatticeTriangle.up(add(self.lo, (1, 1, 1)), m - 3)
        return LatticeTriangle.down(sub(self.hi, (1, 1, 1)), m - 3)

    def core(self) -> "LatticeTriangle":
        """The triangle minus the closed neighbourhood of its boundary."""
        m = self.side
        if m < 6:
            raise ValueError("core of a triangle needs side >= 6")
        if self.orientation == 1:
            return LatticeTriangle.up(add(self.lo, (2, 2, 2)), m - 6)
        return LatticeTriangle.down(sub(self.hi, (2, 2, 2)), m - 6)

    def in_closed_neighbourhood_of(self, other: "LatticeTriangle") -> bool:
        """Whether every point lies within distance 1 of ``other``."""
        return all(other.lo[i] - 1 <= self.lo[i] and self.hi[i] <= other.hi[i] + 1 for i in range(3))

    def translate(self, v: HexCoord) -> "LatticeTriangle":
        return LatticeTriangle(add(self.lo, v), add(self.hi, v))

    def inside_window(self, window: WindowSpec) -> bool:
        return all(window.contains(c) for c in self.corners())


def triangles_in_box(
    m: int,
    lo_min: HexCoord | None = None,
    lo_max: HexCoord | None = None,
    hi_min: HexCoord | None = None,
    hi_max: HexCoord | None = None,
) -> Iterator[LatticeTriangle]:
    """All triangles of side ``m`` whose ``lo``/``hi`` corners obey the given bounds."""
    big = 1 << 40
    lmin = lo_min or (-big,) * 3
    lmax = lo_max or (big,) * 3
    hmin = hi_min or (-big,) * 3
    hmax = hi_max or (big,) * 3
    seen = set()
    for orient in (1, -1):
        # anchor a is lo for upward and hi for downward triangles
        if orient == 1:
            lower = [max(lmin[i], hmin[i] - m) for i in range(3)]
            upper = [min(lmax[i], hmax[i] - m) for i in range(3)]
            total = -m
        else:
            lower = [max(hmin[i], lmin[i] + m) for i in range(3)]
            upper = [min(hmax[i], lmax[i] + m) for i in range(3)]
            total = m
        for a0 in range(lower[0], upper[0] + 1):
            for a1 in range(lower[1], upper[1] + 1):
                a2 = total - a0 - a1
                if lower[2] <= a2 <= upper[2]:
                    tri = (LatticeTriangle.up if orient == 1 else LatticeTriangle.down)((a0, a1, a2), m)
                    if tri not in seen:
                        seen.add(tri)
                        yield tri
