import pytest
from hypothesis import given, strategies as st

from cliquedyn.graph import GraphError
from cliquedyn.hexgeo import (
    DIRECTIONS,
    Lattice,
    LatticeTriangle,
    NABLA1,
    TorusSpec,
    WindowSpec,
    boundary,
    cone_lattice,
    delta_graph,
    erode,
    hex_distance,
    hex_window,
    permutation_parity,
    square_torus,
    symmetries,
    torus_graph,
    triangle_inclusion,
    triangles_in_box,
)


def test_delta_sizes():
    for m in range(6):
        t = delta_graph(m)
        assert t.graph.vertex_count == (m + 1) * (m + 2) // 2
        assert t.graph.edge_count == 3 * m * (m + 1) // 2
        assert all(sum(c) == m and min(c) >= 0 for c in t.coords)


def test_boundary():
    verts, edges = boundary(delta_graph(3))
    assert len(verts) == 9 and len(edges) == 9
    assert verts == delta_graph(3).boundary_coords
    v0, e0 = boundary(delta_graph(0))
    assert v0 == {(0, 0, 0)} and not e0


def test_erode():
    t = erode(delta_graph(7), "boundary")
    assert t.m == 4 and t.coords[0] == (1, 1, 5)
    inner = set(delta_graph(7).coords) - delta_graph(7).boundary_coords
    assert set(t.coords) == inner
    t2 = erode(delta_graph(6), "closed_nbhd")
    assert t2.m == 0 and t2.coords == ((2, 2, 2),)
    with pytest.raises(ValueError):
        erode(delta_graph(2), "boundary")
    with pytest.raises(ValueError):
        erode(delta_graph(5), "closed_nbhd")


def test_triangle_inclusion():
    inc = triangle_inclusion(2, (1, 0, 0))
    assert inc((2, 0, 0)) == (3, 0, 0)
    assert all(sum(inc(c)) == 3 for c in delta_graph(2).coords)


def test_symmetries_preserve_delta():
    syms = symmetries(3)
    assert len(syms) == 6
    coords = set(delta_graph(3).coords)
    for s in syms:
        assert {s(c) for c in coords} == coords
    assert sorted(permutation_parity(s.perm) for s in syms) == [-1, -1, -1, 1, 1, 1]
    assert {s(c) for c in NABLA1 for s in syms} == set(NABLA1)


def test_window_sizes():
    for r in range(5):
        g = hex_window(radius=r)
        assert g.vertex_count == 3 * r * (r + 1) + 1
    g = hex_window(WindowSpec((1, -1, 0), 2))
    assert (1, -1, 0) in g.label_index


def test_torus_5_5():
    t = torus_graph(TorusSpec(((5, 0), (0, 5))))
    g = t.graph
    assert (g.vertex_count, g.edge_count, len(g.triangles)) == (25, 75, 50)
    lc = g.is_locally_cyclic()
    assert lc.ok and lc.min_degree == 6
    assert g.euler_characteristic() == 0
    assert t.diameter == 3


def test_small_torus_rejected():
    with pytest.raises(GraphError):
        torus_graph(TorusSpec(((2, 0), (0, 2))))
    with pytest.raises(GraphError):
        torus_graph(TorusSpec(((3, 0), (6, 0))))


def test_torus_translation_is_automorphism():
    t = square_torus(5)
    perm = t.translation((1, 2))
    assert sorted(perm) == list(range(25))
    assert all(t.graph.has_edge(perm[u], perm[v]) for u, v in t.graph.edges())


@given(st.integers(-40, 40), st.integers(-40, 40))
def test_lattice_reduce_is_canonical(x, y):
    lat = Lattice([(5, 0), (0, 5)])
    r = lat.reduce((x, y))
    assert 0 <= r[0] < 5 and 0 <= r[1] < 5
    assert lat.reduce((x + 5, y - 10)) == r
    assert lat.contains((x - r[0], y - r[1]))


def test_lattice_hnf_of_skew_basis():
    lat = Lattice([(4, 2), (1, 5)])
    assert lat.index == 18
    assert lat.contains((4, 2)) and lat.contains((1, 5)) and lat.contains((5, 7))
    assert not lat.contains((1, 0))


def test_cone_lattice():
    g = cone_lattice(7, 3)
    assert g.vertex_count == 1 + 7 * 6
    apex = g.label_index[(-1, 0, 0)]
    assert g.degree(apex) == 7
    assert g.neighbourhood_is_cycle(apex)
    inner = [v for v in g.vertices() if g.neighbourhood_is_cycle(v) and v != apex]
    assert inner and all(g.degree(v) == 6 for v in inner)
    flat = cone_lattice(6, 4)
    assert flat.vertex_count == hex_window(radius=4).vertex_count
    with pytest.raises(ValueError):
        cone_lattice(5, 3)


def test_lattice_triangle_points_and_core():
    t = LatticeTriangle.up((-2, -2, -2), 6)
    assert t.is_valid() and len(t.points()) == 28
    assert t.core() == LatticeTriangle.up((0, 0, 0), 0)
    d = LatticeTriangle.down((1, 1, 1), 3)
    assert d.orientation == -1 and len(d.points()) == 10
    assert d.interior() == LatticeTriangle.down((0, 0, 0), 0)
    assert not LatticeTriangle((0, 0, 0), (1, 1, 1)).is_valid()


def test_closed_neighbourhood_box():
    # N[S] as a coordinate box, checked point by point
    for t in (LatticeTriangle.up((-1, -2, 0), 3), LatticeTriangle.down((2, 1, 1), 4)):
        pts = set(t.points())
        near = {tuple(p[i] + d[i] for i in range(3)) for p in pts for d in DIRECTIONS} | pts
        box = LatticeTriangle(tuple(x - 1 for x in t.lo), tuple(x + 1 for x in t.hi))
        inside = {p for p in near if all(box.lo[i] <= p[i] <= box.hi[i] for i in range(3))}
        assert inside == near
        for u in triangles_in_box(t.side, lo_min=box.lo, hi_max=box.hi):
            assert set(u.points()) <= near


def test_hex_distance():
    assert hex_distance((0, 0, 0), (2, -1, -1)) == 2
