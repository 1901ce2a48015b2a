import random
from itertools import combinations

import networkx as nx
import pytest
from networkx.algorithms.isomorphism import GraphMatcher

from cliquedyn.actions import CoveringMap, GroupAction, compose, identity_cover, projection_to_torus
from cliquedyn.cliques import (
    CliqueConsistencyError,
    clique_graph,
    induced_clique_action,
    iterate_clique_graph,
    map_pk,
    max_cliques,
)
from cliquedyn.covers import is_covering_map
from cliquedyn.graph import complete_graph, cycle_graph, octahedron
from cliquedyn.hexgeo import hex_window, square_torus
from cliquedyn.isomorphism import are_isomorphic
from oracles import brute_cliques, random_graph


def test_small_examples():
    assert max_cliques(complete_graph(3)) == [(0, 1, 2)]
    oc = max_cliques(octahedron())
    assert len(oc) == 8 and all(len(q) == 3 for q in oc)
    c5 = max_cliques(cycle_graph(5))
    assert len(c5) == 5 and all(len(q) == 2 for q in c5)


def test_against_brute_force_and_networkx():
    rng = random.Random(7)
    for _ in range(10):
        g = random_graph(rng, rng.randint(5, 22), rng.choice([0.2, 0.4, 0.6]))
        ours = max_cliques(g)
        assert ours == brute_cliques(g)
        nxg = nx.Graph(g.edges())
        nxg.add_nodes_from(g.vertices())
        assert ours == sorted(tuple(sorted(q)) for q in nx.find_cliques(nxg))


def test_cliques_are_maximal():
    rng = random.Random(3)
    g = random_graph(rng, 40, 0.3)
    for q in max_cliques(g):
        assert all(g.has_edge(a, b) for a, b in combinations(q, 2))
        outside = set(g.vertices()) - set(q)
        assert not any(all(g.has_edge(v, a) for a in q) for v in outside)


def test_clique_graph_examples():
    assert clique_graph(complete_graph(3)).graph.vertex_count == 1
    assert are_isomorphic(clique_graph(cycle_graph(5)).graph, cycle_graph(5)) is not None
    kg = clique_graph(octahedron())
    g = kg.graph
    for i, q in enumerate(kg.cliques):
        non = [j for j in range(8) if j != i and not g.has_edge(i, j)]
        assert len(non) == 1
        assert not set(q) & set(kg.cliques[non[0]])


def test_clique_graph_is_connected():
    for g in (octahedron(), square_torus(5).graph, hex_window(radius=2), cycle_graph(7)):
        assert clique_graph(g).graph.is_connected()


def test_iterate():
    assert [lv.graph.vertex_count for lv in iterate_clique_graph(complete_graph(3), 2).levels] == [1, 1]
    assert iterate_clique_graph(octahedron(), 0).levels == []
    res = iterate_clique_graph(square_torus(5).graph, 2)
    assert res.sizes()[0] == 50 and not res.budget_hit
    with pytest.raises(ValueError):
        iterate_clique_graph(octahedron(), -1)


def test_budget_is_a_flag():
    res = iterate_clique_graph(square_torus(5).graph, 3, vertex_budget=60)
    assert res.budget_hit and res.sizes() == [50]


def test_torus_first_iterate_counts_triangles():
    t = square_torus(7).graph
    assert clique_graph(t).graph.vertex_count == len(t.triangles) == 2 * t.vertex_count


def test_determinism():
    g = square_torus(5).graph
    assert clique_graph(g).cliques == clique_graph(g).cliques


def test_induced_identity_and_translation():
    t = square_torus(5)
    kg = clique_graph(t.graph)
    ident = induced_clique_action(GroupAction.trivial(25), kg)
    assert ident.generators[0] == tuple(range(50))
    gamma = induced_clique_action(GroupAction((t.translation((1, 0)),)), kg)
    perm = gamma.generators[0]
    assert all(perm[i] != i for i in range(50))
    assert GroupAction((perm,)).check_automorphisms(kg.graph) is None


def test_induced_action_composition():
    g = octahedron()
    nxg = nx.Graph(g.edges())
    autos = [tuple(m[v] for v in range(6)) for m in GraphMatcher(nxg, nxg).isomorphisms_iter()]
    assert len(autos) == 48
    kg = clique_graph(g)
    rng = random.Random(11)
    for _ in range(10):
        a, b = rng.choice(autos), rng.choice(autos)
        ka = induced_clique_action(GroupAction((a,)), kg).generators[0]
        kb = induced_clique_action(GroupAction((b,)), kg).generators[0]
        kab = induced_clique_action(GroupAction((compose(a, b),)), kg).generators[0]
        assert kab == compose(ka, kb)


def test_bad_action_is_reported():
    g = cycle_graph(4)
    kg = clique_graph(g)
    with pytest.raises(CliqueConsistencyError):
        induced_clique_action(GroupAction(((1, 0, 2, 3),)), kg)


def test_map_pk_identity():
    g = octahedron()
    kg = clique_graph(g)
    pk = map_pk(identity_cover(g), kg, kg)
    assert pk.vertex_map == tuple(range(8))


def test_map_pk_window_to_torus():
    t = square_torus(5)
    w = hex_window(radius=8)
    p = projection_to_torus(w, t)
    pk = map_pk(p, clique_graph(w), clique_graph(t.graph))
    rep = is_covering_map(pk)
    assert rep.ok and rep.restricted and rep.checked > 0


def test_map_pk_composes():
    small, big = square_torus(5), square_torus(10)
    w = hex_window(radius=8)
    p = projection_to_torus(w, big)
    q = CoveringMap(big.graph, small.graph, tuple(small.vertex_of(c) for c in big.graph.labels))
    qp = CoveringMap(w, small.graph, tuple(q(p(v)) for v in w.vertices()), p.interior)
    kw, kb, ks = clique_graph(w), clique_graph(big.graph), clique_graph(small.graph)
    pk, qk, qpk = map_pk(p, kw, kb), map_pk(q, kb, ks), map_pk(qp, kw, ks)
    for i in sorted(pk.interior):
        assert qpk(i) == qk(pk(i))
