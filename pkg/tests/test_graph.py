import itertools

import pytest

from coopcut.graph import (
    Graph, GraphError, is_st_cut, prune_to_minimal, shortest_path,
    min_st_cut_modular, gomory_hu_cut_basis, enumerate_st_cuts,
    enumerate_st_paths, uniform_spanning_tree, fundamental_cuts,
)
from coopcut.rng import Rng


def path_graph(k):
    """Directed path 0 -> 1 -> ... -> k."""
    return Graph.directed(k + 1, [(i, i + 1) for i in range(k)])


def test_bidirect_basics():
    g = Graph.bidirect(2, [(0, 1)])
    assert g.m == 2 and g.num_elements == 1
    tri = Graph.bidirect(3, [(0, 1), (1, 2), (0, 2)])
    assert tri.m == 6 and tri.num_elements == 3
    # an arc and its reverse are one cost element
    assert tri.elements_of({0, 1}) == frozenset({0})
    with pytest.raises(GraphError):
        Graph.bidirect(3, [(0, 1), (1, 0)])
    with pytest.raises(GraphError):
        Graph.bidirect(2, [(0, 0)])


def test_is_st_cut():
    g = path_graph(3)
    assert is_st_cut(g, {0}, 0, 3)
    assert is_st_cut(g, {1}, 0, 3)
    assert not is_st_cut(g, set(), 0, 3)
    k3 = Graph.bidirect(3, [(0, 1), (1, 2), (0, 2)])
    assert is_st_cut(k3, k3.delta_plus({0}), 0, 2)


def test_prune_to_minimal():
    g = path_graph(3)
    got = prune_to_minimal(g, {0, 1, 2}, 0, 3)
    assert got.arcs == frozenset({0})
    assert got.minimal and got.side == frozenset({0})

    already = prune_to_minimal(g, {1}, 0, 3)
    assert already.arcs == frozenset({1})

    # delta+(s) plus an extra interior edge collapses to delta+(s)
    g2 = Graph.directed(4, [(0, 1), (0, 2), (1, 3), (2, 3), (1, 2)])
    got = prune_to_minimal(g2, {0, 1, 4}, 0, 3)
    assert got.arcs == frozenset({0, 1})

    with pytest.raises(GraphError):
        prune_to_minimal(g, {2}, 0, 3) if False else prune_to_minimal(g, set(), 0, 3)


def test_prune_handles_dead_end_arcs():
    # delta+(V_s) alone would keep the useless arc into the dead end
    g = Graph.directed(4, [(0, 1), (0, 2), (1, 3)])  # node 2 is a dead end
    got = prune_to_minimal(g, {0, 1, 2}, 0, 3)
    assert is_st_cut(g, got.arcs, 0, 3)
    for a in got.arcs:
        assert not is_st_cut(g, got.arcs - {a}, 0, 3)


def test_shortest_path():
    g = path_graph(3)
    assert shortest_path(g, [1.0] * 3, 0, 3) == [0, 1, 2]
    disconnected = Graph.directed(3, [(0, 1)])
    assert shortest_path(disconnected, [1.0], 0, 2) is None
    # zero lengths fall back to fewest hops, then smallest node ids
    g2 = Graph.directed(4, [(0, 1), (1, 3), (0, 2), (2, 3), (0, 3)])
    assert shortest_path(g2, [0.0] * 5, 0, 3) == [4]
    g3 = Graph.directed(4, [(0, 1), (1, 3), (0, 2), (2, 3)])
    assert [g3.arcs[a][1] for a in shortest_path(g3, [0.0] * 4, 0, 3)] == [1, 3]


def test_min_cut_modular_examples():
    g = path_graph(3)
    cut, value = min_st_cut_modular(g, [1.0, 2.0, 3.0], 0, 3)
    assert cut.arcs == frozenset({0}) and value == pytest.approx(1.0)

    # two parallel unit paths
    par = Graph.directed(4, [(0, 1), (1, 3), (0, 2), (2, 3)])
    _, value = min_st_cut_modular(par, [1.0] * 4, 0, 3)
    assert value == pytest.approx(2.0)

    k4 = Graph.bidirect(4, list(itertools.combinations(range(4), 2)))
    cut, value = min_st_cut_modular(k4, [1.0] * k4.m, 0, 1)
    assert value == pytest.approx(3.0)
    # brute-force cross-check over all bipartitions
    best = min(sum(1 for _ in k4.delta_plus(side))
               for r in range(1, 4)
               for side in (set(c) | {0} for c in itertools.combinations([2, 3], r - 1))
               if 1 not in side)
    assert value == pytest.approx(best)


def _random_connected(rng, n, extra):
    edges = set()
    for v in range(1, n):
        u = rng.randint(0, v - 1)
        edges.add((u, v))
    target = min(n - 1 + extra, n * (n - 1) // 2)
    while len(edges) < target:
        u = rng.randint(0, n - 1)
        v = rng.randint(0, n - 1)
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return Graph.bidirect(n, sorted(edges))


def test_max_flow_equals_min_cut_integral():
    rng = Rng(7)
    for trial in range(10):
        g = _random_connected(rng, 6, 4)
        w_elem = [float(rng.randint(1, 9)) for _ in range(g.num_elements)]
        w_arc = [w_elem[g.element_of[a]] for a in range(g.m)]
        cut, value = min_st_cut_modular(g, w_arc, 0, 5)
        assert sum(w_arc[a] for a in cut.arcs) == pytest.approx(value)
        best = min(sum(w_arc[a] for a in c.arcs) for c in enumerate_st_cuts(g, 0, 5))
        assert value == pytest.approx(best)


def test_gomory_hu_path_and_star():
    path = Graph.bidirect(4, [(0, 1), (1, 2), (2, 3)])
    basis = gomory_hu_cut_basis(path, [1.0, 1.0, 1.0])
    assert len(basis) == 3
    assert sorted(len(c.arcs) for *_, c in basis) == [1, 1, 1]

    star = Graph.bidirect(5, [(0, i) for i in range(1, 5)])
    basis = gomory_hu_cut_basis(star, [1.0] * 4)
    sides = sorted(min(len(c.side), star.n - len(c.side)) for *_, c in basis)
    assert sides == [1, 1, 1, 1]


def test_gomory_hu_bottleneck_equals_maxflow():
    rng = Rng(13)
    for trial in range(6):
        g = _random_connected(rng, rng.randint(4, 8), 5)
        w_elem = [float(rng.randint(1, 8)) for _ in range(g.num_elements)]
        w_arc = [w_elem[g.element_of[a]] for a in range(g.m)]
        basis = gomory_hu_cut_basis(g, w_elem)
        adj = {}
        for u, v, val, _ in basis:
            adj.setdefault(u, []).append((v, val))
            adj.setdefault(v, []).append((u, val))

        def bottleneck(a, b):
            best = {a: float("inf")}
            stack = [a]
            while stack:
                x = stack.pop()
                for (y, val) in adj.get(x, []):
                    cand = min(best[x], val)
                    if cand > best.get(y, -1.0):
                        best[y] = cand
                        stack.append(y)
            return best[b]

        for a in range(g.n):
            for b in range(a + 1, g.n):
                _, flow = min_st_cut_modular(g, w_arc, a, b)
                assert bottleneck(a, b) == pytest.approx(flow), (a, b)
        # every tree edge's recorded cut value matches a direct max-flow
        for u, v, val, cut in basis:
            _, flow = min_st_cut_modular(g, w_arc, u, v)
            assert val == pytest.approx(flow)
            assert sum(w_arc[a] for a in cut.arcs) == pytest.approx(val)


def test_gomory_hu_rejects_disconnected():
    g = Graph.bidirect(4, [(0, 1), (2, 3)])
    with pytest.raises(GraphError):
        gomory_hu_cut_basis(g, [1.0, 1.0])


def test_enumerate_st_cuts():
    g = path_graph(3)
    cuts = list(enumerate_st_cuts(g, 0, 3))
    assert sorted(c.arcs for c in cuts) == [frozenset({0}), frozenset({1}), frozenset({2})]
    k3 = Graph.bidirect(3, [(0, 1), (1, 2), (0, 2)])
    assert len(list(enumerate_st_cuts(k3, 0, 2))) == 2
    for c in enumerate_st_cuts(k3, 0, 2):
        assert is_st_cut(k3, c.arcs, 0, 2)
        for a in c.arcs:
            assert not is_st_cut(k3, c.arcs - {a}, 0, 2)


def test_enumerate_st_paths():
    assert len(enumerate_st_paths(path_graph(3), 0, 3)) == 1
    par = Graph.directed(4, [(0, 1), (1, 3), (0, 2), (2, 3)])
    assert len(enumerate_st_paths(par, 0, 3)) == 2
    k4 = Graph.bidirect(4, list(itertools.combinations(range(4), 2)))
    assert len(enumerate_st_paths(k4, 0, 1)) == 5


def test_uniform_spanning_tree_and_fundamental_cuts():
    g = _random_connected(Rng(3), 6, 3)
    rng = Rng(42)
    tree = uniform_spanning_tree(g, rng)
    assert len(tree) == g.n - 1
    cuts = fundamental_cuts(g, tree)
    assert len(cuts) == g.n - 1
    for c in cuts:
        assert c.side and 0 < len(c.side) < g.n
        assert c.arcs == g.delta_plus(c.side)


def test_graph_json_roundtrip():
    g = Graph.bidirect(3, [(0, 1), (1, 2)])
    obj = g.to_json(s=0, t=2)
    g2 = Graph.from_json(obj)
    assert g2.arcs == g.arcs and g2.element_of == g.element_of
