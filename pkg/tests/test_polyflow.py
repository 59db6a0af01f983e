import itertools

import pytest

from coopcut.graph import Graph, enumerate_st_cuts, is_st_cut
from coopcut.instances import Instance, gen_convolution_witness, make_instance
from coopcut.polyflow import (
    PolyFlowError, residual_capacity, max_polyflow, extract_min_cut,
    fhat_pmf, solve_pf,
)
from coopcut.rng import Rng
from coopcut.submodular import (
    SubmodularOracle, ModularCost, MaxWeightCost, ConcaveOfWeightCost,
    check_submodular, subsets,
)
from coopcut.surrogate import solve_mc
from coopcut.graph import min_st_cut_modular


def st_instance(g, cost, s, t, family="max_weight"):
    return Instance(g, cost, s=s, t=t, family=family)


def test_residual_capacity_examples():
    # modular: g(e) - phi(e)
    g = Graph.directed(3, [(0, 1), (0, 2)])
    f = ModularCost([2.0, 3.0])
    phi = {0: 0.5, 1: 1.0}
    assert residual_capacity(f, [0, 1], g.element_of, phi, 0) == pytest.approx(1.5)
    # max-weight uniform: each edge alone has room gamma, jointly gamma
    fm = MaxWeightCost([1.0, 1.0])
    zero = {0: 0.0, 1: 0.0}
    assert residual_capacity(fm, [0, 1], g.element_of, zero, 0) == pytest.approx(1.0)
    assert residual_capacity(fm, [0, 1], g.element_of, {0: 0.6, 1: 0.0}, 1) == pytest.approx(0.4)


def test_max_polyflow_modular_equals_classical():
    g = Graph.directed(4, [(0, 1), (1, 3), (0, 2), (2, 3), (1, 2)])
    w = [1.0, 2.0, 2.0, 0.5, 0.2]
    inst = st_instance(g, ModularCost(w), 0, 3, family="modular")
    state = max_polyflow(inst)
    _, classical = min_st_cut_modular(g, w, 0, 3)
    assert state.value == pytest.approx(classical)
    cut = extract_min_cut(inst, state)
    assert is_st_cut(g, cut.arcs, 0, 3)


def test_max_polyflow_single_path_max_weight():
    g = Graph.directed(5, [(i, i + 1) for i in range(4)])
    inst = st_instance(g, MaxWeightCost([1.0] * 4), 0, 4)
    state = max_polyflow(inst)
    # interior nodes constrain single edges only: the path carries gamma
    assert state.value == pytest.approx(1.0)


def test_max_polyflow_parallel_paths_coupled_at_source():
    # two disjoint 2-edge paths; f couples both source edges: cap {e0,e2} = gamma
    g = Graph.directed(4, [(0, 1), (1, 3), (0, 2), (2, 3)])
    inst = st_instance(g, MaxWeightCost([1.0] * 4), 0, 3)
    state = max_polyflow(inst)
    assert state.value == pytest.approx(1.0)


def test_flow_feasibility_certificates():
    g = Graph.bidirect(4, [(0, 1), (1, 3), (0, 2), (2, 3), (1, 2)])
    f = ConcaveOfWeightCost([1.0, 2.0, 1.5, 0.5, 1.0], "sqrt")
    inst = st_instance(g, f, 0, 3)
    state = max_polyflow(inst)
    # conservation at interior nodes
    for v in (1, 2):
        inflow = sum(state.phi[a] for a in g.in_arcs[v])
        outflow = sum(state.phi[a] for a in g.out_arcs[v])
        assert inflow == pytest.approx(outflow, abs=1e-12)
    # phi(A) <= cap(A) on every incidence subset (exhaustive)
    for v in range(g.n):
        for arcs in (g.out_arcs[v], g.in_arcs[v]):
            for sub in subsets(arcs):
                cap = f.value({g.element_of[a] for a in sub})
                assert sum(state.phi[a] for a in sub) <= cap + 1e-9


def test_fhat_pmf_appendix_c_witness():
    inst = gen_convolution_witness(a=1.5, b=2.0, eps=1e-3)
    # h(e3|{e2}) = b - a;  h(e3|{e1,e2}) = b   (arc ids: e1=0, e2=1, e3=2)
    h_e2 = fhat_pmf(inst, {1})
    h_e23 = fhat_pmf(inst, {1, 2})
    h_e12 = fhat_pmf(inst, {0, 1})
    h_e123 = fhat_pmf(inst, {0, 1, 2})
    assert h_e23 - h_e2 == pytest.approx(0.5)
    assert h_e123 - h_e12 == pytest.approx(2.0)


def test_fhat_pmf_modular_and_upper_bound():
    g = Graph.bidirect(4, [(0, 1), (1, 3), (0, 2), (2, 3), (1, 2)])
    w = [1.0, 2.0, 1.5, 0.5, 1.0]
    inst_mod = st_instance(g, ModularCost(w), 0, 3, family="modular")
    for arcs in ({0, 2}, {0, 4}, {1, 3}):
        assert fhat_pmf(inst_mod, arcs) == pytest.approx(
            sum(w[g.element_of[a]] for a in arcs))
    f = ConcaveOfWeightCost(w, "sqrt")
    inst = st_instance(g, f, 0, 3)
    # fhat dominates f (subadditivity) on arc subsets of moderate size
    for arcs in itertools.combinations(range(g.m), 3):
        elems = g.elements_of(arcs)
        assert fhat_pmf(inst, arcs) >= f.value(elems) - 1e-9


def test_fhat_pmf_refuses_large_cuts():
    g = Graph.bidirect(12, [(i, (i + 1) % 12) for i in range(12)] +
                       [(i, (i + 2) % 12) for i in range(12)])
    inst = st_instance(g, ModularCost([1.0] * g.num_elements), 0, 6)
    with pytest.raises(PolyFlowError):
        fhat_pmf(inst, range(22), cap=20)


def _random_instance(rng, n, extra, family_pick):
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
    g = Graph.bidirect(n, sorted(edges))
    m = g.num_elements
    if family_pick == 0:
        cost = ConcaveOfWeightCost([rng.uniform(0.3, 2.5) for _ in range(m)], "sqrt")
    elif family_pick == 1:
        cost = MaxWeightCost([rng.uniform(0.3, 2.5) for _ in range(m)])
    else:
        from coopcut.instances import gen_labels
        cost = gen_labels("I", g, seed=rng.randint(0, 10 ** 9))
    return st_instance(g, cost, 0, n - 1)


def test_strong_duality_on_random_suite():
    rng = Rng(2024)
    for trial in range(8):
        inst = _random_instance(rng, rng.randint(4, 6), 3, trial % 3)
        state = max_polyflow(inst)
        best = min(fhat_pmf(inst, c.arcs)
                   for c in enumerate_st_cuts(inst.graph, inst.s, inst.t))
        assert state.value == pytest.approx(best, abs=1e-9)
        cut = extract_min_cut(inst, state)  # also runs the internal check
        assert is_st_cut(inst.graph, cut.arcs, inst.s, inst.t)


def test_solve_pf_modular_optimal_and_theorem4_bound():
    rng = Rng(5)
    g = Graph.bidirect(5, [(0, 1), (1, 4), (0, 2), (2, 4), (1, 2), (2, 3), (3, 4)])
    w = [rng.uniform(0.5, 2.0) for _ in range(g.num_elements)]
    inst = st_instance(g, ModularCost(w), 0, 4, family="modular")
    rep = solve_pf(inst)
    best = min(inst.cost_of_arcs(c.arcs) for c in enumerate_st_cuts(g, 0, 4))
    assert rep.cost == pytest.approx(best)

    for trial in range(4):
        inst = _random_instance(Rng(50 + trial), 5, 2, trial % 3)
        rep = solve_pf(inst)
        cuts = list(enumerate_st_cuts(inst.graph, inst.s, inst.t))
        costs = [inst.cost_of_arcs(c.arcs) for c in cuts]
        opt_i = min(range(len(cuts)), key=lambda i: costs[i])
        c_star, opt = cuts[opt_i], costs[opt_i]
        d_s = len({inst.graph.arcs[a][0] for a in c_star.arcs})
        d_t = len({inst.graph.arcs[a][1] for a in c_star.arcs})
        assert rep.cost <= min(d_s, d_t) * opt + 1e-9
        # Eq. 25-29 chain: fhat(C*) <= min(cap_in, cap_out)(C*)
        f = inst.cost
        g2 = inst.graph
        cap_out = sum(f.value({g2.element_of[a] for a in c_star.arcs
                               if g2.arcs[a][0] == v}) for v in range(g2.n))
        cap_in = sum(f.value({g2.element_of[a] for a in c_star.arcs
                              if g2.arcs[a][1] == v}) for v in range(g2.n))
        fh = fhat_pmf(inst, c_star.arcs)
        assert fh <= min(cap_in, cap_out) + 1e-9
        # weak duality: flow <= fhat(C) <= sum_v f(C ∩ delta(v)) for all cuts
        for c, cost_c in zip(cuts, costs):
            fh_c = fhat_pmf(inst, c.arcs)
            assert rep.extra["flow_value"] <= fh_c + 1e-9


class NodeCutFunction(SubmodularOracle):
    """h(X) = f(delta+(X)); not submodular in general."""

    def __init__(self, inst):
        super().__init__(inst.graph.n)
        self.inst = inst

    def _value(self, nodes):
        return self.inst.cost_of_arcs(self.inst.graph.delta_plus(nodes))


def test_induced_node_function_subadditive_but_not_submodular():
    # Figure-1 style instance: sqrt of modular weights chosen so that
    # h({s,x1}) + h({s,x2}) < h({s}) + h({s,x1,x2}).
    g = Graph.directed(4, [(0, 1), (0, 2), (1, 3), (2, 3), (1, 2), (2, 1)])
    w = [0.1, 9.9, 9.95, 0.05, 0.05, 0.05]
    inst = st_instance(g, ConcaveOfWeightCost(w, "sqrt"), 0, 3)
    h = NodeCutFunction(inst)
    assert h.value({0, 1}) + h.value({0, 2}) < h.value({0}) + h.value({0, 1, 2}) - 1e-6
    assert check_submodular(h) is not None
    # subadditivity holds everywhere (Prop. 1 part 2)
    n = g.n
    for ma in range(1 << n):
        A = frozenset(x for x in range(n) if ma >> x & 1)
        for mb in range(1 << n):
            B = frozenset(x for x in range(n) if mb >> x & 1)
            assert h.value(A) + h.value(B) >= h.value(A | B) - 1e-9


def test_residual_capacity_agrees_with_flow_tables():
    # the brute-force residual and the flow's internal integer tables
    # must agree on the final flow
    inst = _random_instance(Rng(321), 5, 2, 0)
    state = max_polyflow(inst)
    g = inst.graph
    phi = {a: state.phi[a] for a in range(g.m)}
    for v in range(g.n):
        for arcs in (g.out_arcs[v], g.in_arcs[v]):
            for a in arcs:
                res = residual_capacity(inst.cost, arcs, g.element_of, phi, a)
                assert res >= -1e-9
    # saturated arcs out of the source side cross a tight set
    side = state.source_side
    for a in g.delta_plus(side):
        u = g.arcs[a][0]
        out_res = residual_capacity(inst.cost, g.out_arcs[u], g.element_of, phi, a)
        v = g.arcs[a][1]
        in_res = residual_capacity(inst.cost, g.in_arcs[v], g.element_of, phi, a)
        assert min(out_res, in_res) <= 1e-9


def test_flow_tight_set_certificates():
    inst = _random_instance(Rng(654), 5, 3, 1)
    state = max_polyflow(inst)
    g = inst.graph
    f = inst.cost
    for (v, direction), sets in state.tight_sets.items():
        for sel in sets:
            incidence = g.out_arcs[v] if direction == "out" else g.in_arcs[v]
            assert set(sel) <= set(incidence)
            cap = f.value({g.element_of[a] for a in sel})
            flow = sum(state.phi[a] for a in sel)
            assert flow == pytest.approx(cap, abs=1e-9)


def test_induced_node_function_subadditive_on_random_instances():
    rng = Rng(77)
    for trial in range(3):
        inst = _random_instance(rng, 5, 2, trial % 3)
        h = NodeCutFunction(inst)
        n = inst.graph.n
        for ma in range(1 << n):
            A = frozenset(x for x in range(n) if ma >> x & 1)
            for mb in range(ma, 1 << n):
                B = frozenset(x for x in range(n) if mb >> x & 1)
                assert h.value(A) + h.value(B) >= h.value(A | B) - 1e-9
