"""Solvers that replace the submodular cost with a tractable surrogate:
the additive baseline (MC), the Gomory-Hu cut-basis baseline (MB),
Queyranne's algorithm on the induced node function (QU), the
Cauchy-Schwarz "EA-lite" surrogate, and the iterative semigradient
solver (supergradient descent; RI/MI initializations)."""

from dataclasses import dataclass, field
import math
import time

from .graph import (
    Cut, GraphError, gomory_hu_cut_basis, is_st_cut, min_st_cut_modular,
    prune_to_minimal, uniform_spanning_tree, fundamental_cuts,
)
from .rng import Rng


@dataclass
class SolverReport:
    solution: Cut
    solver: str
    iterations: int = 1
    oracle_calls: int = 0
    wall_time: float = 0.0
    surrogate_value: float = None
    extra: dict = field(default_factory=dict)

    @property
    def cost(self):
        return self.solution.cost


class _Timer:
    def __init__(self, inst):
        self.inst = inst
        self.calls0 = inst.cost.calls
        self.t0 = time.perf_counter()

    def report(self, solution, solver, iterations=1, surrogate_value=None, **extra):
        return SolverReport(
            solution=solution, solver=solver, iterations=iterations,
            oracle_calls=self.inst.cost.calls - self.calls0,
            wall_time=time.perf_counter() - self.t0,
            surrogate_value=surrogate_value, extra=extra)


def _terminals(inst, s, t):
    s = inst.s if s is None else s
    t = inst.t if t is None else t
    if s is None or t is None:
        raise GraphError("solver needs terminals (st instance or explicit s,t)")
    return s, t


def _finish_cut(inst, arcs, s, t):
    cut = prune_to_minimal(inst.graph, arcs, s, t)
    cost = inst.cost_of_arcs(cut.arcs)
    return Cut(arcs=cut.arcs, cost=cost, minimal=True, side=cut.side)


def singleton_weights(inst):
    """f({e}) per cost element."""
    return [inst.cost.value((c,)) for c in range(inst.graph.num_elements)]


def _arc_weights(g, w_elem):
    return [w_elem[g.element_of[a]] for a in range(g.m)]


def solve_mc(inst, s=None, t=None):
    """Minimum cut under the additive surrogate f_add(C) = sum f({e})."""
    s, t = _terminals(inst, s, t)
    timer = _Timer(inst)
    w = singleton_weights(inst)
    raw, _ = min_st_cut_modular(inst.graph, _arc_weights(inst.graph, w), s, t)
    cut = _finish_cut(inst, raw.arcs, s, t)
    add_val = sum(w[c] for c in cut.elements(inst.graph))
    return timer.report(cut, "mc", surrogate_value=add_val)


def _gh_basis(inst):
    if not hasattr(inst, "_gh_basis_cache"):
        w = singleton_weights(inst)
        inst._gh_basis_cache = gomory_hu_cut_basis(inst.graph, w)
    return inst._gh_basis_cache


def solve_mb(inst, s=None, t=None):
    """Best cut (under f) of the minimum cut basis from a Gomory-Hu tree
    built on the additive weights.  With terminals, only basis cuts
    separating s from t compete; in global mode all n-1 do."""
    timer = _Timer(inst)
    basis = _gh_basis(inst)
    s = inst.s if s is None else s
    t = inst.t if t is None else t
    best = None
    for _, _, _, cut in basis:
        if s is not None and t is not None:
            if (s in cut.side) == (t in cut.side):
                continue
        val = inst.cost_of_arcs(cut.arcs)
        key = (val, tuple(sorted(cut.arcs)))
        if best is None or key < best[0]:
            # orient the stored side to contain s when terminals are given
            side = cut.side
            arcs = cut.arcs
            if s is not None and s not in side:
                side = frozenset(range(inst.graph.n)) - side
                arcs = inst.graph.delta_plus(side)
            best = (key, Cut(arcs=arcs, cost=val, minimal=True, side=side))
    if best is None:
        raise GraphError("no basis cut separates the terminals")
    return timer.report(best[1], "mb", surrogate_value=best[1].cost)


def solve_queyranne(inst, s=None, t=None):
    """Queyranne's pendent-pair minimization applied to h(X) = f(delta X).

    h is submodular only for modular f, so this is a heuristic baseline
    here.  Nodes are processed in the instance's label order; minimizer
    ties take the earliest candidate, which is what makes the worst-case
    adversarial labeling reproducible.
    """
    g = inst.graph
    if not g.from_undirected:
        raise GraphError("Queyranne needs an undirected instance")
    if g.n < 2:
        raise GraphError("need at least two nodes")
    timer = _Timer(inst)
    und = g.undirected_edges()

    def h(nodes):
        return inst.cost.value(
            c for c, (u, v) in enumerate(und) if (u in nodes) != (v in nodes))

    groups = [frozenset({v}) for v in range(g.n)]
    best_val = None
    best_side = None
    evals = 0
    while len(groups) > 1:
        order = [groups[0]]
        merged = set(groups[0])
        remaining = list(groups[1:])
        while remaining:
            best_key = None
            best_i = None
            for i, cand in enumerate(remaining):
                key = h(merged | cand) - h(cand)
                evals += 2
                if best_key is None or key < best_key:
                    best_key = key
                    best_i = i
            order.append(remaining.pop(best_i))
            merged |= order[-1]
        last = order[-1]
        val = h(last)
        # keep the latest minimizing candidate (value ties included)
        if best_val is None or val <= best_val:
            best_val = val
            best_side = frozenset(last)
        # merge the pendent pair, keeping the position of the earlier one
        second = order[-2]
        fused = second | last
        groups = [fused if grp == second else grp
                  for grp in groups if grp != last]
    side = best_side
    cut = Cut(arcs=g.delta_plus(side), cost=best_val, minimal=True, side=side)
    return timer.report(cut, "qu", iterations=g.n - 1, h_evaluations=evals)


def ea_lite_weights(inst):
    """w_f(e) = f({e})^2; the surrogate sqrt(m * sum of w_f) dominates f
    by Cauchy-Schwarz and is within sqrt(m |C*|) of it at the optimum."""
    return [inst.cost.value((c,)) ** 2 for c in range(inst.graph.num_elements)]


def ea_lite_value(inst, elements, w_sq=None):
    if w_sq is None:
        w_sq = ea_lite_weights(inst)
    return math.sqrt(inst.graph.num_elements * sum(w_sq[c] for c in elements))


def solve_ea(inst, s=None, t=None):
    """Min cut under the squared singleton weights; minimizing the
    modular sum is equivalent to minimizing the monotone transform
    sqrt(m * sum)."""
    s, t = _terminals(inst, s, t)
    timer = _Timer(inst)
    w_sq = ea_lite_weights(inst)
    raw, _ = min_st_cut_modular(inst.graph, _arc_weights(inst.graph, w_sq), s, t)
    cut = _finish_cut(inst, raw.arcs, s, t)
    return timer.report(cut, "ea",
                        surrogate_value=ea_lite_value(inst, cut.elements(inst.graph), w_sq))


def supergradient_bound(f, b_set, a_set):
    """Modular upper bound on f(B) that is tight at A:
    f(A) + sum_{e in B-A} f(e|A) - sum_{e in A-B} f(e|E-e)."""
    a_set = frozenset(a_set)
    b_set = frozenset(b_set)
    full = frozenset(range(f.m))
    val = f.value(a_set)
    for e in b_set - a_set:
        val += f.marginal(e, a_set)
    for e in a_set - b_set:
        val -= f.value(full) - f.value(full - {e})
    return val


def solve_semigradient(inst, s=None, t=None, init="empty", max_iters=50, seed=0):
    """Iterated supergradient descent: each round solves a min cut with
    weights f(e|E-e) on elements inside the previous cut and f(e|C_prev)
    outside, which minimizes the supergradient bound anchored at C_prev.
    Stops when a cut repeats; returns the best-f iterate.

    init: "empty" (first round = MC), "random_basis" (best fundamental
    cut of a uniform spanning tree), or "min_basis" (best Gomory-Hu
    basis cut).
    """
    s, t = _terminals(inst, s, t)
    timer = _Timer(inst)
    g = inst.graph
    f = inst.cost
    full = frozenset(range(g.num_elements))

    if init == "empty":
        anchor = frozenset()
    elif init == "random_basis":
        if not g.from_undirected:
            raise GraphError("random basis init needs an undirected instance")
        tree = uniform_spanning_tree(g, Rng(seed))
        cuts = fundamental_cuts(g, tree)
        anchor = min((c.elements(g) for c in cuts),
                     key=lambda els: (f.value(els), tuple(sorted(els))))
    elif init == "min_basis":
        basis = _gh_basis(inst)
        anchor = min((cut.elements(g) for *_, cut in basis),
                     key=lambda els: (f.value(els), tuple(sorted(els))))
    else:
        raise ValueError(f"unknown init {init!r}")

    tail_gain = {}

    def tail(e):
        if e not in tail_gain:
            tail_gain[e] = f.value(full) - f.value(full - {e})
        return tail_gain[e]

    seen = set()
    best = None
    trace = []
    iters = 0
    prev = anchor
    while iters < max_iters:
        iters += 1
        base = f.value(prev)
        w_elem = [0.0] * g.num_elements
        for c in range(g.num_elements):
            if c in prev:
                w_elem[c] = tail(c)
            else:
                w_elem[c] = f.value(prev | {c}) - base
        raw, _ = min_st_cut_modular(g, _arc_weights(g, w_elem), s, t)
        cut = _finish_cut(inst, raw.arcs, s, t)
        elems = cut.elements(g)
        trace.append((sorted(elems), cut.cost))
        key = (cut.cost, tuple(sorted(cut.arcs)))
        if best is None or key < (best.cost, tuple(sorted(best.arcs))):
            best = cut
        if elems in seen or elems == prev:
            break
        seen.add(elems)
        prev = elems
    return timer.report(best, f"si-{init}", iterations=iters, trace=trace)
