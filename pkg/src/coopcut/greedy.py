"""Path-cover solvers on the covering form of the relaxation: the
randomized greedy cover (GM with the maximal step, GA with 0.9 of it)
and the deterministic min-marginal heuristic (GH) with its cut-size
certificate."""

from .graph import shortest_path
from .rng import Rng
from .surrogate import _Timer, _terminals, _finish_cut

_ZERO_TOL = 1e-12


def _cover_arcs(g, covered, y, elem):
    covered.add(elem)
    for a in g.arcs_of_element(elem):
        y[a] = 1.0


def solve_greedy_random(inst, s=None, t=None, beta_mode="max", seed=0,
                        empty_pass_cap=50):
    """Randomized greedy path cover.

    Each round finds the shortest path under the current 0/1 lengths y;
    while its length is < 1 the path is a violated covering constraint.
    beta is chosen as (1.0 or 0.9) times the smallest marginal on the
    path; every edge is then added with probability beta / f(e|C) against
    the live, intra-pass C.  Zero-marginal edges are always taken.  With
    beta_mode="max" the cheapest edge is added deterministically, so at
    most m passes occur; the 0.9 mode force-adds the min-marginal edge
    after `empty_pass_cap` consecutive empty passes.
    """
    if beta_mode not in ("max", "0.9max"):
        raise ValueError(f"unknown beta_mode {beta_mode!r}")
    factor = 1.0 if beta_mode == "max" else 0.9
    s, t = _terminals(inst, s, t)
    timer = _Timer(inst)
    g = inst.graph
    f = inst.cost
    rng = Rng(seed)
    y = [0.0] * g.m
    covered = set()
    trace = []
    empty_passes = 0
    passes = 0
    while True:
        path = shortest_path(g, y, s, t)
        if path is None:
            break
        if sum(y[a] for a in path) >= 1.0 - _ZERO_TOL:
            break
        passes += 1
        base_val = f.value(covered)
        start_marg = {}
        for a in path:
            c = g.element_of[a]
            if c not in start_marg:
                start_marg[c] = f.value(covered | {c}) - base_val
        min_marg = min(start_marg.values())
        step = {"path": list(path), "added": [], "marginals": dict(start_marg)}
        if min_marg <= _ZERO_TOL:
            # all zero-marginal edges are free: take them greedily
            step["beta"] = 0.0
            for a in path:
                c = g.element_of[a]
                if c in covered:
                    continue
                if start_marg[c] <= _ZERO_TOL:
                    _cover_arcs(g, covered, y, c)
                    step["added"].append(c)
            trace.append(step)
            continue
        beta = factor * min_marg
        step["beta"] = beta
        added_any = False
        for a in path:
            c = g.element_of[a]
            if c in covered:
                continue
            marg = f.marginal(c, covered)
            prob = 1.0 if marg <= _ZERO_TOL else min(1.0, beta / marg)
            if rng.random() < prob:
                _cover_arcs(g, covered, y, c)
                step["added"].append(c)
                added_any = True
        if added_any:
            empty_passes = 0
        else:
            empty_passes += 1
            if empty_passes > empty_pass_cap:
                # termination guard for the sub-maximal beta mode
                c = min(sorted(start_marg), key=lambda e: (start_marg[e], e))
                _cover_arcs(g, covered, y, c)
                step["added"].append(c)
                step["forced"] = True
                empty_passes = 0
        trace.append(step)
    raw_arcs = frozenset(a for a in range(g.m) if y[a] > 0.0)
    cut = _finish_cut(inst, raw_arcs, s, t)
    name = "gm" if beta_mode == "max" else "ga"
    return timer.report(cut, name, iterations=passes,
                        trace=trace, raw_elements=sorted(covered))


def solve_greedy_det(inst, s=None, t=None):
    """Deterministic heuristic: cover each uncovered path with its single
    minimum-marginal edge (ascending element id on ties).  Reports the
    |C| certificate of the f(C) <= |C| f(C*) guarantee."""
    s, t = _terminals(inst, s, t)
    timer = _Timer(inst)
    g = inst.graph
    f = inst.cost
    y = [0.0] * g.m
    covered = set()
    passes = 0
    while True:
        path = shortest_path(g, y, s, t)
        if path is None:
            break
        if sum(y[a] for a in path) >= 1.0 - _ZERO_TOL:
            break
        passes += 1
        base_val = f.value(covered)
        best = None
        for a in path:
            c = g.element_of[a]
            if c in covered:
                continue
            marg = f.value(covered | {c}) - base_val
            if best is None or (marg, c) < best:
                best = (marg, c)
        _cover_arcs(g, covered, y, best[1])
    raw_arcs = frozenset(a for a in range(g.m) if y[a] > 0.0)
    cut = _finish_cut(inst, raw_arcs, s, t)
    certificate = len(cut.elements(g))
    return timer.report(cut, "gh", iterations=passes,
                        certificate_cut_size=certificate,
                        raw_elements=sorted(covered))
