"""Convex relaxation of MinCoopCut and everything attached to it:
projected subgradient on the Lovász extension (with node potentials x
and implied edge lengths y), threshold and distance rounding, the
per-node certificate factor, the exact tiny-scale maximum cooperative
flow (constraint generation + rational simplex), an exact cutting-plane
variant of the relaxation for duality tests, and the flow-cut gap
sandwich for parallel-path graphs."""

from dataclasses import dataclass, field
from fractions import Fraction
import math
import time

from .graph import Cut, GraphError, is_st_cut
from .simplex import solve_lp
from .submodular import greedy_vertex, lovasz_extension
from .surrogate import _Timer, _terminals, _finish_cut


@dataclass
class FractionalSolution:
    x: list                   # node potentials, x[s]=1, x[t]=0
    y: list                   # per-arc lengths max(0, x[tail]-x[head])
    objective: float          # Lovász value at the element-level lengths
    iterations: int
    history: list = field(default_factory=list, repr=False)
    s: int = None
    t: int = None


def _element_lengths(g, x):
    """Element-level lengths and the arc realizing each positive one."""
    y_el = [0.0] * g.num_elements
    carrier = [None] * g.num_elements
    for a, (u, v) in enumerate(g.arcs):
        d = x[u] - x[v]
        c = g.element_of[a]
        if d > y_el[c]:
            y_el[c] = d
            carrier[c] = a
    return y_el, carrier


def solve_relaxation(inst, s=None, t=None, iters=2000, step_schedule=None):
    """Projected subgradient on x with y eliminated as
    y(e) = max(0, x(tail) - x(head)).

    The subgradient chains the greedy vertex of the submodular polyhedron
    through the active (strictly positive) length terms; kinks at ties
    take the zero branch.  Step defaults to a/sqrt(k) with a = initial
    objective / m; the best iterate is returned.
    """
    s, t = _terminals(inst, s, t)
    g = inst.graph
    f = inst.cost
    n = g.n

    # hop-distance initialization: x decreases from s to t
    INF = float("inf")
    dist = [INF] * n
    dist[t] = 0
    queue = [t]
    while queue:
        nxt = []
        for v in queue:
            for a in g.in_arcs[v]:
                u = g.arcs[a][0]
                if dist[u] == INF:
                    dist[u] = dist[v] + 1
                    nxt.append(u)
        queue = nxt
    if dist[s] == INF:
        raise GraphError("t unreachable from s")
    scale = dist[s]
    x = [1.0 if dist[v] == INF else min(1.0, dist[v] / scale) for v in range(n)]
    x[s], x[t] = 1.0, 0.0

    def objective_at(xv):
        y_el, carrier = _element_lengths(g, xv)
        if not any(y_el):
            return 0.0, y_el, carrier, [0.0] * g.num_elements
        z = greedy_vertex(f, y_el)
        return sum(zi * yi for zi, yi in zip(z, y_el)), y_el, carrier, z

    obj0, *_ = objective_at(x)
    a0 = obj0 / max(1, g.num_elements) if obj0 > 0 else 1.0 / max(1, g.num_elements)
    if step_schedule is None:
        step_schedule = lambda k: a0 / math.sqrt(k)

    best_obj = None
    best_x = None
    history = []
    for k in range(1, iters + 1):
        obj, y_el, carrier, z = objective_at(x)
        history.append(obj)
        if best_obj is None or obj < best_obj:
            best_obj = obj
            best_x = list(x)
        if not math.isfinite(obj):
            raise ValueError("non-finite oracle value in relaxation")
        grad = [0.0] * n
        for c in range(g.num_elements):
            if y_el[c] > 0.0 and z[c] != 0.0:
                u, v = g.arcs[carrier[c]]
                grad[u] += z[c]
                grad[v] -= z[c]
        step = step_schedule(k)
        x = [min(1.0, max(0.0, xi - step * gi)) for xi, gi in zip(x, grad)]
        x[s], x[t] = 1.0, 0.0

    y_arc = [max(0.0, best_x[u] - best_x[v]) for (u, v) in inst.graph.arcs]
    return FractionalSolution(x=best_x, y=y_arc, objective=best_obj,
                              iterations=iters, history=history, s=s, t=t)


def round_edge_threshold(inst, frac, s=None, t=None):
    """Algorithm-2 rounding: grow the prefix of arcs in descending y*
    order until it cuts, prune, and report theta plus the 1/theta
    certificate."""
    s, t = _terminals(inst, s if s is not None else frac.s,
                      t if t is not None else frac.t)
    timer = _Timer(inst)
    g = inst.graph
    order = sorted(range(g.m), key=lambda a: (-frac.y[a], a))
    chosen = []
    theta = None
    i = 0
    while i < g.m:
        j = i
        while j < g.m and frac.y[order[j]] == frac.y[order[i]]:
            chosen.append(order[j])
            j += 1
        if is_st_cut(g, chosen, s, t):
            theta = frac.y[order[i]]
            break
        i = j
    if theta is None:
        raise GraphError("no prefix of y* is a cut (graph disconnected?)")
    cut = _finish_cut(inst, chosen, s, t)
    certificate = (1.0 / theta) if theta > 0 else float("inf")
    return timer.report(cut, "cr", surrogate_value=frac.objective,
                        theta=theta, certificate=certificate,
                        relax_objective=frac.objective)


def round_distance(inst, frac, s=None, t=None):
    """Distance-based rounding: scan the n-1 thresholds between sorted
    x* values, return the best cut delta+(V_theta); also reports the
    exact expectation over a uniform theta plus the per-node expectation
    / restricted-Lovász pairs behind its guarantee."""
    s, t = _terminals(inst, s if s is not None else frac.s,
                      t if t is not None else frac.t)
    timer = _Timer(inst)
    g = inst.graph
    x = frac.x
    values = sorted({x[v] for v in range(g.n)} | {0.0})
    best = None
    expectation = 0.0
    per_node_expect = [0.0] * g.n
    for lo, hi in zip(values, values[1:]):
        side = frozenset(v for v in range(g.n) if x[v] >= hi)
        arcs = g.delta_plus(side)
        val = inst.cost_of_arcs(arcs)
        width = hi - lo
        expectation += width * val
        for u in range(g.n):
            local = [a for a in arcs if g.arcs[a][0] == u]
            if local:
                per_node_expect[u] += width * inst.cost_of_arcs(local)
        if best is None or val < best[0]:
            best = (val, arcs)
    per_node_lovasz = []
    for u in range(g.n):
        vec = [0.0] * g.num_elements
        for a in g.out_arcs[u]:
            d = x[g.arcs[a][0]] - x[g.arcs[a][1]]
            if d > 0:
                c = g.element_of[a]
                vec[c] = max(vec[c], d)
        per_node_lovasz.append(lovasz_extension(inst.cost, vec))
    cut = _finish_cut(inst, best[1], s, t)
    return timer.report(cut, "db", surrogate_value=frac.objective,
                        expectation=expectation,
                        per_node_expectation=per_node_expect,
                        per_node_lovasz=per_node_lovasz,
                        relax_objective=frac.objective)


def certificate_factor(inst, frac):
    """sum_v Lovász(f, y*|delta+(v)) / Lovász(f, y*): the data-dependent
    approximation factor of distance rounding (1.0 when separators align
    with incidence sets, at most n-1 in general)."""
    g = inst.graph
    y_el, _ = _element_lengths(g, frac.x)
    denom = lovasz_extension(inst.cost, y_el)
    if denom == 0.0:
        return 1.0
    total = 0.0
    for u in range(g.n):
        vec = [0.0] * g.num_elements
        for a in g.out_arcs[u]:
            d = frac.x[g.arcs[a][0]] - frac.x[g.arcs[a][1]]
            if d > 0:
                c = g.element_of[a]
                vec[c] = max(vec[c], d)
        total += lovasz_extension(inst.cost, vec)
    return total / denom


def _solve_and_round(inst, s, t, iters, step_schedule, rounder):
    timer = _Timer(inst)
    frac = solve_relaxation(inst, s, t, iters=iters, step_schedule=step_schedule)
    rep = rounder(inst, frac, s, t)
    # account for the relaxation itself, not just the rounding pass
    rep.oracle_calls = inst.cost.calls - timer.calls0
    rep.wall_time = time.perf_counter() - timer.t0
    rep.iterations = frac.iterations
    return rep


def solve_cr(inst, s=None, t=None, iters=2000, step_schedule=None):
    """Convex relaxation + threshold rounding (CR)."""
    s, t = _terminals(inst, s, t)
    return _solve_and_round(inst, s, t, iters, step_schedule, round_edge_threshold)


def solve_db(inst, s=None, t=None, iters=2000, step_schedule=None):
    """Convex relaxation + distance rounding (DB)."""
    s, t = _terminals(inst, s, t)
    return _solve_and_round(inst, s, t, iters, step_schedule, round_distance)


# ---------------------------------------------------------------------------
# exact tiny-scale machinery


@dataclass
class CoopFlowResult:
    value: float
    value_frac: Fraction
    phi: list
    active_sets: list
    flow_cut_gap: float = None
    best_cut_value: float = None


def _frac_cost(inst):
    cache = {}

    def fc(elems):
        key = frozenset(elems)
        if key not in cache:
            cache[key] = Fraction(inst.cost.value(key))
        return cache[key]

    return fc


def max_coop_flow_small(inst, s=None, t=None, element_cap=16):
    """Exact maximum cooperative flow by constraint generation.

    Variables are per-arc flows plus the flow value; capacity constraints
    phi(A) <= f(A) are kept for a working family of element sets (seeded
    with singletons) and separated exactly by brute-force minimization of
    f(S) - phi(S).  The LP itself is solved with the rational simplex, so
    every separation decision is exact.
    """
    s, t = _terminals(inst, s, t)
    g = inst.graph
    m_el = g.num_elements
    if m_el > element_cap:
        raise GraphError(f"{m_el} elements exceed exact-solve cap {element_cap}")
    fc = _frac_cost(inst)
    nvar = g.m + 1  # phi per arc, then nu
    nu = g.m

    a_eq = []
    b_eq = []
    for v in range(g.n):
        if v == t:
            continue  # t's balance is implied
        row = [Fraction(0)] * nvar
        for a in g.out_arcs[v]:
            row[a] += 1
        for a in g.in_arcs[v]:
            row[a] -= 1
        if v == s:
            row[nu] = Fraction(-1)
        a_eq.append(row)
        b_eq.append(Fraction(0))

    working = [frozenset({c}) for c in range(m_el)]
    objective = [Fraction(0)] * nvar
    objective[nu] = Fraction(1)

    while True:
        a_ub = []
        b_ub = []
        for sset in working:
            row = [Fraction(0)] * nvar
            for a in range(g.m):
                if g.element_of[a] in sset:
                    row[a] += 1
            a_ub.append(row)
            b_ub.append(fc(sset))
        value, xvec = solve_lp(objective, a_ub, b_ub, a_eq, b_eq, maximize=True)
        phi = xvec[: g.m]
        phi_el = [Fraction(0)] * m_el
        for a in range(g.m):
            phi_el[g.element_of[a]] += phi[a]
        # exact separation: min over S of f(S) - phi(S)
        worst = None
        elems = list(range(m_el))
        for mask in range(1, 1 << m_el):
            sset = frozenset(elems[i] for i in range(m_el) if mask >> i & 1)
            slack = fc(sset) - sum(phi_el[c] for c in sset)
            if worst is None or slack < worst[0]:
                worst = (slack, sset)
        if worst[0] >= 0:
            break
        if worst[1] in working:
            raise RuntimeError("separation returned an existing constraint")
        working.append(worst[1])

    active = [sorted(ss) for ss in working
              if fc(ss) - sum(phi_el[c] for c in ss) == 0]
    result = CoopFlowResult(value=float(value), value_frac=value,
                            phi=[float(p) for p in phi], active_sets=active)
    if g.n <= 12:
        from .graph import enumerate_st_cuts
        best = min(inst.cost_of_arcs(c.arcs) for c in enumerate_st_cuts(g, s, t))
        result.best_cut_value = best
        result.flow_cut_gap = best / float(value) if value > 0 else float("inf")
    return result


def solve_relaxation_exact(inst, s=None, t=None, element_cap=16, max_rounds=500):
    """Exact optimum of the convex relaxation at tiny scale: cutting
    planes on the Lovász epigraph (tau >= z.y for greedy vertices z),
    solved with the rational simplex.  The subgradient solver stays the
    benchmark algorithm; this exists so strong duality against the
    cooperative flow can be asserted at 1e-6 and tighter."""
    s, t = _terminals(inst, s, t)
    g = inst.graph
    m_el = g.num_elements
    if m_el > element_cap:
        raise GraphError(f"{m_el} elements exceed exact-solve cap {element_cap}")
    fc = _frac_cost(inst)

    # variables: y_el (m_el), x_v for v not in {s,t} (n-2), tau
    free = [v for v in range(g.n) if v not in (s, t)]
    xpos = {v: m_el + i for i, v in enumerate(free)}
    tau = m_el + len(free)
    nvar = tau + 1

    a_ub = []
    b_ub = []
    for a, (u, v) in enumerate(g.arcs):
        # x_u - x_v - y_el <= 0, with x_s = 1, x_t = 0 folded into the rhs
        row = [Fraction(0)] * nvar
        row[g.element_of[a]] -= 1
        rhs = Fraction(0)
        if u == s:
            rhs -= 1
        elif u != t:
            row[xpos[u]] += 1
        if v == s:
            rhs += 1
        elif v != t:
            row[xpos[v]] -= 1
        a_ub.append(row)
        b_ub.append(rhs)
    for v in free:
        row = [Fraction(0)] * nvar
        row[xpos[v]] = Fraction(1)
        a_ub.append(row)
        b_ub.append(Fraction(1))

    objective = [Fraction(0)] * nvar
    objective[tau] = Fraction(1)

    def greedy_vertex_frac(y):
        order = sorted(range(m_el), key=lambda c: (-y[c], c))
        z = [Fraction(0)] * m_el
        prefix = []
        prev = Fraction(0)
        for c in order:
            prefix.append(c)
            cur = fc(prefix)
            z[c] = cur - prev
            prev = cur
        return z

    cuts = []
    for _ in range(max_rounds):
        rows = list(a_ub)
        rhss = list(b_ub)
        for z in cuts:
            row = [Fraction(0)] * nvar
            for c in range(m_el):
                row[c] = z[c]
            row[tau] = Fraction(-1)
            rows.append(row)
            rhss.append(Fraction(0))
        value, xvec = solve_lp(objective, rows, rhss, maximize=False)
        y = xvec[:m_el]
        z = greedy_vertex_frac(y)
        lov = sum(zc * yc for zc, yc in zip(z, y))
        if lov <= xvec[tau]:
            return float(value), [float(v) for v in y]
        cuts.append(z)
    raise RuntimeError("cutting-plane loop did not converge")


def flow_cut_gap_bounds(inst, s=None, t=None, subset_cap=20, optimum=None):
    """Lemma-1 sandwich for graphs that decompose into edge-disjoint
    parallel s-t paths: bounds on f(C*)/nu* from the per-path minimum
    average capacity min_{P' subset of P} f(P')/|P'| (brute-forced)."""
    s, t = _terminals(inst, s, t)
    g = inst.graph
    # validate the parallel-path shape
    paths = []
    for first in sorted(g.out_arcs[s]):
        path = [first]
        node = g.arcs[first][1]
        while node != t:
            outs = g.out_arcs[node]
            if len(outs) != 1 or len(g.in_arcs[node]) != 1:
                raise GraphError("graph is not a disjoint union of s-t paths")
            path.append(outs[0])
            node = g.arcs[outs[0]][1]
        paths.append(path)
    if sum(len(p) for p in paths) != g.m:
        raise GraphError("extra arcs outside the path decomposition")

    min_avg = []
    for path in paths:
        if len(path) > subset_cap:
            raise GraphError(f"path of {len(path)} arcs exceeds cap {subset_cap}")
        best = None
        for mask in range(1, 1 << len(path)):
            sub = [path[i] for i in range(len(path)) if mask >> i & 1]
            val = inst.cost_of_arcs(sub) / len(sub)
            if best is None or val < best:
                best = val
        min_avg.append(best)
    if optimum is None:
        if inst.known_optimum is not None:
            optimum = inst.known_optimum.value
        else:
            from .graph import enumerate_st_cuts
            optimum = min(inst.cost_of_arcs(c.arcs)
                          for c in enumerate_st_cuts(g, s, t))
    lower = optimum / sum(min_avg)
    upper = optimum / max(min_avg)
    return lower, upper
