"""Polymatroidal network flows: per-node submodular capacities on the
incoming and outgoing incidence sets, augmenting-path maximum flow with
exact arithmetic, min-cut extraction, and the locally-exact convolution
cut cost dual to the flow.

All flow arithmetic is done on integers after scaling by the common
(power-of-two) denominator of the capacity values, so augmentations
terminate and the max-flow/min-cut duality tests are exact.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .graph import Cut, GraphError
from .surrogate import _Timer, _terminals, _finish_cut


class PolyFlowError(RuntimeError):
    pass


def residual_capacity(cost, incidence_arcs, element_of, phi, e, cap=14):
    """Exact residual of arc `e` within one incidence set:
    min over A containing e of f(elements(A)) - phi(A).

    Brute-force reference used by tests and small callers; the flow
    solver keeps faster mask tables with the same semantics.
    """
    arcs = sorted(incidence_arcs)
    if e not in arcs:
        raise PolyFlowError("arc not in the incidence set")
    if len(arcs) > cap:
        raise PolyFlowError(f"incidence degree {len(arcs)} exceeds cap {cap}")
    others = [a for a in arcs if a != e]
    best = None
    for mask in range(1 << len(others)):
        subset = [e] + [others[i] for i in range(len(others)) if mask >> i & 1]
        val = cost.value({element_of[a] for a in subset}) - sum(phi[a] for a in subset)
        if best is None or val < best:
            best = val
    return best


class _SideTable:
    """Capacity table of one incidence side: arcs in a fixed order, all
    2^d subset capacities as scaled integers, and a cached per-arc
    residual array."""

    def __init__(self, arcs, caps_int):
        self.arcs = arcs
        self.index = {a: i for i, a in enumerate(arcs)}
        self.caps = caps_int
        self.res = None

    def residuals(self, phi):
        if self.res is not None:
            return self.res
        d = len(self.arcs)
        if d == 0:
            self.res = []
            return self.res
        size = 1 << d
        phisum = [0] * size
        local_phi = [phi[a] for a in self.arcs]
        for mask in range(1, size):
            low = mask & -mask
            phisum[mask] = phisum[mask ^ low] + local_phi[low.bit_length() - 1]
        res = [None] * d
        caps = self.caps
        for mask in range(1, size):
            slack = caps[mask] - phisum[mask]
            mm = mask
            while mm:
                low = mm & -mm
                i = low.bit_length() - 1
                if res[i] is None or slack < res[i]:
                    res[i] = slack
                mm ^= low
        self.res = res
        return res


@dataclass
class FlowState:
    phi: list                    # per-arc flow values (floats)
    value: float
    source_side: frozenset       # residual-reachable node set
    scale: int                   # common denominator of the exact arithmetic
    phi_int: list = field(repr=False, default=None)
    value_frac: Fraction = None
    augmentations: int = 0
    # feasibility certificates: one minimal tight arc set per saturated
    # arc, keyed by (node, "out"|"in")
    tight_sets: dict = field(default_factory=dict)


def _build_tables(inst, degree_cap):
    g = inst.graph
    f = inst.cost
    tables = []
    denom = 1
    raw = []
    for v in range(g.n):
        for arcs in (sorted(g.out_arcs[v]), sorted(g.in_arcs[v])):
            d = len(arcs)
            if d > degree_cap:
                raise PolyFlowError(
                    f"incidence degree {d} at node {v} exceeds cap {degree_cap}")
            caps = [Fraction(0)] * (1 << d)
            for mask in range(1, 1 << d):
                elems = {g.element_of[arcs[i]] for i in range(d) if mask >> i & 1}
                caps[mask] = Fraction(f.value(elems))
                denom = max(denom, caps[mask].denominator)
            raw.append((arcs, caps))
    for arcs, caps in raw:
        caps_int = [int(c * denom) for c in caps]
        tables.append(_SideTable(arcs, caps_int))
    return tables, denom


def max_polyflow(inst, s=None, t=None, degree_cap=14):
    """Maximum flow under per-node submodular capacities.

    Augments along shortest residual paths (hop count, then smallest
    node ids); a forward arc is usable while both its tail-out and
    head-in residuals are positive, a backward arc while it carries
    flow.  Terminates exactly thanks to the integer scaling.
    """
    s = inst.s if s is None else s
    t = inst.t if t is None else t
    if s is None or t is None:
        raise GraphError("polyflow needs terminals")
    g = inst.graph
    tables, denom = _build_tables(inst, degree_cap)
    out_table = lambda v: tables[2 * v]
    in_table = lambda v: tables[2 * v + 1]
    phi = [0] * g.m

    def forward_residual(a):
        u, v = g.arcs[a]
        ot = out_table(u)
        it = in_table(v)
        return min(ot.residuals(phi)[ot.index[a]], it.residuals(phi)[it.index[a]])

    augmentations = 0
    while True:
        # distance-to-t BFS over the residual graph
        INF = g.n + 1
        dist = [INF] * g.n
        dist[t] = 0
        queue = [t]
        fwd_ok = [forward_residual(a) > 0 for a in range(g.m)]
        while queue:
            nxt = []
            for v in queue:
                for a in g.in_arcs[v]:
                    u = g.arcs[a][0]
                    if fwd_ok[a] and dist[u] == INF:
                        dist[u] = dist[v] + 1
                        nxt.append(u)
                for a in g.out_arcs[v]:
                    w = g.arcs[a][1]
                    if phi[a] > 0 and dist[w] == INF:
                        dist[w] = dist[v] + 1
                        nxt.append(w)
            queue = nxt
        if dist[s] == INF:
            break
        # lexicographically smallest optimal node walk from s
        path = []  # (arc, +1 forward / -1 backward)
        u = s
        while u != t:
            best = None
            for a in g.out_arcs[u]:
                v = g.arcs[a][1]
                if fwd_ok[a] and dist[v] == dist[u] - 1:
                    if best is None or (v, 0, a) < best:
                        best = (v, 0, a)
            for a in g.in_arcs[u]:
                w = g.arcs[a][0]
                if phi[a] > 0 and dist[w] == dist[u] - 1:
                    if best is None or (w, 1, a) < best:
                        best = (w, 1, a)
            if best is None:
                raise PolyFlowError("BFS labels inconsistent with residuals")
            v, kind, a = best
            path.append((a, 1 if kind == 0 else -1))
            u = v
        delta = None
        for a, direction in path:
            room = forward_residual(a) if direction > 0 else phi[a]
            if delta is None or room < delta:
                delta = room
        if delta <= 0:
            raise PolyFlowError("zero bottleneck on an augmenting path")
        touched = set()
        for a, direction in path:
            phi[a] += direction * delta
            u, v = g.arcs[a]
            touched.add(2 * u)
            touched.add(2 * v + 1)
        for idx in touched:
            tables[idx].res = None
        augmentations += 1

    # residual-reachable side from s
    side = {s}
    stack = [s]
    while stack:
        u = stack.pop()
        for a in g.out_arcs[u]:
            v = g.arcs[a][1]
            if v not in side and forward_residual(a) > 0:
                side.add(v)
                stack.append(v)
        for a in g.in_arcs[u]:
            w = g.arcs[a][0]
            if w not in side and phi[a] > 0:
                side.add(w)
                stack.append(w)
    value_int = (sum(phi[a] for a in g.out_arcs[s])
                 - sum(phi[a] for a in g.in_arcs[s]))
    value = Fraction(value_int, denom)

    # certificates: for every saturated arc, a smallest tight set of its
    # incidence side (slack 0 under the exact arithmetic)
    tight = {}
    for v in range(g.n):
        for direction, table in (("out", out_table(v)), ("in", in_table(v))):
            d = len(table.arcs)
            if d == 0:
                continue
            phisum = [0] * (1 << d)
            local_phi = [phi[a] for a in table.arcs]
            for mask in range(1, 1 << d):
                low = mask & -mask
                phisum[mask] = phisum[mask ^ low] + local_phi[low.bit_length() - 1]
            found = []
            for mask in sorted(range(1, 1 << d), key=lambda m: (bin(m).count("1"), m)):
                if table.caps[mask] == phisum[mask]:
                    sel = frozenset(table.arcs[i] for i in range(d) if mask >> i & 1)
                    if not any(old <= sel for old in found):
                        found.append(sel)
            if found:
                tight[(v, direction)] = found
    return FlowState(phi=[p / denom for p in phi], value=float(value),
                     source_side=frozenset(side), scale=denom,
                     phi_int=list(phi), value_frac=value,
                     augmentations=augmentations, tight_sets=tight)


def fhat_pmf(inst, cut_arcs, cap=20):
    """Convolution cut cost: min over head/tail assignments of the sum of
    f over each node's assigned group.  Exact enumeration with monotone
    pruning; refuses |C| > cap because no generic minimizer exists for
    this (non-submodular) function."""
    arcs = sorted(cut_arcs)
    if len(arcs) > cap:
        raise PolyFlowError(f"cut of {len(arcs)} arcs exceeds evaluation cap {cap}")
    g = inst.graph
    f = inst.cost
    if not arcs:
        return 0.0
    groups = {}
    best = [float("inf")]

    def assign(i, total):
        if total >= best[0]:
            return
        if i == len(arcs):
            best[0] = total
            return
        a = arcs[i]
        elem = g.element_of[a]
        for node in g.arcs[a]:
            cur = groups.setdefault(node, set())
            if elem in cur:
                assign(i + 1, total)
                continue
            before = f.value(cur)
            cur.add(elem)
            after = f.value(cur)
            assign(i + 1, total + (after - before))
            cur.discard(elem)

    assign(0, 0.0)
    return best[0]


def extract_min_cut(inst, flow_state, s=None, t=None, check=True, check_cap=20):
    """delta+(source side) of the residual reachability; verifies the
    strong-duality equality fhat_pmf(cut) == flow value when the cut is
    small enough to evaluate."""
    s = inst.s if s is None else s
    t = inst.t if t is None else t
    g = inst.graph
    side = flow_state.source_side
    if t in side:
        raise PolyFlowError("flow state is not maximal: t is residual-reachable")
    arcs = g.delta_plus(side)
    if check and len(arcs) <= check_cap:
        dual = fhat_pmf(inst, arcs, cap=check_cap)
        if abs(dual - flow_state.value) > 1e-9 * max(1.0, abs(dual)):
            raise PolyFlowError(
                f"duality violated: fhat_pmf={dual} vs flow={flow_state.value}")
    return Cut(arcs=arcs, cost=None, minimal=True, side=side)


def solve_pf(inst, s=None, t=None, degree_cap=14):
    """Approximate MinCoopCut via the polymatroidal flow dual."""
    s, t = _terminals(inst, s, t)
    timer = _Timer(inst)
    state = max_polyflow(inst, s, t, degree_cap=degree_cap)
    raw = extract_min_cut(inst, state, s, t, check=False)
    cut = _finish_cut(inst, raw.arcs, s, t)
    extra = {"flow_value": state.value, "augmentations": state.augmentations}
    if len(raw.arcs) <= 20:
        extra["fhat_pmf"] = fhat_pmf(inst, raw.arcs)
    if inst.known_optimum is not None and inst.known_optimum.side is not None:
        opt_arcs = inst.graph.delta_plus(inst.known_optimum.side)
        extra["delta_s"] = len({inst.graph.arcs[a][0] for a in opt_arcs})
        extra["delta_t"] = len({inst.graph.arcs[a][1] for a in opt_arcs})
    return timer.report(cut, "pf", iterations=state.augmentations,
                        surrogate_value=state.value, **extra)
