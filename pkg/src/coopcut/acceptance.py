"""Acceptance criteria: every criterion is a callable returning an
AcceptanceResult; `run_all` executes them in order and prints one
pass/fail line each.  All tolerances are pinned here, not configurable.
Run via `coopcut selftest` or tests/test_acceptance.py."""

from dataclasses import dataclass
from fractions import Fraction
import math
import statistics
import tempfile
import time

from .bench import bench, default_config, run_global
from .graph import Graph, enumerate_st_cuts, longest_simple_path_length
from .greedy import solve_greedy_det, solve_greedy_random
from .instances import (
    Instance, derangement_counts, f_bal, gen_bisection_reduction,
    gen_convolution_witness, gen_labels, gen_worstcase, instance_to_json,
    make_instance, recommended_beta, _crossing_elements,
)
from .polyflow import fhat_pmf, max_polyflow
from .relax import (
    FractionalSolution, max_coop_flow_small, round_distance,
    round_edge_threshold, solve_relaxation,
)
from .rng import Rng
from .submodular import (
    ModularCost, MaxWeightCost, ConcaveOfWeightCost, SubmodularOracle,
    check_monotone, check_normalized, check_submodular, curvature, subsets,
)
from .surrogate import (
    ea_lite_value, ea_lite_weights, singleton_weights, solve_ea, solve_mc,
    solve_queyranne, solve_semigradient, supergradient_bound,
)


@dataclass
class AcceptanceResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _global_optimum(inst):
    g = inst.graph
    best = None
    arg = None
    for mask in range(1, 1 << (g.n - 1)):
        side = {0} | {v + 1 for v in range(g.n - 1) if mask >> v & 1}
        if len(side) == g.n:
            continue
        elems = _crossing_elements(g, side)
        val = inst.cost.value(elems)
        if best is None or val < best:
            best, arg = val, elems
    return best, arg


def _st_optimum(inst):
    return min(inst.cost_of_arcs(c.arcs)
               for c in enumerate_st_cuts(inst.graph, inst.s, inst.t))


def _enumerable_st_instances():
    out = []
    for graph_kind, graph_params, tnode in (("clustered", (2, 3, 1), 5),
                                            ("grid", ("I", 2, 3), 5)):
        for family in ("labels_I", "matrix_rank_I", "unstructured_II",
                       "bestcut_I", "truncated_rank"):
            inst = make_instance(graph_kind, graph_params, family, seed=11)
            inst.s, inst.t = 0, tnode
            out.append(inst)
    return out


def criterion_1_worstcase_b():
    """Worst case (b), n=10: everyone hits the optimum except QU at b+1."""
    inst = gen_worstcase("b", 10)
    opt, arg = _global_optimum(inst)
    checks = []
    checks.append(("enumerated optimum", opt == 1.0))
    checks.append(("optimum is E_k", arg == inst.known_optimum.elements))
    for name, params in (("mc", {}), ("mb", {}), ("ea", {}), ("si", {}),
                         ("pf", {}), ("cr", {"iters": 400}),
                         ("db", {"iters": 400}), ("gm", {}), ("gh", {})):
        rep = run_global(inst, name, params=params)
        checks.append((f"{name} cost 1", rep.cost == 1.0))
    qu = solve_queyranne(inst)
    checks.append(("qu cost 101", qu.cost == 101.0))
    checks.append(("qu cut is delta(v1)",
                   qu.solution.elements(inst.graph)
                   == _crossing_elements(inst.graph, {0})))
    bad = [name for name, ok in checks if not ok]
    return not bad, f"failed: {bad}" if bad else "all solvers exact; qu at b+1"


def criterion_2_worstcase_a():
    """Worst case (a), n=10, eps=0.001: exact evaluations and MC's factor."""
    inst = gen_worstcase("a", 10)
    g = inst.graph
    vals = {
        "f(E_k)": (inst.cost.value(inst.known_optimum.elements), 1.025),
        "f(delta v1)": (inst.cost.value(_crossing_elements(g, {0})), 6.005),
        "f(delta vn)": (inst.cost.value(_crossing_elements(g, {9})), 21.005),
    }
    bad = [k for k, (got, want) in vals.items() if abs(got - want) > 1e-12]
    opt, _ = _global_optimum(inst)
    if abs(opt - 1.025) > 1e-12:
        bad.append("enumerated optimum")
    rep = run_global(inst, "mc")
    # all ten single-node cuts tie at additive cost 25.005; source-side
    # extraction lands on delta(v1), giving the lower of the two factors
    allowed = (6.005, 21.005)
    if not any(abs(rep.cost - v) <= 1e-12 for v in allowed):
        bad.append(f"mc cost {rep.cost}")
    factor = rep.cost / opt
    detail = f"mc returned {rep.cost:.3f}, factor {factor:.4f} (= 6.005/1.025)"
    return not bad, f"failed: {bad}" if bad else detail


def criterion_3_convolution_witness():
    """Appendix-C witness: convolution marginals 0.5 then 2.0, exact."""
    inst = gen_convolution_witness(a=1.5, b=2.0, eps=1e-3)
    m1 = fhat_pmf(inst, {1, 2}) - fhat_pmf(inst, {1})
    m2 = fhat_pmf(inst, {0, 1, 2}) - fhat_pmf(inst, {0, 1})
    ok = abs(m1 - 0.5) <= 1e-12 and abs(m2 - 2.0) <= 1e-12
    return ok, f"marginals {m1} then {m2} (non-submodularity witness)"


def criterion_4_flow_cut_gap():
    """Single path n=5, max-weight gamma=1: nu* = 1/4 exact, gap n-1 = 4,
    subgradient objective within 1e-3."""
    g = Graph.directed(5, [(i, i + 1) for i in range(4)])
    inst = Instance(g, MaxWeightCost([1.0] * 4), s=0, t=4, family="max_weight")
    res = max_coop_flow_small(inst)
    mincut = _st_optimum(inst)
    frac = solve_relaxation(inst, iters=2000)
    checks = {
        "nu* = 1/4 exact": res.value_frac == Fraction(1, 4),
        "min cut = 1": mincut == 1.0,
        "gap = 4 = n-1": res.flow_cut_gap == 4.0,
        "relaxation within 1e-3": abs(frac.objective - 0.25) <= 1e-3,
    }
    bad = [k for k, ok in checks.items() if not ok]
    return not bad, f"failed: {bad}" if bad else \
        f"nu*=1/4, gap=4, subgradient objective {frac.objective:.6f}"


def _random_duality_instance(seed):
    rng = Rng(seed)
    n = rng.randint(4, 6)
    edges = set()
    for v in range(1, n):
        edges.add((rng.randint(0, v - 1), v))
    target = min(12, n * (n - 1) // 2)
    want = rng.randint(n - 1, target)
    while len(edges) < want:
        u, v = rng.randint(0, n - 1), rng.randint(0, n - 1)
        if u != v:
            edges.add((min(u, v), max(u, v)))
    g = Graph.bidirect(n, sorted(edges))
    m = g.num_elements
    pick = seed % 4
    if pick == 0:
        cost = ConcaveOfWeightCost([rng.uniform(0.3, 2.5) for _ in range(m)], "sqrt")
    elif pick == 1:
        cost = MaxWeightCost([rng.uniform(0.3, 2.5) for _ in range(m)])
    elif pick == 2:
        cost = gen_labels("I", g, seed=rng.randint(0, 10 ** 9))
    else:
        cost = ConcaveOfWeightCost([rng.uniform(0.5, 3.0) for _ in range(m)], "log1p")
    return Instance(g, cost, s=0, t=n - 1, family="max_weight")


def criterion_5_duality_suite():
    """20 random tiny instances: polymatroidal max-flow equals the
    enumerated minimum of fhat_pmf to 1e-9."""
    worst = 0.0
    for seed in range(1, 21):
        inst = _random_duality_instance(seed)
        state = max_polyflow(inst)
        best = min(fhat_pmf(inst, c.arcs)
                   for c in enumerate_st_cuts(inst.graph, inst.s, inst.t))
        worst = max(worst, abs(state.value - best))
        if abs(state.value - best) > 1e-9:
            return False, f"seed {seed}: flow {state.value} vs cut {best}"
    return True, f"20 instances, max |flow - min fhat| = {worst:.2e}"


def criterion_6_surrogate_bounds():
    """f <= fhat for the additive, EA-lite and supergradient surrogates
    (exhaustive, m <= 12), plus the factor guarantees on enumerable
    instances."""
    for inst in _enumerable_st_instances():
        f = inst.cost
        m = f.m
        w_add = singleton_weights(inst)
        w_sq = ea_lite_weights(inst)
        anchors = list(subsets(range(m)))
        for b_set in anchors:
            fb = f.value(b_set)
            if fb > sum(w_add[c] for c in b_set) + 1e-9:
                return False, f"f_add bound broken on {inst.family}"
            if fb > ea_lite_value(inst, b_set, w_sq) + 1e-9:
                return False, f"f_ea bound broken on {inst.family}"
        for a_set in anchors:
            for b_set in anchors:
                if f.value(b_set) > supergradient_bound(f, b_set, a_set) + 1e-9:
                    return False, f"supergradient bound broken on {inst.family}"
        opt = _st_optimum(inst)
        k = len(min((c.elements(inst.graph)
                     for c in enumerate_st_cuts(inst.graph, inst.s, inst.t)),
                    key=lambda els: (inst.cost.value(els), len(els))))
        if solve_mc(inst).cost > k * opt + 1e-9:
            return False, f"MC factor broken on {inst.family}"
        if solve_ea(inst).cost > math.sqrt(m * k) * opt + 1e-9:
            return False, f"EA factor broken on {inst.family}"
        kappa = curvature(f)
        bound = k / ((k - 1) * (1 - kappa) + 1)
        if solve_semigradient(inst).cost > bound * opt + 1e-9:
            return False, f"semigradient curvature bound broken on {inst.family}"
    return True, "additive/EA-lite/supergradient bounds and factors hold"


def criterion_7_rounding_greedy():
    """Lemma-9 certificates, the Lemma-10 expectation identity at 1e-9,
    the deterministic-greedy certificate, and the GM Monte-Carlo factor
    against |P_max| over 200 seeds (2 sigma)."""
    for inst in _enumerable_st_instances()[:4]:
        opt = _st_optimum(inst)
        n = inst.graph.n
        frac = solve_relaxation(inst, iters=1200)
        cr = round_edge_threshold(inst, frac)
        if cr.cost > cr.extra["certificate"] * frac.objective + 1e-9:
            return False, f"1/theta certificate broken on {inst.family}"
        if cr.cost > (n - 1) * opt + 1e-9:
            return False, f"n-1 bound broken on {inst.family}"
        gh = solve_greedy_det(inst)
        if gh.cost > gh.extra["certificate_cut_size"] * opt + 1e-9:
            return False, f"greedy certificate broken on {inst.family}"

    # Lemma 10 identity on random fractional points
    inst = _enumerable_st_instances()[0]
    g = inst.graph
    rng = Rng(2718)
    for _ in range(6):
        x = [0.0] * g.n
        x[inst.s] = 1.0
        for v in range(g.n):
            if v not in (inst.s, inst.t):
                x[v] = rng.random()
        frac = FractionalSolution(
            x=x, y=[max(0.0, x[u] - x[v]) for (u, v) in g.arcs],
            objective=0.0, iterations=0, s=inst.s, t=inst.t)
        rep = round_distance(inst, frac)
        for u in range(g.n):
            if abs(rep.extra["per_node_expectation"][u]
                   - rep.extra["per_node_lovasz"][u]) > 1e-9:
                return False, f"Lemma 10 identity broken at node {u}"

    # GM Monte-Carlo factor
    inst = _enumerable_st_instances()[0]
    opt = _st_optimum(inst)
    pmax = longest_simple_path_length(inst.graph, inst.s, inst.t)
    factors = [solve_greedy_random(inst, seed=s).cost / opt for s in range(200)]
    mean = statistics.fmean(factors)
    sigma = statistics.stdev(factors) / math.sqrt(len(factors))
    if mean > pmax + 2 * sigma:
        return False, f"GM mean factor {mean:.3f} above |P_max| = {pmax}"
    return True, f"certificates hold; GM mean factor {mean:.3f} <= |P_max| = {pmax}"


def criterion_8_combinatorics():
    """Derangement counts vs enumeration (n <= 8), the f_bal closed form
    vs the derangement average (1e-12), and the bisection reduction
    recovering brute-force optima for n_B in {4, 6}."""
    import itertools
    for n in range(1, 9):
        d, dp = derangement_counts(n)
        bd = bdp = 0
        for p in itertools.permutations(range(n)):
            full = all(p[i] != i for i in range(n))
            relaxed = all(p[i] != i for i in range(n - 1))
            bd += full
            bdp += relaxed
        if (d, dp) != (bd, bdp):
            return False, f"derangement counts differ at n={n}"

    for n_b in (3, 4, 5):
        perms = [p for p in itertools.permutations(range(n_b))
                 if all(p[i] != i for i in range(n_b))]
        for cs_size in range(n_b + 1):
            for ct_size in range(n_b + 1):
                cs = set(range(cs_size))
                ct = set(range(n_b - ct_size, n_b))
                want = statistics.fmean(
                    cs_size + ct_size - sum(1 for i in cs if p[i] in ct)
                    for p in perms)
                got = f_bal(cs_size, ct_size, len(cs & ct), n_b)
                if abs(got - want) > 1e-12:
                    return False, f"f_bal mismatch at n_b={n_b}"

    rng = Rng(13)
    for n_b in (4, 6):
        edges = [(u, v) for u in range(n_b) for v in range(u + 1, n_b)
                 if rng.random() < 0.7]
        if not edges:
            edges = [(0, 1)]
        weights = [round(rng.uniform(0.5, 3.0), 3) for _ in edges]
        beta = recommended_beta(n_b, weights)
        inst = gen_bisection_reduction(n_b, edges, weights, beta)
        best_val, best_cut = None, None
        for cut in enumerate_st_cuts(inst.graph, inst.s, inst.t):
            val = inst.cost_of_arcs(cut.arcs)
            if best_val is None or val < best_val:
                best_val, best_cut = val, cut
        side_vb = set(best_cut.side) - {inst.s}

        def bisection_weight(v1):
            return sum(w for (u, v), w in zip(edges, weights)
                       if (u in v1) != (v in v1))
        best_bisection = min(
            bisection_weight(set(c))
            for c in itertools.combinations(range(n_b), n_b // 2))
        if len(side_vb) != n_b // 2:
            return False, f"reduction n_b={n_b}: optimum not balanced"
        if abs(bisection_weight(side_vb) - best_bisection) > 1e-9:
            return False, f"reduction n_b={n_b}: not the optimal bisection"
    return True, "derangements, f_bal and the bisection reduction all exact"


class _CorruptedOracle(SubmodularOracle):
    """Supermodular plant used to prove the checker catches violations."""

    def _value(self, s):
        return float(len(s)) ** 2


def criterion_9_generator_hygiene():
    """Every cost family normalized/monotone/submodular at m <= 12,
    bestcut optima verified by enumeration at n <= 8, bit-identical
    regeneration, and the checker catches a planted violation."""
    families = ["matrix_rank_I", "matrix_rank_II", "labels_I", "labels_II",
                "unstructured_I", "unstructured_II", "bestcut_I", "bestcut_II",
                "truncated_rank"]
    for graph_kind, graph_params in (("grid", ("I", 2, 3)),
                                     ("clustered", (2, 3, 1))):
        for family in families:
            inst = make_instance(graph_kind, graph_params, family, seed=23)
            f = inst.cost
            if not check_normalized(f):
                return False, f"{family} not normalized"
            if check_monotone(f) is not None:
                return False, f"{family} not monotone"
            if check_submodular(f) is not None:
                return False, f"{family} not submodular"
    for family in ("bestcut_I", "bestcut_II"):
        for seed in (1, 2, 3):
            inst = make_instance("clustered", (2, 4, 2), family, seed=seed)
            opt, arg = _global_optimum(inst)
            if arg != inst.known_optimum.elements or \
                    abs(opt - inst.known_optimum.value) > 1e-12:
                return False, f"{family} seed {seed}: planted optimum not global"
    for family in ("labels_II", "unstructured_I"):
        a = instance_to_json(make_instance("grid", ("II", 3, 3), family, seed=7))
        b = instance_to_json(make_instance("grid", ("II", 3, 3), family, seed=7))
        if a != b:
            return False, f"{family} not bit-reproducible"
    if check_submodular(_CorruptedOracle(4)) is None:
        return False, "checker failed to catch the planted violation"
    return True, "all families clean; planted corruption caught with witness"


def criterion_10_desk_benchmark(output_dir=None):
    """Full desk benchmark: 5x5 grids + 4-clique clustered graphs, all
    families x all solvers; factors within bounds; summary CSV emitted."""
    import os
    tmp = output_dir or tempfile.mkdtemp(prefix="coopcut_bench_")
    config = default_config(output_dir=tmp, seeds=(1, 2), relax_iters=500)
    rows = bench(config)
    for row in rows:
        if row.factor < 1 - 1e-12:
            return False, f"factor below 1 on {row.instance}/{row.solver}"
        if row.bound is not None and row.factor > row.bound + 1e-9:
            return False, (f"{row.solver} factor {row.factor:.3f} exceeds "
                           f"bound {row.bound:.3f} on {row.instance}")
    csv_path = os.path.join(tmp, "summary.csv")
    if not os.path.exists(csv_path):
        return False, "summary.csv missing"
    with open(csv_path) as fh:
        header = fh.readline().strip()
    if header != "family,solver,mean_factor,max_factor,mean_calls,mean_time_ms":
        return False, f"unexpected summary header: {header}"
    return True, f"{len(rows)} rows, all factors within bounds -> {tmp}"


CRITERIA = [
    ("1 worst-case (b) exactness", criterion_1_worstcase_b, 10.0),
    ("2 worst-case (a) values", criterion_2_worstcase_a, 10.0),
    ("3 convolution witness", criterion_3_convolution_witness, 10.0),
    ("4 flow-cut gap n-1", criterion_4_flow_cut_gap, 30.0),
    ("5 polyflow duality suite", criterion_5_duality_suite, 60.0),
    ("6 surrogate bound suite", criterion_6_surrogate_bounds, 120.0),
    ("7 rounding/greedy suite", criterion_7_rounding_greedy, 180.0),
    ("8 combinatorics", criterion_8_combinatorics, 60.0),
    ("9 generator hygiene", criterion_9_generator_hygiene, 120.0),
    ("10 desk benchmark", criterion_10_desk_benchmark, 600.0),
]


def run_all(fast=False):
    results = []
    for name, func, budget in CRITERIA:
        if fast and name.startswith("10"):
            continue
        t0 = time.perf_counter()
        try:
            passed, detail = func()
        except Exception as exc:  # a crash is a failure, not an abort
            passed, detail = False, f"exception: {exc!r}"
        elapsed = time.perf_counter() - t0
        if elapsed > budget:
            passed = False
            detail += f" [over budget: {elapsed:.1f}s > {budget:.0f}s]"
        results.append(AcceptanceResult(name, passed, detail, elapsed))
        print(f"[{'PASS' if passed else 'FAIL'}] {name} "
              f"({elapsed:.1f}s): {detail}")
    return results
