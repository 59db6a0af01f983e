"""Benchmark harness: solver registry, global-cut orchestration over the
n-1 (s,t) reduction, the instance-spec language shared with the CLI, and
report emission (JSONL rows, summary CSV, optional SVG).

Reproducibility contract: results.jsonl contains only deterministic
fields, so a rerun with the same config is byte-identical; wall-clock
timings go to timings.jsonl, and summary.csv carries the aggregate
mean_time_ms column.
"""

from dataclasses import dataclass
import csv
import hashlib
import json
import os
import time

from .graph import GraphError, enumerate_st_cuts, is_st_cut
from .greedy import solve_greedy_random, solve_greedy_det
from .instances import (
    Instance, InstanceError, gen_bisection_reduction, gen_convolution_witness,
    gen_greedy_adversarial, gen_lowerbound_paths, gen_worstcase,
    load_instance, make_instance, _crossing_elements,
)
from .polyflow import solve_pf
from .relax import solve_cr, solve_db
from .submodular import curvature
from .surrogate import (
    SolverReport, solve_ea, solve_mb, solve_mc, solve_queyranne,
    solve_semigradient,
)


def _solver_mc(inst, s, t, seed, params):
    return solve_mc(inst, s, t)


def _solver_mb(inst, s, t, seed, params):
    return solve_mb(inst, s, t)


def _solver_qu(inst, s, t, seed, params):
    return solve_queyranne(inst)


def _solver_ea(inst, s, t, seed, params):
    return solve_ea(inst, s, t)


def _solver_si(init):
    def run(inst, s, t, seed, params):
        return solve_semigradient(inst, s, t, init=init,
                                  max_iters=params.get("max_iters", 50),
                                  seed=seed)
    return run


def _solver_pf(inst, s, t, seed, params):
    return solve_pf(inst, s, t, degree_cap=params.get("degree_cap", 14))


def _solver_cr(inst, s, t, seed, params):
    return solve_cr(inst, s, t, iters=params.get("iters", 2000))


def _solver_db(inst, s, t, seed, params):
    return solve_db(inst, s, t, iters=params.get("iters", 2000))


def _solver_gm(inst, s, t, seed, params):
    return solve_greedy_random(inst, s, t, beta_mode="max", seed=seed)


def _solver_ga(inst, s, t, seed, params):
    return solve_greedy_random(inst, s, t, beta_mode="0.9max", seed=seed)


def _solver_gh(inst, s, t, seed, params):
    return solve_greedy_det(inst, s, t)


SOLVERS = {
    "mc": _solver_mc,
    "mb": _solver_mb,
    "qu": _solver_qu,
    "ea": _solver_ea,
    "si": _solver_si("empty"),
    "ri": _solver_si("random_basis"),
    "mi": _solver_si("min_basis"),
    "pf": _solver_pf,
    "cr": _solver_cr,
    "db": _solver_db,
    "gm": _solver_gm,
    "ga": _solver_ga,
    "gh": _solver_gh,
}

GLOBAL_ONLY = {"qu"}
RANDOMIZED = {"gm", "ga", "ri"}


def run_global(inst, solver_name, seed=0, params=None):
    """Global minimum cooperative cut via n-1 (s,t) runs with s fixed at
    node 0 (exact reduction); Queyranne is natively global and runs once."""
    params = params or {}
    run = SOLVERS[solver_name]
    if solver_name in GLOBAL_ONLY:
        return run(inst, None, None, seed, params)
    best = None
    total_calls = 0
    total_time = 0.0
    total_iters = 0
    for t in range(1, inst.graph.n):
        rep = run(inst, 0, t, seed, params)
        total_calls += rep.oracle_calls
        total_time += rep.wall_time
        total_iters += rep.iterations
        key = (rep.cost, tuple(sorted(rep.solution.arcs)))
        if best is None or key < best[0]:
            best = (key, rep)
    rep = best[1]
    return SolverReport(solution=rep.solution, solver=rep.solver,
                        iterations=total_iters, oracle_calls=total_calls,
                        wall_time=total_time,
                        surrogate_value=rep.surrogate_value, extra=rep.extra)


def run_solver(inst, solver_name, mode=None, seed=0, params=None):
    params = params or {}
    if solver_name not in SOLVERS:
        raise ValueError(f"unknown solver {solver_name!r}")
    mode = mode or inst.mode
    if mode == "global":
        return run_global(inst, solver_name, seed, params)
    if solver_name in GLOBAL_ONLY:
        raise GraphError(f"solver {solver_name} is global-only")
    return SOLVERS[solver_name](inst, inst.s, inst.t, seed, params)


# ---------------------------------------------------------------------------
# instance specs


def build_instance(spec):
    """Instance from a JSON-able spec dict (the config/gen language)."""
    kind = spec.get("kind", "standard")
    if kind == "standard":
        graph = spec["graph"]
        return make_instance(graph[0], tuple(graph[1]), spec["family"],
                             seed=spec.get("seed", 0),
                             s=spec.get("s"), t=spec.get("t"))
    if kind == "worstcase":
        return gen_worstcase(spec["variant"], spec["n"],
                             eps=spec.get("eps", 1e-3))
    if kind == "lowerbound":
        inst_h, inst_f = gen_lowerbound_paths(spec["paths"], spec["path_len"],
                                              seed=spec.get("seed", 0))
        return inst_h if spec.get("which", "h") == "h" else inst_f
    if kind == "greedy_adversarial":
        return gen_greedy_adversarial(spec["n"], gamma=spec.get("gamma", 1.0),
                                      eps=spec.get("eps", 0.01))
    if kind == "bisection":
        return gen_bisection_reduction(spec["n_b"],
                                       [tuple(e) for e in spec["edges"]],
                                       spec["weights"], spec["beta"])
    if kind == "convolution_witness":
        return gen_convolution_witness()
    if kind == "file":
        return load_instance(spec["path"])
    raise InstanceError(f"unknown instance kind {kind!r}")


def instance_label(spec):
    kind = spec.get("kind", "standard")
    if kind == "standard":
        gk, gp = spec["graph"]
        return f"{spec['family']}@{gk}-{'x'.join(str(p) for p in gp)}#s{spec.get('seed', 0)}"
    if kind == "worstcase":
        return f"worstcase_{spec['variant']}@n{spec['n']}"
    if kind == "lowerbound":
        return f"lowerbound_{spec.get('which', 'h')}@{spec['paths']}x{spec['path_len']}#s{spec.get('seed', 0)}"
    return f"{kind}#{hashlib.sha256(json.dumps(spec, sort_keys=True).encode()).hexdigest()[:8]}"


# ---------------------------------------------------------------------------
# benchmark execution


@dataclass
class ResultRow:
    instance: str
    family: str
    solver: str
    seed: int
    cost: float
    best_known: float
    factor: float
    bound: float = None
    oracle_calls: int = 0
    iterations: int = 0
    wall_time_ms: float = 0.0

    def public(self):
        """Deterministic fields for results.jsonl (timing excluded)."""
        return {"instance": self.instance, "family": self.family,
                "solver": self.solver, "seed": self.seed, "cost": self.cost,
                "best_known": self.best_known, "factor": self.factor,
                "bound": self.bound, "oracle_calls": self.oracle_calls,
                "iterations": self.iterations}


def _validate_solution(inst, rep, mode):
    cut = rep.solution
    g = inst.graph
    if mode == "st":
        if not is_st_cut(g, cut.arcs, inst.s, inst.t):
            raise RuntimeError(f"{rep.solver} returned a non-cut")
        for a in cut.arcs:
            if is_st_cut(g, cut.arcs - {a}, inst.s, inst.t):
                raise RuntimeError(f"{rep.solver} returned a non-minimal cut")
    else:
        if cut.side is None or not 0 < len(cut.side) < g.n:
            raise RuntimeError(f"{rep.solver} returned no valid bipartition")
        if cut.arcs != g.delta_plus(cut.side):
            raise RuntimeError(f"{rep.solver} cut does not match its side")


def _enumerated_optimum(inst, mode, cap=10):
    g = inst.graph
    if g.n > cap:
        return None
    if mode == "st":
        return min(inst.cost_of_arcs(c.arcs)
                   for c in enumerate_st_cuts(g, inst.s, inst.t, cap=cap + 2))
    best = None
    for mask in range(1, 1 << (g.n - 1)):
        side = {0} | {v + 1 for v in range(g.n - 1) if mask >> v & 1}
        if len(side) == g.n:
            continue
        val = inst.cost.value(_crossing_elements(g, side))
        best = val if best is None else min(best, val)
    return best


def _bound_for(inst, solver_name, rep, opt_elements, opt_side, kappa):
    """Theoretical factor when the optimum is known; None otherwise."""
    g = inst.graph
    if solver_name == "gh":
        return float(rep.extra.get("certificate_cut_size"))
    if solver_name in ("cr", "db", "gm", "ga"):
        return float(g.n - 1)
    if opt_elements is None:
        return None
    k = len(opt_elements)
    if solver_name == "mc":
        return float(k)
    if solver_name == "ea":
        return (g.num_elements * k) ** 0.5
    if solver_name == "si":
        # the curvature bound covers the empty-anchor first step only
        return k / ((k - 1) * (1 - kappa) + 1)
    if solver_name == "pf" and opt_side is not None:
        arcs = g.delta_plus(opt_side)
        ds = len({g.arcs[a][0] for a in arcs})
        dt = len({g.arcs[a][1] for a in arcs})
        return float(min(ds, dt))
    return None


def _normalize_solver_specs(specs):
    out = []
    for sp in specs:
        if isinstance(sp, str):
            sp = {"name": sp}
        name = sp["name"]
        seeds = sp.get("seeds", [0])
        params = {k: v for k, v in sp.items() if k not in ("name", "seeds")}
        out.append((name, seeds, params))
    return out


def _run_task(args):
    inst_spec, mode, name, seed, params = args
    inst = build_instance(inst_spec)
    t0 = time.perf_counter()
    rep = run_solver(inst, name, mode=mode, seed=seed, params=params)
    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    _validate_solution(inst, rep, mode if mode else inst.mode)
    kappa = curvature(inst.cost)
    opt_elements = opt_side = None
    if inst.known_optimum is not None:
        opt_elements = inst.known_optimum.elements
        opt_side = inst.known_optimum.side
    bound = _bound_for(inst, name, rep, opt_elements, opt_side, kappa)
    return {
        "cost": rep.cost,
        "oracle_calls": rep.oracle_calls,
        "iterations": rep.iterations,
        "bound": bound,
        "wall_ms": elapsed_ms,
    }


def bench(config, progress=None):
    """Run the solver x instance matrix of a config dict and write
    results.jsonl / timings.jsonl / summary.csv into output_dir.

    Config keys: instances (list of {spec..., seeds: [...], mode}),
    solvers (list of {name, seeds?, params...}), output_dir, parallelism.
    COOPCUT_THREADS overrides parallelism.
    """
    out_dir = config.get("output_dir", "bench_out")
    os.makedirs(out_dir, exist_ok=True)
    canonical = json.dumps(config, sort_keys=True)
    config_hash = hashlib.sha256(canonical.encode()).hexdigest()

    tasks = []
    inst_info = {}
    for inst_cfg in config["instances"]:
        spec = {k: v for k, v in inst_cfg.items() if k not in ("seeds", "mode")}
        mode = inst_cfg.get("mode", "global")
        for inst_seed in inst_cfg.get("seeds", [spec.get("seed", 0)]):
            sp = dict(spec)
            sp["seed"] = inst_seed
            label = instance_label(sp)
            inst_info[label] = (sp, mode)
            for name, solver_seeds, params in _normalize_solver_specs(config["solvers"]):
                if name in GLOBAL_ONLY and mode == "st":
                    continue
                for sseed in (solver_seeds if name in RANDOMIZED else [0]):
                    tasks.append((label, sp, mode, name, sseed, params))
    tasks.sort(key=lambda task: (task[0], task[3], task[4]))

    parallelism = int(os.environ.get("COOPCUT_THREADS",
                                     config.get("parallelism", 1)))
    raw = {}
    work = [(sp, mode, name, sseed, params)
            for (_, sp, mode, name, sseed, params) in tasks]
    if parallelism > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            outs = list(pool.map(_run_task, work))
    else:
        outs = []
        for i, w in enumerate(work):
            outs.append(_run_task(w))
            if progress:
                progress(i + 1, len(work), tasks[i])
    for task, out in zip(tasks, outs):
        raw[(task[0], task[3], task[4])] = out

    # best-known per instance: all solver results, plus the known optimum,
    # plus the enumeration oracle at desk scale
    best_known = {}
    for label, (sp, mode) in inst_info.items():
        vals = [out["cost"] for (lab, _, _), out in raw.items() if lab == label]
        inst = build_instance(sp)
        if inst.known_optimum is not None:
            vals.append(inst.known_optimum.value)
        enum = _enumerated_optimum(inst, mode)
        if enum is not None:
            vals.append(enum)
        best_known[label] = min(vals)

    rows = []
    for (label, sp, mode, name, sseed, params) in tasks:
        out = raw[(label, name, sseed)]
        denom = best_known[label]
        factor = out["cost"] / denom if denom > 0 else float("inf")
        if factor < 1 - 1e-12:
            raise RuntimeError(
                f"factor below 1 on {label}/{name}: the best-known value is stale")
        rows.append(ResultRow(
            instance=label, family=inst_info[label][0].get("family", label),
            solver=name, seed=sseed, cost=out["cost"], best_known=denom,
            factor=factor, bound=out["bound"],
            oracle_calls=out["oracle_calls"], iterations=out["iterations"],
            wall_time_ms=out["wall_ms"]))

    with open(os.path.join(out_dir, "results.jsonl"), "w") as fh:
        for row in rows:
            fh.write(json.dumps(row.public(), sort_keys=True) + "\n")
    with open(os.path.join(out_dir, "timings.jsonl"), "w") as fh:
        for row in rows:
            fh.write(json.dumps({"instance": row.instance, "solver": row.solver,
                                 "seed": row.seed,
                                 "wall_time_ms": round(row.wall_time_ms, 3)},
                                sort_keys=True) + "\n")
    with open(os.path.join(out_dir, "meta.json"), "w") as fh:
        json.dump({"config_hash": config_hash, "schema_version": 1,
                   "config": config}, fh, sort_keys=True, indent=1)
    write_summary_csv(rows, os.path.join(out_dir, "summary.csv"))
    return rows


def write_summary_csv(rows, path):
    """Per (family, solver): mean/max empirical factor, mean oracle calls,
    mean wall time."""
    groups = {}
    for row in rows:
        groups.setdefault((row.family, row.solver), []).append(row)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["family", "solver", "mean_factor", "max_factor",
                         "mean_calls", "mean_time_ms"])
        for (family, solver), rs in sorted(groups.items()):
            writer.writerow([
                family, solver,
                f"{sum(r.factor for r in rs) / len(rs):.6f}",
                f"{max(r.factor for r in rs):.6f}",
                f"{sum(r.oracle_calls for r in rs) / len(rs):.1f}",
                f"{sum(r.wall_time_ms for r in rs) / len(rs):.3f}",
            ])


def write_svg_chart(rows, path):
    """Static bar chart of mean factors per solver, grouped by family."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    groups = {}
    for row in rows:
        groups.setdefault(row.family, {}).setdefault(row.solver, []).append(row.factor)
    families = sorted(groups)
    solvers = sorted({row.solver for row in rows})
    fig, axes = plt.subplots(len(families), 1,
                             figsize=(8, 2.2 * max(1, len(families))),
                             squeeze=False)
    for ax, family in zip(axes[:, 0], families):
        means = [sum(groups[family].get(sv, [0])) / max(1, len(groups[family].get(sv, [1])))
                 for sv in solvers]
        maxima = [max(groups[family].get(sv, [0])) for sv in solvers]
        ax.bar(range(len(solvers)), means, color="#4878cf")
        ax.plot(range(len(solvers)), maxima, "rx")
        ax.set_xticks(range(len(solvers)))
        ax.set_xticklabels(solvers, fontsize=7)
        ax.set_ylabel("factor", fontsize=7)
        ax.set_title(family, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def default_config(output_dir="bench_out", seeds=(1, 2), relax_iters=500):
    """The desk-scale benchmark: 5x5 grids and 4-clique clustered graphs
    across every cost family and every solver, in global mode."""
    families = ["matrix_rank_I", "matrix_rank_II", "labels_I", "labels_II",
                "unstructured_I", "unstructured_II", "bestcut_I", "bestcut_II",
                "truncated_rank"]
    instances = []
    for graph in (["grid", ["I", 5, 5]], ["clustered", [4, 5, 6]]):
        for family in families:
            instances.append({"kind": "standard", "graph": graph,
                              "family": family, "seeds": list(seeds),
                              "mode": "global"})
    solvers = [{"name": n} for n in
               ["mc", "mb", "qu", "ea", "si", "ri", "mi", "pf", "gm", "ga", "gh"]]
    solvers.append({"name": "cr", "iters": relax_iters})
    solvers.append({"name": "db", "iters": relax_iters})
    return {"instances": instances, "solvers": solvers,
            "output_dir": output_dir, "parallelism": 1}
