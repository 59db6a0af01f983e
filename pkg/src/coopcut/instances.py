"""Benchmark instance generators: graph topologies, the submodular cost
families, worst-case constructions, the parallel-paths lower-bound
instances, and the graph-bisection reduction with its derangement-count
machinery.

Every generator is a pure function of (params, seed); all randomness
flows through coopcut.rng.Rng, so identical inputs give bit-identical
instances.  Saved instance files always embed explicit cost tables so
they are portable without the generator code.
"""

from dataclasses import dataclass, field
import hashlib
import json
import math

from .graph import Graph
from .rng import Rng, child_seed
from .submodular import (
    SubmodularOracle, ModularCost, MaxWeightCost, ConcaveOfWeightCost,
    ScaledSumCost,
)


class InstanceError(ValueError):
    pass


# ---------------------------------------------------------------------------
# cost families


class MatrixRankGF2(SubmodularOracle):
    """f(A) = rank over GF(2) of the columns indexed by A.

    Columns are stored as row-bitmask ints; evaluation is bitset Gaussian
    elimination, exact.
    """

    def __init__(self, columns, d):
        super().__init__(len(columns))
        self.columns = [int(c) for c in columns]
        self.d = int(d)

    def _value(self, subset):
        basis = []
        rank = 0
        for e in sorted(subset):
            v = self.columns[e]
            for b in basis:
                v = min(v, v ^ b)
            if v:
                basis.append(v)
                basis.sort(reverse=True)
                rank += 1
        return float(rank)

    def _prefix_values(self, order):
        basis = []
        rank = 0
        vals = []
        for e in order:
            v = self.columns[e]
            for b in basis:
                v = min(v, v ^ b)
            if v:
                basis.append(v)
                basis.sort(reverse=True)
                rank += 1
            vals.append(float(rank))
        return vals

    def spec(self):
        return {"type": "matrix_rank_gf2", "d": self.d, "columns": self.columns}


class LabelCoverageCost(SubmodularOracle):
    """f(A) = number of distinct labels among A."""

    def __init__(self, labels, num_labels):
        super().__init__(len(labels))
        self.labels = [int(x) for x in labels]
        self.num_labels = int(num_labels)

    def _value(self, subset):
        return float(len({self.labels[e] for e in subset}))

    def _prefix_values(self, order):
        seen = set()
        vals = []
        for e in order:
            seen.add(self.labels[e])
            vals.append(float(len(seen)))
        return vals

    def spec(self):
        return {"type": "label_coverage", "num_labels": self.num_labels,
                "labels": self.labels}


class BestcutOneCost(SubmodularOracle):
    """1[A hits the planted cut] + modular weights off the planted cut."""

    def __init__(self, cut_elements, weights):
        super().__init__(len(weights))
        self.cut_elements = frozenset(cut_elements)
        self.weights = [float(w) for w in weights]

    def _value(self, subset):
        hit = 1.0 if subset & self.cut_elements else 0.0
        return hit + sum(self.weights[e] for e in subset - self.cut_elements)

    def _prefix_values(self, order):
        vals = []
        acc = 0.0
        hit = 0.0
        for e in order:
            if e in self.cut_elements:
                hit = 1.0
            else:
                acc += self.weights[e]
            vals.append(hit + acc)
        return vals

    def spec(self):
        return {"type": "bestcut1", "cut_elements": sorted(self.cut_elements),
                "weights": self.weights}


class BestcutTwoCost(SubmodularOracle):
    """Bestcut with submodularity on all edges: indicator of the planted
    cut, modular weights on the two halves B and C of the remainder, plus
    a max term within each half."""

    def __init__(self, cut_elements, part_b, part_c, weights):
        super().__init__(len(weights))
        self.cut_elements = frozenset(cut_elements)
        self.part_b = frozenset(part_b)
        self.part_c = frozenset(part_c)
        self.weights = [float(w) for w in weights]

    def _value(self, subset):
        hit = 1.0 if subset & self.cut_elements else 0.0
        rest = subset - self.cut_elements
        total = sum(self.weights[e] for e in rest)
        max_b = max((self.weights[e] for e in subset & self.part_b), default=0.0)
        max_c = max((self.weights[e] for e in subset & self.part_c), default=0.0)
        return hit + total + max_b + max_c

    def _prefix_values(self, order):
        vals = []
        acc = hit = max_b = max_c = 0.0
        for e in order:
            if e in self.cut_elements:
                hit = 1.0
            else:
                acc += self.weights[e]
                if e in self.part_b:
                    max_b = max(max_b, self.weights[e])
                elif e in self.part_c:
                    max_c = max(max_c, self.weights[e])
            vals.append(hit + acc + max_b + max_c)
        return vals

    def spec(self):
        return {"type": "bestcut2", "cut_elements": sorted(self.cut_elements),
                "part_b": sorted(self.part_b), "part_c": sorted(self.part_c),
                "weights": self.weights}


class TruncatedRankCost(SubmodularOracle):
    """f(A) = min(|A \\ R| + min(|A ∩ R|, lam1), lam2)."""

    def __init__(self, m, hidden, lam1, lam2):
        super().__init__(m)
        self.hidden = frozenset(hidden)
        self.lam1 = float(lam1)
        self.lam2 = float(lam2)

    def _value(self, subset):
        inside = len(subset & self.hidden)
        outside = len(subset) - inside
        return min(outside + min(inside, self.lam1), self.lam2)

    def _prefix_values(self, order):
        vals = []
        inside = outside = 0
        for e in order:
            if e in self.hidden:
                inside += 1
            else:
                outside += 1
            vals.append(min(outside + min(inside, self.lam1), self.lam2))
        return vals

    def spec(self):
        return {"type": "truncated_rank", "m": self.m,
                "hidden": sorted(self.hidden),
                "lam1": self.lam1, "lam2": self.lam2}


class GroupIndicatorCost(SubmodularOracle):
    """Worst-case family: 1[A hits E_k] + b * (number of other groups hit)
    + eps * |A ∩ E_k|."""

    def __init__(self, m, ek, groups, b, eps):
        super().__init__(m)
        self.ek = frozenset(ek)
        self.groups = [frozenset(gp) for gp in groups]
        self.b = float(b)
        self.eps = float(eps)

    def _value(self, subset):
        hit_k = subset & self.ek
        v = (1.0 if hit_k else 0.0) + self.eps * len(hit_k)
        v += self.b * sum(1 for gp in self.groups if subset & gp)
        return v

    def _prefix_values(self, order):
        group_of = getattr(self, "_group_of", None)
        if group_of is None:
            group_of = {}
            for i, gp in enumerate(self.groups):
                for e in gp:
                    group_of[e] = i
            self._group_of = group_of
        vals = []
        k_count = 0
        hit = [False] * len(self.groups)
        hits = 0
        for e in order:
            if e in self.ek:
                k_count += 1
            else:
                gi = group_of.get(e)
                if gi is not None and not hit[gi]:
                    hit[gi] = True
                    hits += 1
            vals.append((1.0 if k_count else 0.0) + self.eps * k_count
                        + self.b * hits)
        return vals

    def spec(self):
        return {"type": "group_indicator", "m": self.m, "ek": sorted(self.ek),
                "groups": [sorted(gp) for gp in self.groups],
                "b": self.b, "eps": self.eps}


class BisectionBalanceCost(SubmodularOracle):
    """Cost of the Graph-Bisection reduction: original modular weights on
    E_B plus beta * f_bal on the terminal stars."""

    def __init__(self, weights_eb, beta, es_elements, et_elements, n_b):
        super().__init__(len(weights_eb) + len(es_elements) + len(et_elements))
        if n_b < 2:
            raise InstanceError("n_b must be at least 2")
        self.weights_eb = [float(w) for w in weights_eb]
        self.beta = float(beta)
        self.es_elements = list(es_elements)   # es_elements[v] = element id of (s, v)
        self.et_elements = list(et_elements)
        self.n_b = int(n_b)
        self._es_set = frozenset(es_elements)
        self._et_set = frozenset(et_elements)

    def _value(self, subset):
        base = sum(self.weights_eb[e] for e in subset if e < len(self.weights_eb))
        cs = len(subset & self._es_set)
        ct = len(subset & self._et_set)
        overlap = sum(1 for v in range(self.n_b)
                      if self.es_elements[v] in subset and self.et_elements[v] in subset)
        return base + self.beta * f_bal(cs, ct, overlap, self.n_b)

    def spec(self):
        return {"type": "bisection_balance", "weights_eb": self.weights_eb,
                "beta": self.beta, "es_elements": self.es_elements,
                "et_elements": self.et_elements, "n_b": self.n_b}


_COST_TYPES = {
    "modular": lambda s: ModularCost(s["weights"]),
    "max_weight": lambda s: MaxWeightCost(s["weights"]),
    "concave_weight": lambda s: ConcaveOfWeightCost(s["weights"], s["kind"]),
    "scaled_sum": lambda s: ScaledSumCost(s["scale"], [build_cost(p) for p in s["parts"]]),
    "matrix_rank_gf2": lambda s: MatrixRankGF2(s["columns"], s["d"]),
    "label_coverage": lambda s: LabelCoverageCost(s["labels"], s["num_labels"]),
    "bestcut1": lambda s: BestcutOneCost(s["cut_elements"], s["weights"]),
    "bestcut2": lambda s: BestcutTwoCost(s["cut_elements"], s["part_b"],
                                         s["part_c"], s["weights"]),
    "truncated_rank": lambda s: TruncatedRankCost(s["m"], s["hidden"],
                                                  s["lam1"], s["lam2"]),
    "group_indicator": lambda s: GroupIndicatorCost(s["m"], s["ek"], s["groups"],
                                                    s["b"], s["eps"]),
    "bisection_balance": lambda s: BisectionBalanceCost(
        s["weights_eb"], s["beta"], s["es_elements"], s["et_elements"], s["n_b"]),
}


def build_cost(spec):
    kind = spec.get("type")
    if kind not in _COST_TYPES:
        raise InstanceError(f"unknown cost type {kind!r}")
    return _COST_TYPES[kind](spec)


# ---------------------------------------------------------------------------
# instances


@dataclass
class KnownOptimum:
    elements: frozenset
    value: float
    side: frozenset = None


@dataclass
class Instance:
    graph: Graph
    cost: SubmodularOracle
    s: int = None
    t: int = None
    family: str = ""
    seed: int = 0
    params: dict = field(default_factory=dict)
    known_optimum: KnownOptimum = None

    @property
    def mode(self):
        return "st" if self.s is not None else "global"

    def cost_of_arcs(self, arc_ids):
        return self.cost.value(self.graph.elements_of(arc_ids))

    def cost_of_elements(self, elements):
        return self.cost.value(elements)


FAMILIES = {
    "grid", "clustered", "matrix_rank_I", "matrix_rank_II", "labels_I",
    "labels_II", "unstructured_I", "unstructured_II", "bestcut_I",
    "bestcut_II", "truncated_rank", "lowerbound_paths_h", "lowerbound_paths_f",
    "worstcase_a", "worstcase_b", "bisection_reduction", "greedy_adversarial",
    "convolution_witness", "modular", "max_weight",
}


# ---------------------------------------------------------------------------
# graph generators


def gen_grid(gtype, rows, cols):
    """Regular grid graphs (undirected).

    Type I: 4-neighbor grid.  Type II: plus both diagonals of every cell
    (the spec's 2x2 -> 6 edges reading).  Type III: Type I plus wrap
    edges closing rows onto the opposite row and columns onto the
    opposite column (torus closure; the paper's cube wiring is ambiguous).
    """
    if rows < 2 or cols < 2:
        raise InstanceError("grid needs at least 2x2")
    if gtype not in ("I", "II", "III"):
        raise InstanceError(f"unknown grid type {gtype!r}")
    node = lambda r, c: r * cols + c
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((node(r, c), node(r, c + 1)))
            if r + 1 < rows:
                edges.append((node(r, c), node(r + 1, c)))
    if gtype == "II":
        for r in range(rows - 1):
            for c in range(cols - 1):
                edges.append((node(r, c), node(r + 1, c + 1)))
                edges.append((node(r, c + 1), node(r + 1, c)))
    if gtype == "III":
        if rows > 2:
            for c in range(cols):
                edges.append((node(0, c), node(rows - 1, c)))
        if cols > 2:
            for r in range(rows):
                edges.append((node(r, 0), node(r, cols - 1)))
    return Graph.bidirect(rows * cols, edges)


def gen_clustered(k, clique_size, inter_edges, seed):
    """k cliques joined by `inter_edges` inter-clique edges in total; a
    spanning chain among the cliques is laid first so the graph is
    connected for every seed."""
    if k < 1 or clique_size < 2:
        raise InstanceError("need k >= 1 cliques of size >= 2")
    if inter_edges < k - 1:
        raise InstanceError("inter_edges must cover a spanning pattern (k-1)")
    rng = Rng(seed)
    nodes_of = [list(range(i * clique_size, (i + 1) * clique_size)) for i in range(k)]
    edges = []
    for block in nodes_of:
        for i, u in enumerate(block):
            for v in block[i + 1:]:
                edges.append((u, v))
    present = {tuple(sorted(e)) for e in edges}
    inter = []
    for i in range(1, k):
        u = rng.choice(nodes_of[i - 1])
        v = rng.choice(nodes_of[i])
        inter.append((u, v))
        present.add(tuple(sorted((u, v))))
    max_pairs = sum(len(a) * len(b) for i, a in enumerate(nodes_of)
                    for b in nodes_of[i + 1:])
    if inter_edges > max_pairs:
        raise InstanceError("more inter-clique edges requested than pairs exist")
    while len(inter) < inter_edges:
        a = rng.randint(0, k - 1)
        b = rng.randint(0, k - 1)
        if a == b:
            continue
        u = rng.choice(nodes_of[a])
        v = rng.choice(nodes_of[b])
        key = tuple(sorted((u, v)))
        if key in present:
            continue
        present.add(key)
        inter.append(key)
    return Graph.bidirect(k * clique_size, edges + inter)


def _und_adjacency(g):
    adj = [[] for _ in range(g.n)]
    for c, (u, v) in enumerate(g.undirected_edges()):
        adj[u].append(v)
        adj[v].append(u)
    return adj


def _connected_subset(g, size, rng):
    """Grow a connected node set of the given size by random frontier
    expansion; None if the component is too small."""
    adj = _und_adjacency(g)
    start = rng.randint(0, g.n - 1)
    comp = {start}
    while len(comp) < size:
        frontier = sorted({w for x in comp for w in adj[x] if w not in comp})
        if not frontier:
            return None
        comp.add(rng.choice(frontier))
    return frozenset(comp)


def _is_connected_subset(g, nodes):
    nodes = set(nodes)
    if not nodes:
        return False
    adj = _und_adjacency(g)
    start = next(iter(sorted(nodes)))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for w in adj[x]:
            if w in nodes and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == nodes


def _crossing_elements(g, node_set):
    node_set = set(node_set)
    return frozenset(c for c, (u, v) in enumerate(g.undirected_edges())
                     if (u in node_set) != (v in node_set))


# ---------------------------------------------------------------------------
# cost-family generators (each returns an oracle for a given graph)


def gen_matrix_rank(variant, g, seed):
    m = g.num_elements
    if m < 2:
        raise InstanceError("need at least 2 cost elements")

    def one(sub_seed):
        rng = Rng(sub_seed)
        d = max(1, round(0.9 * math.sqrt(m)))
        perm = list(range(d))
        rng.shuffle(perm)
        cols = [1 << perm[i] for i in range(d)]
        cols += [rng.randint(0, (1 << d) - 1) for _ in range(m - d)]
        return MatrixRankGF2(cols, d)

    if variant == "I":
        return one(seed)
    if variant == "II":
        return ScaledSumCost(0.33, [one(child_seed(seed, i)) for i in range(3)])
    raise InstanceError(f"unknown matrix rank variant {variant!r}")


def gen_labels(variant, g, seed):
    m = g.num_elements

    def one(sub_seed):
        rng = Rng(sub_seed)
        num_labels = max(1, round(0.8 * math.sqrt(m)))
        labels = [rng.randint(0, num_labels - 1) for _ in range(m)]
        return LabelCoverageCost(labels, num_labels)

    if variant == "I":
        return one(seed)
    if variant == "II":
        return ScaledSumCost(0.33, [one(child_seed(seed, i)) for i in range(3)])
    raise InstanceError(f"unknown labels variant {variant!r}")


def _unstructured_weights(g, rng):
    """Weight scheme shared by Unstructured I/II: 1.001 across a random
    node set X, one or two heavy weights per node elsewhere (best
    effort), integer weights on the rest."""
    n = g.n
    size = max(1, min(n - 1, round(0.4 * n)))
    x_set = frozenset(rng.sample(range(n), size))
    delta_x = _crossing_elements(g, x_set)
    und = g.undirected_edges()
    w = [None] * g.num_elements
    for c in delta_x:
        w[c] = 1.001
    heavy_count = [0] * n
    hi = n * n / 4.0
    order = list(range(n))
    rng.shuffle(order)
    for v in order:
        if heavy_count[v] >= 1:
            continue
        candidates = [c for c, (a, b) in enumerate(und)
                      if c not in delta_x and w[c] is None and v in (a, b)
                      and heavy_count[a] < 2 and heavy_count[b] < 2]
        if not candidates:
            continue
        c = rng.choice(sorted(candidates))
        w[c] = rng.uniform(n / 2.0, hi)
        a, b = und[c]
        heavy_count[a] += 1
        heavy_count[b] += 1
    top = max(2, round(hi - n + 1))
    for c in range(g.num_elements):
        if w[c] is None:
            w[c] = float(rng.randint(2, top))
    return w


def gen_unstructured(variant, g, seed):
    rng = Rng(seed)
    w = _unstructured_weights(g, rng)
    if variant == "I":
        return ConcaveOfWeightCost(w, "log1p")
    if variant == "II":
        return ConcaveOfWeightCost(w, "sqrt")
    raise InstanceError(f"unknown unstructured variant {variant!r}")


def _sample_planted_cut(g, frac, rng, require_both_connected, tries=1000):
    size = max(1, min(g.n - 1, round(frac * g.n)))
    for _ in range(tries):
        x_set = _connected_subset(g, size, rng)
        if x_set is None:
            continue
        if require_both_connected and not _is_connected_subset(
                g, set(range(g.n)) - set(x_set)):
            continue
        return x_set
    raise InstanceError("could not sample a planted node set")


def gen_bestcut(variant, g, seed):
    """Planted-optimum instances: the cut delta(X*) costs 1 while every
    other cut contains an edge of weight >= 1.5."""
    rng = Rng(seed)
    x_star = _sample_planted_cut(g, 0.4, rng, require_both_connected=True)
    delta = _crossing_elements(g, x_star)
    m = g.num_elements
    weights = [0.0] * m
    for c in range(m):
        if c not in delta:
            weights[c] = rng.uniform(1.5, 2.0)
    part_b = part_c = None
    if variant == "II":
        rest = sorted(set(range(m)) - delta)
        rng.shuffle(rest)
        part_b = frozenset(rest[: len(rest) // 2])
        part_c = frozenset(rest[len(rest) // 2:])
        for part in (part_b, part_c):
            special = rng.sample(sorted(part), min(2, len(part)))
            for c in special:
                weights[c] = rng.uniform(2.1, 2.2)
    elif variant != "I":
        raise InstanceError(f"unknown bestcut variant {variant!r}")

    def build():
        if variant == "I":
            return BestcutOneCost(delta, weights)
        return BestcutTwoCost(delta, part_b, part_c, weights)

    cost = build()
    # The paper's fix-up pass: with connected X* and connected complement
    # no other cut can cost <= 1, but verify at desk scale and repair.
    if g.n <= 10:
        opt_val = cost.value(delta)
        for mask in range(1, 1 << (g.n - 1)):
            side = {0} | {v + 1 for v in range(g.n - 1) if mask >> v & 1}
            if len(side) == g.n:
                continue
            celems = _crossing_elements(g, side)
            if celems == delta:
                continue
            if cost.value(celems) <= opt_val:
                bump = sorted(celems - delta)[0]
                weights[bump] = 2.0
                cost = build()
    return cost, x_star, delta


def gen_truncated_rank(g, seed):
    rng = Rng(seed)
    x_set = _sample_planted_cut(g, 0.3, rng, require_both_connected=False)
    hidden = _crossing_elements(g, x_set)
    lam1 = math.sqrt(len(hidden))
    lam2 = 2.0 * len(hidden)
    return TruncatedRankCost(g.num_elements, hidden, lam1, lam2), x_set, hidden


# ---------------------------------------------------------------------------
# assembled instances


def make_instance(graph_kind, graph_params, family, seed, s=None, t=None):
    """One benchmark instance = one graph + one cost family."""
    if graph_kind == "grid":
        g = gen_grid(*graph_params)
    elif graph_kind == "clustered":
        g = gen_clustered(*graph_params, seed=child_seed(seed, 911))
    else:
        raise InstanceError(f"unknown graph kind {graph_kind!r}")
    params = {"graph": [graph_kind, list(graph_params)]}
    known = None
    if family == "matrix_rank_I":
        cost = gen_matrix_rank("I", g, seed)
    elif family == "matrix_rank_II":
        cost = gen_matrix_rank("II", g, seed)
    elif family == "labels_I":
        cost = gen_labels("I", g, seed)
    elif family == "labels_II":
        cost = gen_labels("II", g, seed)
    elif family == "unstructured_I":
        cost = gen_unstructured("I", g, seed)
    elif family == "unstructured_II":
        cost = gen_unstructured("II", g, seed)
    elif family in ("bestcut_I", "bestcut_II"):
        cost, x_star, delta = gen_bestcut(family[-2:].strip("_"), g, seed)
        known = KnownOptimum(delta, cost.value(delta), x_star)
    elif family == "truncated_rank":
        cost, _, _ = gen_truncated_rank(g, seed)
    else:
        raise InstanceError(f"unknown cost family {family!r}")
    return Instance(graph=g, cost=cost, s=s, t=t, family=family, seed=seed,
                    params=params, known_optimum=known)


def gen_lowerbound_paths(num_paths, path_len, seed):
    """Theorem-1 geometry: `num_paths` disjoint s-t paths of `path_len`
    arcs; returns (instance_h, instance_f) sharing the graph.  f hides a
    random one-edge-per-path cut R of value beta = 8 *num_paths/path_len."""
    if num_paths < 1 or path_len < 1:
        raise InstanceError("need at least one path of one edge")
    s = 0
    t = 1
    edges = []
    nid = 2
    path_edges = []
    for _ in range(num_paths):
        prev = s
        mine = []
        for j in range(path_len):
            nxt = t if j == path_len - 1 else nid
            if nxt != t:
                nid += 1
            mine.append(len(edges))
            edges.append((prev, nxt))
            prev = nxt
        path_edges.append(mine)
    g = Graph.directed(nid, edges)
    rng = Rng(seed)
    hidden = frozenset(rng.choice(p) for p in path_edges)
    beta = 8.0 * num_paths / path_len
    h_cost = TruncatedRankCost(g.m, frozenset(), 0.0, float(num_paths))
    f_cost = TruncatedRankCost(g.m, hidden, beta, float(num_paths))
    first_edges = frozenset(p[0] for p in path_edges)
    inst_h = Instance(g, h_cost, s=s, t=t, family="lowerbound_paths_h",
                      seed=seed, params={"paths": num_paths, "path_len": path_len},
                      known_optimum=KnownOptimum(first_edges, float(num_paths), frozenset({s})))
    inst_f = Instance(g, f_cost, s=s, t=t, family="lowerbound_paths_f",
                      seed=seed, params={"paths": num_paths, "path_len": path_len},
                      known_optimum=KnownOptimum(hidden, min(beta, float(num_paths))))
    return inst_h, inst_f


# Node labeling of the n=10 worst-case instance under which Queyranne's
# pendent-pair sweep (given-order processing, latest minimizing candidate
# kept) returns exactly delta(v1) at cost b+1; found by search and frozen.
_QU_ADVERSARIAL_ORDER = [0, 6, 2, 4, 5, 1, 3, 7, 9, 8]


def gen_worstcase(variant, n, eps=1e-3, node_order=None):
    """Section-7.2 worst case: K_n split into two n/2-cliques plus the
    complete bipartite set E_k between them; cost is an indicator per
    within-half edge group, with (a) b=n/2 and a small linear term, or
    (b) b=n^2.  The optimum is E_k."""
    if n < 4 or n % 2:
        raise InstanceError("n must be even and >= 4")
    half = n // 2
    if node_order is None:
        if variant == "b" and _QU_ADVERSARIAL_ORDER is not None and n == 10:
            node_order = _QU_ADVERSARIAL_ORDER
        else:
            node_order = list(range(n))
    if sorted(node_order) != list(range(n)):
        raise InstanceError("node_order must be a permutation of range(n)")
    lab = list(node_order)

    edges = []
    groups = {i: set() for i in range(1, half)}
    ek = set()
    for u in range(n):
        for v in range(u + 1, n):
            c = len(edges)
            edges.append((lab[u], lab[v]))
            if (u < half) != (v < half):
                ek.add(c)
            else:
                base = u if u < half else u - half
                groups[base + 1].add(c)
    g = Graph.bidirect(n, edges)
    if variant == "a":
        cost = GroupIndicatorCost(g.num_elements, ek,
                                  [groups[i] for i in range(1, half)],
                                  b=float(half), eps=eps)
    elif variant == "b":
        cost = GroupIndicatorCost(g.num_elements, ek,
                                  [groups[i] for i in range(1, half)],
                                  b=float(n * n), eps=0.0)
    else:
        raise InstanceError(f"unknown worst-case variant {variant!r}")
    side = frozenset(lab[u] for u in range(half))
    known = KnownOptimum(frozenset(ek), cost.value(ek), side)
    return Instance(g, cost, family=f"worstcase_{variant}", seed=0,
                    params={"n": n, "eps": eps, "node_order": list(node_order)},
                    known_optimum=known)


def derangement_counts(n):
    """(D(n), D'(n)) as exact integers.

    D(n): derangements of n elements.  D'(n): permutations where one
    pre-specified element may map anywhere but all others are deranged;
    forbidden-board formula, equal to D(n) + D(n-1).
    """
    if n < 0:
        raise InstanceError("n must be nonnegative")
    if n == 0:
        return 1, 1
    d = [1, 0]
    for i in range(2, n + 1):
        d.append((i - 1) * (d[i - 1] + d[i - 2]))
    dprime = sum((-1) ** k * math.comb(n - 1, k) * math.factorial(n - k)
                 for k in range(n))
    return d[n], dprime


def f_bal(cs, ct, overlap, n_b):
    """Balance penalty of the bisection reduction:
    (|C_s|+|C_t|) - (|C_s||C_t| - |C_{s∩t}|) D'(n_b-1)/D(n_b)."""
    if n_b < 2:
        raise InstanceError("n_b must be at least 2")
    d_nb, _ = derangement_counts(n_b)
    _, dp = derangement_counts(n_b - 1)
    return float(cs + ct) - (cs * ct - overlap) * dp / d_nb


def recommended_beta(n_b, weights_b):
    """Balance weight that provably forces an equipartition: adjacent
    imbalance steps change f_bal by at least D'(n_b-1)/D(n_b), so any
    beta above sum(w) * D(n_b)/D'(n_b-1) dominates every cut saving."""
    d_nb, _ = derangement_counts(n_b)
    _, dp = derangement_counts(n_b - 1)
    return 1.0 + sum(weights_b) * d_nb / dp


def gen_bisection_reduction(n_b, gb_edges, weights_b, beta):
    """Auxiliary MinCoopCut instance encoding Graph Bisection: terminals
    s,t fully connected to V_B; cutting (s,v) assigns v to t and vice
    versa; f_bal prices unbalanced assignments."""
    if n_b < 2 or n_b % 2:
        raise InstanceError("bisection needs an even n_b >= 2")
    edges = [tuple(e) for e in gb_edges]
    for (u, v) in edges:
        if not (0 <= u < n_b and 0 <= v < n_b):
            raise InstanceError("G_B edge outside node range")
    s = n_b
    t = n_b + 1
    all_edges = list(edges)
    es_elements = []
    for v in range(n_b):
        es_elements.append(len(all_edges))
        all_edges.append((s, v))
    et_elements = []
    for v in range(n_b):
        et_elements.append(len(all_edges))
        all_edges.append((v, t))
    g = Graph.bidirect(n_b + 2, all_edges)
    cost = BisectionBalanceCost(weights_b, beta, es_elements, et_elements, n_b)
    return Instance(g, cost, s=s, t=t, family="bisection_reduction", seed=0,
                    params={"n_b": n_b, "beta": beta,
                            "gb_edges": [list(e) for e in edges],
                            "weights_b": [float(w) for w in weights_b]})


def gen_greedy_adversarial(n, gamma=1.0, eps=0.01):
    """Clique trap where deterministic min-marginal greedy pays ~n^2/4
    times the optimum single edge (v', t)."""
    if n < 4 or n % 2:
        raise InstanceError("n must be even and >= 4")
    s = n
    t = n + 1
    half = n // 2
    edges = []
    weights = []
    for u in range(half):
        edges.append((s, u))
        weights.append(gamma * (1 - eps / 2))
    for u in range(n):
        for v in range(u + 1, n):
            edges.append((u, v))
            if (u < half) != (v < half):
                weights.append(gamma * (1 - eps))
            else:
                weights.append(gamma * (1 - eps / 2))
    vprime = half
    opt_elem = len(edges)
    edges.append((vprime, t))
    weights.append(gamma)
    g = Graph.bidirect(n + 2, edges)
    cost = ModularCost(weights)
    known = KnownOptimum(frozenset({opt_elem}), gamma,
                         frozenset(range(n + 1)) - {t})
    return Instance(g, cost, s=s, t=t, family="greedy_adversarial", seed=0,
                    params={"n": n, "gamma": gamma, "eps": eps},
                    known_optimum=known)


def gen_convolution_witness(a=1.5, b=2.0, eps=1e-3):
    """Five-arc digraph whose per-node convolution cost has marginals
    b-a then b, certifying non-submodularity (max-weight edge cost)."""
    # nodes: s=0, p=1, q=2, t=3
    # e1=(s,q) w=a, e2=(p,q) w=a, e3=(p,t) w=b, e4=(s,p) w=eps, e5=(q,t) w=eps
    edges = [(0, 2), (1, 2), (1, 3), (0, 1), (2, 3)]
    weights = [a, a, b, eps, eps]
    g = Graph.directed(4, edges)
    return Instance(g, MaxWeightCost(weights), s=0, t=3,
                    family="convolution_witness", seed=0,
                    params={"a": a, "b": b, "eps": eps})


# ---------------------------------------------------------------------------
# serialization


def _instance_payload(inst):
    known = None
    if inst.known_optimum is not None:
        known = {"elements": sorted(inst.known_optimum.elements),
                 "value": inst.known_optimum.value,
                 "side": sorted(inst.known_optimum.side)
                 if inst.known_optimum.side is not None else None}
    return {
        "format": 1,
        "family": inst.family,
        "seed": inst.seed,
        "params": inst.params,
        "graph": inst.graph.to_json(inst.s, inst.t),
        "cost": inst.cost.spec(),
        "known_optimum": known,
    }


def instance_to_json(inst):
    payload = _instance_payload(inst)
    digest = hashlib.sha256(
        json.dumps(payload, sort_keys=True).encode()).hexdigest()
    payload["content_hash"] = digest
    return json.dumps(payload, sort_keys=True, indent=1)


def save_instance(inst, path):
    with open(path, "w") as fh:
        fh.write(instance_to_json(inst))


def instance_from_json(text):
    payload = json.loads(text)
    stored = payload.pop("content_hash", None)
    digest = hashlib.sha256(
        json.dumps(payload, sort_keys=True).encode()).hexdigest()
    if stored != digest:
        raise InstanceError("content hash mismatch (corrupted or edited file)")
    if payload["family"] not in FAMILIES:
        raise InstanceError(f"unknown family name {payload['family']!r}")
    g = Graph.from_json(payload["graph"])
    cost = build_cost(payload["cost"])
    if cost.m != g.num_elements:
        raise InstanceError("cost table does not match graph elements")
    known = None
    if payload.get("known_optimum"):
        ko = payload["known_optimum"]
        known = KnownOptimum(frozenset(ko["elements"]), ko["value"],
                             frozenset(ko["side"]) if ko.get("side") is not None else None)
    return Instance(g, cost, s=payload["graph"].get("s"),
                    t=payload["graph"].get("t"), family=payload["family"],
                    seed=payload["seed"], params=payload["params"],
                    known_optimum=known)


def load_instance(path):
    with open(path) as fh:
        return instance_from_json(fh.read())
