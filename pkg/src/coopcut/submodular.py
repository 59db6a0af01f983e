"""Submodular set functions on a dense ground set {0..m-1}.

Evaluation, marginals, Lovász extension, the greedy vertex of the
submodular polyhedron, curvature, and brute-force verification oracles.
Oracles count their evaluations (`calls`); they are immutable after
construction apart from that counter, so concurrent reads are safe.
"""

from itertools import combinations
import math


class GroundSetError(ValueError):
    pass


class SubmodularOracle:
    """Base class: a normalized, monotone, submodular cost on {0..m-1}.

    Subclasses implement `_value(frozenset) -> float`.  All public entry
    points go through `value()`, which validates indices and counts calls.
    """

    def __init__(self, m):
        if m < 1:
            raise GroundSetError("ground set must be nonempty")
        self.m = m
        self.calls = 0

    def _value(self, subset):
        raise NotImplementedError

    def value(self, subset):
        s = frozenset(subset)
        for e in s:
            if not 0 <= e < self.m:
                raise GroundSetError(f"element {e} outside ground set of size {self.m}")
        self.calls += 1
        return self._value(s)

    def __call__(self, subset):
        return self.value(subset)

    def marginal(self, e, subset):
        """f(A + e) - f(A); zero when e already in A."""
        s = frozenset(subset)
        if e in s:
            return 0.0
        return self.value(s | {e}) - self.value(s)

    def _prefix_values(self, order):
        vals = []
        acc = set()
        for e in order:
            acc.add(e)
            vals.append(self._value(frozenset(acc)))
        return vals

    def prefix_values(self, order):
        """f on every prefix of `order`; the workhorse of the Lovász
        extension and the greedy vertex.  Subclasses override
        _prefix_values with incremental evaluations where possible.
        Counted as len(order) oracle calls."""
        order = list(order)
        for e in order:
            if not 0 <= e < self.m:
                raise GroundSetError(f"element {e} outside ground set of size {self.m}")
        self.calls += len(order)
        return self._prefix_values(order)

    def singleton(self, e):
        return self.value((e,))

    def spec(self):
        """JSON-serializable description sufficient to rebuild the oracle."""
        raise NotImplementedError


class ModularCost(SubmodularOracle):
    def __init__(self, weights):
        super().__init__(len(weights))
        self.weights = [float(w) for w in weights]

    def _value(self, subset):
        return sum(self.weights[e] for e in subset)

    def _prefix_values(self, order):
        vals = []
        acc = 0.0
        for e in order:
            acc += self.weights[e]
            vals.append(acc)
        return vals

    def spec(self):
        return {"type": "modular", "weights": self.weights}


class MaxWeightCost(SubmodularOracle):
    """f(A) = max_{e in A} w(e) with f(empty) = 0."""

    def __init__(self, weights):
        super().__init__(len(weights))
        self.weights = [float(w) for w in weights]

    def _value(self, subset):
        return max((self.weights[e] for e in subset), default=0.0)

    def _prefix_values(self, order):
        vals = []
        acc = 0.0
        for e in order:
            acc = max(acc, self.weights[e])
            vals.append(acc)
        return vals

    def spec(self):
        return {"type": "max_weight", "weights": self.weights}


class ConcaveOfWeightCost(SubmodularOracle):
    """f(A) = g(sum of weights) for g in {sqrt, log1p}."""

    KINDS = ("sqrt", "log1p")

    def __init__(self, weights, kind):
        super().__init__(len(weights))
        if kind not in self.KINDS:
            raise ValueError(f"unknown concave kind {kind!r}")
        self.weights = [float(w) for w in weights]
        self.kind = kind

    def _value(self, subset):
        total = sum(self.weights[e] for e in subset)
        return math.sqrt(total) if self.kind == "sqrt" else math.log1p(total)

    def _prefix_values(self, order):
        g = math.sqrt if self.kind == "sqrt" else math.log1p
        vals = []
        acc = 0.0
        for e in order:
            acc += self.weights[e]
            vals.append(g(acc))
        return vals

    def spec(self):
        return {"type": "concave_weight", "kind": self.kind, "weights": self.weights}


class ScaledSumCost(SubmodularOracle):
    """scale * (f_1 + ... + f_k) over oracles on the same ground set."""

    def __init__(self, scale, parts):
        sizes = {p.m for p in parts}
        if len(sizes) != 1:
            raise GroundSetError("mismatched ground sets in sum")
        super().__init__(parts[0].m)
        self.scale = float(scale)
        self.parts = list(parts)

    def _value(self, subset):
        return self.scale * sum(p._value(subset) for p in self.parts)

    def _prefix_values(self, order):
        acc = [0.0] * len(order)
        for p in self.parts:
            for i, v in enumerate(p._prefix_values(order)):
                acc[i] += v
        return [self.scale * v for v in acc]

    def spec(self):
        return {"type": "scaled_sum", "scale": self.scale,
                "parts": [p.spec() for p in self.parts]}


def marginal(f, e, subset):
    return f.marginal(e, subset)


def lovasz_extension(f, x):
    """Lovász extension of f at x >= 0 via the level-set decomposition.

    Sorts coordinates descending (index ascending on ties) and telescopes
    prefix values; m oracle calls plus an O(m log m) sort.  Positively
    homogeneous, so any nonnegative x is accepted, not just [0,1]^m.
    """
    x = list(x)
    if len(x) != f.m:
        raise GroundSetError("vector length != ground set size")
    if any(v < 0 for v in x):
        raise ValueError("negative coordinate in Lovász argument")
    order = sorted(range(f.m), key=lambda e: (-x[e], e))
    support = [e for e in order if x[e] > 0.0]
    vals = f.prefix_values(support)
    # Telescoped level-set form: sum_j (x_sigma(j) - x_sigma(j+1)) * f(prefix_j).
    total = 0.0
    for j, e in enumerate(support):
        nxt = x[support[j + 1]] if j + 1 < len(support) else 0.0
        total += (x[e] - nxt) * vals[j]
    return total


def greedy_vertex(f, x):
    """Vertex of the submodular polyhedron attaining max z.x = Lovász(x).

    z[sigma(j)] = f(prefix_j) - f(prefix_{j-1}) for the descending order
    sigma of x; ties broken by ascending element index.
    """
    x = list(x)
    if len(x) != f.m:
        raise GroundSetError("vector length != ground set size")
    order = sorted(range(f.m), key=lambda e: (-x[e], e))
    vals = f.prefix_values(order)
    z = [0.0] * f.m
    prev = 0.0
    for e, cur in zip(order, vals):
        z[e] = cur - prev
        prev = cur
    return z


def curvature(f):
    """kappa = max_e 1 - f(e | E-e)/f(e); elements with f(e)=0 are skipped."""
    if f.m < 1:
        raise GroundSetError("empty ground set")
    full = frozenset(range(f.m))
    f_full = f.value(full)
    worst = 0.0
    for e in range(f.m):
        fe = f.value((e,))
        if fe == 0.0:
            continue
        tail = f_full - f.value(full - {e})
        worst = max(worst, 1.0 - tail / fe)
    return worst


def _value_table(f, cap):
    if f.m > cap:
        raise GroundSetError(f"ground set {f.m} exceeds brute-force cap {cap}")
    vals = [0.0] * (1 << f.m)
    for mask in range(1, 1 << f.m):
        vals[mask] = f.value([e for e in range(f.m) if mask >> e & 1])
    return vals


def check_submodular(f, cap=12, tol=1e-9):
    """Exhaustive diminishing-marginals check.

    Returns None if f is submodular, else a witness tuple
    (A, B, e, f(e|A), f(e|B)) with A subset of B, e outside B and
    f(e|A) < f(e|B).  Uses the local exchange characterization, so the
    scan is O(m^2 2^m) table lookups after 2^m oracle calls.
    """
    vals = _value_table(f, cap)
    m = f.m
    for mask in range(1 << m):
        outside = [e for e in range(m) if not mask >> e & 1]
        for i, e in enumerate(outside):
            me_a = vals[mask | (1 << e)] - vals[mask]
            for g in outside[i + 1:]:
                with_g = mask | (1 << g)
                me_b = vals[with_g | (1 << e)] - vals[with_g]
                if me_a < me_b - tol:
                    A = frozenset(x for x in range(m) if mask >> x & 1)
                    return (A, A | {g}, e, me_a, me_b)
                # and the symmetric exchange with roles of e, g swapped
                mg_a = vals[mask | (1 << g)] - vals[mask]
                mg_b = vals[mask | (1 << e) | (1 << g)] - vals[mask | (1 << e)]
                if mg_a < mg_b - tol:
                    A = frozenset(x for x in range(m) if mask >> x & 1)
                    return (A, A | {e}, g, mg_a, mg_b)
    return None


def check_monotone(f, cap=12, tol=1e-9):
    """Returns None if f is nondecreasing, else (A, e, f(e|A)) with f(e|A) < 0."""
    vals = _value_table(f, cap)
    m = f.m
    for mask in range(1 << m):
        for e in range(m):
            if mask >> e & 1:
                continue
            gain = vals[mask | (1 << e)] - vals[mask]
            if gain < -tol:
                return (frozenset(x for x in range(m) if mask >> x & 1), e, gain)
    return None


def check_normalized(f, tol=1e-12):
    return abs(f.value(())) <= tol


def sfm_bruteforce(g, universe, cap=20):
    """Exact unconstrained minimizer of an arbitrary set function.

    `g` is any callable on iterables of elements; `universe` an iterable of
    elements.  Ties broken by lower cardinality, then lexicographic element
    tuple.  2^k enumeration; refuses k > cap.
    """
    elems = sorted(universe)
    k = len(elems)
    if k > cap:
        raise GroundSetError(f"universe of {k} exceeds enumeration cap {cap}")
    best_set = ()
    best_val = g(())
    for mask in range(1, 1 << k):
        sel = tuple(elems[i] for i in range(k) if mask >> i & 1)
        v = g(sel)
        if v < best_val or (v == best_val and (len(sel), sel) < (len(best_set), best_set)):
            best_val = v
            best_set = sel
    return frozenset(best_set), best_val


def subsets(iterable):
    """All subsets of an iterable, small-to-large (test helper)."""
    items = sorted(iterable)
    for r in range(len(items) + 1):
        yield from combinations(items, r)
