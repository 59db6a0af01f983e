import math

import pytest
from hypothesis import given, settings, strategies as st

from coopcut.submodular import (
    SubmodularOracle, ModularCost, MaxWeightCost, ConcaveOfWeightCost,
    lovasz_extension, greedy_vertex, curvature, check_submodular,
    check_monotone, check_normalized, sfm_bruteforce, subsets, GroundSetError,
)


class CardTrunc(SubmodularOracle):
    """f(A) = min(|A|, k); local test oracle."""

    def __init__(self, m, k):
        super().__init__(m)
        self.k = k

    def _value(self, s):
        return float(min(len(s), self.k))


class SquaredCard(SubmodularOracle):
    def _value(self, s):
        return float(len(s)) ** 2


class Bump(SubmodularOracle):
    """f(A) = |A| (2 - |A|): increases then decreases."""

    def _value(self, s):
        return float(len(s) * (2 - len(s)))


def test_marginal_modular_is_weight():
    f = ModularCost([2.0, 7.0, 1.5])
    for A in subsets(range(3)):
        for e in range(3):
            if e not in A:
                assert f.marginal(e, A) == pytest.approx(f.weights[e])


def test_marginal_max_weight_example():
    f = MaxWeightCost([3.0, 5.0])
    assert f.marginal(1, {0}) == pytest.approx(2.0)
    assert f.marginal(1, set()) == pytest.approx(5.0)


def test_marginal_in_set_is_zero_and_monotone_tail_nonneg():
    f = MaxWeightCost([3.0, 5.0, 4.0])
    assert f.marginal(1, {1, 2}) == 0.0
    for e in range(3):
        assert f.marginal(e, set(range(3)) - {e}) >= 0.0


def test_marginal_index_error():
    f = ModularCost([1.0])
    with pytest.raises(GroundSetError):
        f.value({3})


def test_lovasz_on_indicators_matches_f():
    oracles = [
        ModularCost([0.5, 2.0, 1.0, 3.0]),
        MaxWeightCost([1.0, 4.0, 2.0, 2.0]),
        ConcaveOfWeightCost([1.0, 1.0, 2.0, 5.0], "sqrt"),
    ]
    for f in oracles:
        for A in subsets(range(4)):
            chi = [1.0 if e in A else 0.0 for e in range(4)]
            assert lovasz_extension(f, chi) == pytest.approx(f.value(A), rel=1e-12)


def test_lovasz_zero_and_negative():
    f = ModularCost([1.0, 2.0])
    assert lovasz_extension(f, [0.0, 0.0]) == 0.0
    with pytest.raises(ValueError):
        lovasz_extension(f, [0.5, -0.1])


def test_lovasz_hand_example_max_weight():
    # x = (0.5, 0.2): 0.2*f({e0,e1}) + 0.3*f({e0}) = 0.2*5 + 0.3*3 = 1.9
    f = MaxWeightCost([3.0, 5.0])
    assert lovasz_extension(f, [0.5, 0.2]) == pytest.approx(1.9)


def test_greedy_vertex_modular_returns_weights():
    f = ModularCost([2.0, 0.5, 1.0])
    for x in ([0.1, 0.9, 0.4], [1.0, 1.0, 1.0], [0.0, 0.0, 0.0]):
        assert greedy_vertex(f, x) == pytest.approx(f.weights)


def test_greedy_vertex_cardinality_example():
    f = CardTrunc(2, 1)
    assert greedy_vertex(f, [0.5, 0.2]) == pytest.approx([1.0, 0.0])


def test_greedy_vertex_chain_consistency():
    f = MaxWeightCost([3.0, 1.0, 2.0])
    for A in subsets(range(3)):
        chi = [1.0 if e in A else 0.0 for e in range(3)]
        z = greedy_vertex(f, chi)
        assert sum(z[e] for e in A) == pytest.approx(f.value(A), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.1, 5.0), min_size=3, max_size=6),
       st.data())
def test_greedy_vertex_duality_and_homogeneity(weights, data):
    m = len(weights)
    x = data.draw(st.lists(st.floats(0.0, 1.0), min_size=m, max_size=m))
    c = data.draw(st.floats(0.0, 3.0))
    f = ConcaveOfWeightCost(weights, "sqrt")
    z = greedy_vertex(f, x)
    lov = lovasz_extension(f, x)
    assert sum(zi * xi for zi, xi in zip(z, x)) == pytest.approx(lov, abs=1e-12, rel=1e-12)
    assert lovasz_extension(f, [c * xi for xi in x]) == pytest.approx(c * lov, rel=1e-9, abs=1e-9)


def test_greedy_vertex_membership_in_polyhedron():
    f = ConcaveOfWeightCost([1.0, 2.0, 0.5, 1.5], "sqrt")
    z = greedy_vertex(f, [0.9, 0.1, 0.5, 0.5])
    for A in subsets(range(4)):
        assert sum(z[e] for e in A) <= f.value(A) + 1e-12


def test_curvature_values():
    assert curvature(ModularCost([1.0, 2.0, 3.0])) == pytest.approx(0.0)
    assert curvature(MaxWeightCost([2.0, 2.0, 2.0])) == pytest.approx(1.0)
    f = ConcaveOfWeightCost([1.0, 1.0], "sqrt")
    assert curvature(f) == pytest.approx(2.0 - math.sqrt(2.0))


def test_check_submodular_accepts_and_witnesses():
    assert check_submodular(ModularCost([1.0, 2.0])) is None
    w = check_submodular(SquaredCard(2))
    assert w is not None
    A, B, e, ma, mb = w
    assert A < B and e not in B
    assert (ma, mb) == (pytest.approx(1.0), pytest.approx(3.0))


def test_check_monotone_accepts_and_witnesses():
    assert check_monotone(ModularCost([1.0, 2.0])) is None
    w = check_monotone(Bump(2))
    assert w is not None
    _, _, gain = w
    assert gain < 0


def test_check_normalized():
    assert check_normalized(ModularCost([1.0]))


def test_sfm_bruteforce():
    zero = lambda s: 0.0
    assert sfm_bruteforce(zero, range(4)) == (frozenset(), 0.0)

    def dip(s):
        s = set(s)
        return len(s) - 2.0 * (2 in s)
    assert sfm_bruteforce(dip, range(4)) == (frozenset({2}), -1.0)

    mod = ModularCost([1.0, 2.0])
    assert sfm_bruteforce(lambda s: mod.value(s), range(2)) == (frozenset(), 0.0)

    with pytest.raises(GroundSetError):
        sfm_bruteforce(zero, range(25))


def test_call_counter_counts_evaluations():
    f = ModularCost([1.0, 1.0, 1.0])
    before = f.calls
    lovasz_extension(f, [0.3, 0.2, 0.1])
    assert f.calls == before + 3
