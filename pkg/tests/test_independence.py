import itertools

import numpy as np
import pytest
from hypothesis import given, settings

from helpers import brute_joint, dags, dsep_oracle, numeric_indep, pairwise_oracle, simple_trails
from nami import models
from nami.discrete import random_cpds
from nami.errors import CapExceededError, InvalidTrailError, OverlapError, UniverseMismatchError
from nami.graph import BayesNet
from nami.independence import (
    IndepAssertion,
    d_separated,
    enum_cap,
    enumerate_independencies,
    is_active_trail,
    same_markov_equivalence,
)
from nami.inversion import nami_invert

VSTRUCT = BayesNet.from_edges(list("XZY"), [("X", "Z"), ("Y", "Z")])
CAUSAL = BayesNet.from_edges(list("XZY"), [("X", "Z"), ("Z", "Y")])


def ids(bn, s):
    return [bn.index(c) for c in s]


class TestActiveTrail:
    def test_fork_open(self):
        bn = models.branching()
        assert is_active_trail(bn, ids(bn, "BAC"), [])

    def test_causal_blocked(self):
        assert not is_active_trail(CAUSAL, [0, 1, 2], [1])

    def test_explaining_away(self):
        assert is_active_trail(VSTRUCT, [0, 1, 2], [1])
        assert not is_active_trail(VSTRUCT, [0, 1, 2], [])

    def test_collider_opened_by_descendant(self):
        bn = BayesNet.from_edges(list("XZYW"), [("X", "Z"), ("Y", "Z"), ("Z", "W")])
        assert is_active_trail(bn, [0, 1, 2], [3])

    def test_invalid_trail(self):
        with pytest.raises(InvalidTrailError):
            is_active_trail(CAUSAL, [0, 2], [])
        with pytest.raises(InvalidTrailError):
            is_active_trail(CAUSAL, [0, 1, 0], [])


class TestDSeparation:
    def test_branching(self):
        bn = models.branching()
        b, c, a = bn.index("B"), bn.index("C"), bn.index("A")
        assert d_separated(bn, {b}, {c}, {a})
        assert not d_separated(bn, {b}, {c}, set())

    def test_v_structure(self):
        assert d_separated(VSTRUCT, {0}, {2})
        assert not d_separated(VSTRUCT, {0}, {2}, {1})

    def test_overlap(self):
        with pytest.raises(OverlapError):
            d_separated(VSTRUCT, {0}, {0, 2})
        with pytest.raises(OverlapError):
            d_separated(VSTRUCT, {0}, {2}, {0})

    def test_oracle_equivalence_random(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            bn = models.random_dag(rng, int(rng.integers(2, 8)))
            for x, y in itertools.combinations(range(bn.n), 2):
                rest = [v for v in range(bn.n) if v not in (x, y)]
                for k in range(len(rest) + 1):
                    for z in itertools.combinations(rest, k):
                        assert d_separated(bn, {x}, {y}, z) == dsep_oracle(bn, x, y, z), (bn, x, y, z)


@settings(max_examples=60, deadline=None)
@given(dags(max_n=6), dags(max_n=6))
def test_markov_equivalence_matches_independencies(g, h):
    if g.n != h.n:
        return
    h = BayesNet(g.names, h.parents, g.observed)
    same = enumerate_independencies(g).assertions == enumerate_independencies(h).assertions
    assert same_markov_equivalence(g, h) == same


def test_monotone_blocking_without_colliders():
    rng = np.random.default_rng(3)
    for _ in range(200):
        bn = models.random_dag(rng, int(rng.integers(3, 8)))
        for x, y in itertools.combinations(range(bn.n), 2):
            for trail in simple_trails(bn, x, y):
                if any(p in bn.parents[m] and q in bn.parents[m]
                       for p, m, q in zip(trail, trail[1:], trail[2:])):
                    continue
                z = {v for v in range(bn.n) if v not in (x, y) and rng.random() < 0.3}
                if is_active_trail(bn, trail, z):
                    continue
                for extra in set(range(bn.n)) - z - {x, y}:
                    assert not is_active_trail(bn, trail, z | {extra})


class TestEnumeration:
    def test_chain(self):
        bn = BayesNet.from_edges(list("ABC"), [("A", "B"), ("B", "C")])
        ind = enumerate_independencies(bn)
        assert IndepAssertion.pair(0, 2, [1]) in ind
        assert IndepAssertion.pair(0, 2) not in ind

    def test_edgeless_pair(self):
        ind = enumerate_independencies(BayesNet.empty(2))
        assert list(ind) == [IndepAssertion.pair(0, 1)]

    @pytest.mark.parametrize("builder", [models.branching_deep, models.student, models.branching])
    def test_fixture_matches_trail_oracle(self, builder):
        bn = builder()
        got = {(min(a.x), min(a.y), a.z) for a in enumerate_independencies(bn)}
        assert got == pairwise_oracle(bn)

    def test_cap(self, monkeypatch):
        with pytest.raises(CapExceededError):
            enumerate_independencies(models.chain(6), cap=5)
        monkeypatch.setenv("NAMI_ENUM_CAP", "4")
        assert enum_cap() == 4
        with pytest.raises(CapExceededError):
            enumerate_independencies(models.chain(5))

    def test_canonical_order_and_json(self):
        bn = models.branching()
        ind = list(enumerate_independencies(bn))
        assert ind == sorted(ind, key=lambda a: a.sort_key())
        first = ind[0].to_json(bn.names)
        assert isinstance(first[0], str) and isinstance(first[1], list)

    def test_format(self):
        bn = models.branching()
        assert IndepAssertion.pair(bn.index("C"), bn.index("B")).format(bn.names) == "(B ⟂ C | ∅)"


class TestMarkovEquivalence:
    def test_single_edge(self):
        g = BayesNet.from_edges(list("AB"), [("A", "B")])
        h = BayesNet.from_edges(list("AB"), [("B", "A")])
        assert same_markov_equivalence(g, h)

    def test_immorality_destroyed(self):
        assert not same_markov_equivalence(VSTRUCT, CAUSAL)

    def test_branching_vs_inverse(self):
        g = models.branching()
        assert not same_markov_equivalence(g, nami_invert(g).joint_graph())

    def test_universe(self):
        with pytest.raises(UniverseMismatchError):
            same_markov_equivalence(VSTRUCT, BayesNet.empty(2))


def test_soundness_numerically():
    rng = np.random.default_rng(5)
    for _ in range(40):
        g = models.random_dag(rng, int(rng.integers(2, 7)))
        table = brute_joint(random_cpds(rng, g))
        for a in enumerate_independencies(g):
            assert numeric_indep(table, min(a.x), min(a.y), sorted(a.z))
