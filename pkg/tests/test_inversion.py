import numpy as np
import pytest
from hypothesis import given, settings

from helpers import dags, fixture
from nami import models
from nami.errors import (
    EmptyLatentsError,
    InvalidInverseError,
    InvalidOrderError,
    InvalidPartitionError,
)
from nami.graph import BayesNet
from nami.inversion import (
    InverseStructure,
    edge_count,
    fully_connected_inverse,
    latent_links,
    mean_field_inverse,
    nami_invert,
    stuhlmuller_invert,
)
from nami.io import bn_from_json
from nami.verification import is_imap, is_minimal_imap, is_natural


def parent_names(h):
    g = h.graph
    return {g.names[v]: "".join(sorted(g.names[p] for p in g.parents[v])) for v in range(g.n)
            if g.parents[v]}


def nm(bn, ids):
    return {bn.names[v] for v in ids}


class TestStudent:
    def test_frontiers_and_picks(self):
        bn = bn_from_json(fixture("student.json"))
        h = nami_invert(bn, "forward")
        got = [(nm(bn, s.frontier), bn.names[s.variable], nm(bn, s.parents)) for s in h.steps]
        assert got[:3] == [
            ({"D", "I"}, "D", {"I", "G"}),
            ({"I"}, "I", {"G", "S"}),
            ({"G", "S"}, "S", {"G", "L", "J"}),
        ]
        assert [bn.names[v] for v in h.elim_order] == list("DISGL")

    def test_fill_of_step_two(self):
        bn = models.student()
        fills = nami_invert(bn).steps[1].fills
        assert [(bn.names[a], bn.names[b]) for a, b in fills] == [("G", "S")]

    def test_factor_order_reverses_elimination(self):
        h = nami_invert(models.student())
        assert h.factor_order() == tuple(reversed(h.elim_order))


class TestBranching:
    def test_forward(self):
        assert parent_names(nami_invert(models.branching())) == {"A": "BC", "B": "CD", "C": "DE"}

    def test_reverse(self):
        assert parent_names(nami_invert(models.branching(), "reverse")) == \
            {"A": "DE", "B": "AD", "C": "AE"}

    def test_heuristic_drops_coupling(self):
        h = stuhlmuller_invert(models.branching())
        assert parent_names(h) == {"A": "BC", "B": "D", "C": "E"}
        assert h.models_observed

    def test_nami_passes_heuristic_fails(self):
        bn = models.branching()
        assert not is_imap(stuhlmuller_invert(bn), bn)
        for mode in ("forward", "reverse"):
            h = nami_invert(bn, mode)
            assert is_imap(h, bn) and is_minimal_imap(h, bn) and is_natural(h, bn)


class TestRegressions:
    def test_barren_latent_does_not_couple(self):
        # V1 is a leaf latent: once summed out it must not link V0 and V2
        bn = BayesNet.from_edges(["V0", "V1", "V2"], [("V0", "V1"), ("V2", "V1")], observed=["V0"])
        h = nami_invert(bn, "reverse")
        assert h.graph.parents[2] == ()
        assert is_minimal_imap(h, bn)
        literal = nami_invert(bn, "reverse", prune_barren=False)
        assert literal.graph.parents[2] == (0,)
        assert is_imap(literal, bn) and not is_minimal_imap(literal, bn)

    def test_latent_behind_observation_waits(self):
        # V2 -> V0 (observed) -> V1: V1 must not be eliminated before V2
        bn = BayesNet.from_edges(
            [f"V{i}" for i in range(4)],
            [("V0", "V1"), ("V0", "V3"), ("V1", "V3"), ("V2", "V0"), ("V2", "V3")],
            observed=["V0"],
        )
        h = nami_invert(bn, "forward")
        assert h.elim_order.index(2) < h.elim_order.index(1)
        assert is_natural(h, bn) and is_minimal_imap(h, bn)

    def test_latent_links(self):
        bn = BayesNet.from_edges(list("ZXWY"), [("Z", "X"), ("X", "W"), ("W", "Y")], observed=["X"])
        up = latent_links(bn, bn.parents)
        assert up[bn.index("W")] == {bn.index("Z")}
        assert up[bn.index("Y")] == {bn.index("W")}
        assert up[bn.index("Z")] == frozenset()


class TestShape:
    @settings(max_examples=100, deadline=None)
    @given(dags(max_n=7, need_latent=True))
    def test_valid_inverse(self, bn):
        for mode in ("forward", "reverse"):
            h = nami_invert(bn, mode)
            assert sorted(h.elim_order) == sorted(bn.latents)
            for x in bn.observed:
                assert h.graph.parents[x] == ()
            for s in h.steps:
                assert s.variable in s.frontier
                assert set(s.parents) == set(h.graph.parents[s.variable])
            assert edge_count(h) <= edge_count(fully_connected_inverse(bn))

    @settings(max_examples=60, deadline=None)
    @given(dags(max_n=6, need_latent=True))
    def test_include_observed(self, bn):
        h = nami_invert(bn, include_observed=True)
        assert h.models_observed
        assert len(h.elim_order) == bn.n
        assert is_imap(h, bn)

    def test_deterministic(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            bn = models.random_dag(rng, 7)
            if bn.latents:
                assert nami_invert(bn) == nami_invert(bn)


class TestGrouped:
    def test_blocks_eliminated_in_order(self):
        bn = models.branching()
        a, b, c = (bn.index(x) for x in "ABC")
        h = nami_invert(bn, groups=[[c], [a, b]])
        assert h.mode == "grouped"
        assert h.elim_order[0] == c
        assert h.groups == ((c,), (a, b))
        assert is_imap(h, bn)

    def test_random_groups_are_imaps(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            bn = models.random_dag(rng, int(rng.integers(2, 8)))
            lat = list(bn.latents)
            if not lat:
                continue
            rng.shuffle(lat)
            cut = int(rng.integers(0, len(lat) + 1))
            groups = [g for g in (lat[:cut], lat[cut:]) if g]
            h = nami_invert(bn, "reverse", groups=groups)
            pos = {v: i for i, v in enumerate(h.elim_order)}
            if len(groups) == 2:
                assert max(pos[v] for v in groups[0]) < min(pos[v] for v in groups[1])
            assert is_imap(h, bn)

    @pytest.mark.parametrize("groups", [[[0]], [[0, 1], [1, 2]], [[0, 1, 2], []], [[0, 1, 2, 3]]])
    def test_bad_partition(self, groups):
        with pytest.raises(InvalidPartitionError):
            nami_invert(models.branching(), groups=groups)


class TestBaselines:
    def test_fully_connected(self):
        bn = models.branching()
        h = fully_connected_inverse(bn)
        lat = len(bn.latents)
        assert edge_count(h) == lat * len(bn.observed) + lat * (lat - 1) // 2
        assert is_imap(h, bn)

    def test_mean_field_not_imap(self):
        bn = models.branching()
        h = mean_field_inverse(bn)
        assert all(set(h.graph.parents[z]) == set(bn.observed) for z in bn.latents)
        assert not is_imap(h, bn)

    def test_bad_orders(self):
        bn = models.branching()
        with pytest.raises(InvalidOrderError):
            stuhlmuller_invert(bn, [0, 1])
        with pytest.raises(InvalidOrderError):
            fully_connected_inverse(bn, [0, 1, 3])


class TestErrors:
    def test_no_latents(self):
        bn = BayesNet.from_edges(list("AB"), [("A", "B")], observed=["A", "B"])
        for fn in (nami_invert, stuhlmuller_invert, fully_connected_inverse, mean_field_inverse):
            with pytest.raises(EmptyLatentsError):
                fn(bn)

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            nami_invert(models.branching(), "sideways")

    def test_latent_into_observed(self):
        bn = models.branching()
        with pytest.raises(InvalidInverseError):
            InverseStructure(bn, "custom", models_observed=True)


def test_literal_and_default_agree_without_barren_latents():
    # in a chain every eliminated latent keeps an unmarked child
    bn = models.chain(8)
    for mode in ("forward", "reverse"):
        assert nami_invert(bn, mode).graph == nami_invert(bn, mode, prune_barren=False).graph


class TestReferenceShapes:
    def test_branch_coupling_edge(self):
        bn = models.branching()
        b, c = bn.index("B"), bn.index("C")
        assert nami_invert(bn).graph.adjacent(b, c)
        assert not stuhlmuller_invert(bn).graph.adjacent(b, c)

    def test_heuristic_reverses_every_edge(self):
        bn = models.branching()
        h = stuhlmuller_invert(bn)
        assert sorted(h.graph.edges()) == sorted((v, u) for u, v in bn.edges())

    def test_fully_connected_gmm_given_order(self):
        g = models.gmm(3)
        theta, phi = g.index("theta"), g.index("phi")
        zs = [g.index(f"z{i}") for i in range(1, 4)]
        xs = set(g.observed)
        h = fully_connected_inverse(g, [theta, phi, *zs])
        assert set(h.graph.parents[theta]) == xs
        assert set(h.graph.parents[phi]) == xs | {theta}
        assert set(h.graph.parents[zs[-1]]) == xs | {theta, phi, *zs[:-1]}

    def test_vae_mean_field(self):
        bn = BayesNet.from_edges(["z", "x"], [("z", "x")], observed=["x"])
        assert mean_field_inverse(bn).graph.edges() == [(1, 0)]
        assert nami_invert(bn).graph.edges() == [(1, 0)]

    def test_tree_depth_three(self):
        h = nami_invert(models.binary_tree(3))
        assert set(h.graph.parents[0]) == {1, 2}
        assert set(h.graph.parents[2]) == {3, 4, 5, 6}
