"""Named model structures and random generators shared by the tests and the CLI."""

from __future__ import annotations

import numpy as np

from .graph import BayesNet


def student() -> BayesNet:
    """Extended student network; H and J observed."""
    return BayesNet.from_edges(
        ["D", "I", "G", "S", "L", "J", "H"],
        [("D", "G"), ("I", "G"), ("I", "S"), ("G", "L"), ("G", "H"),
         ("S", "J"), ("L", "J"), ("J", "H")],
        observed=["J", "H"],
    )


def branching() -> BayesNet:
    """A -> B -> D and A -> C -> E with leaves D, E observed."""
    return BayesNet.from_edges(
        list("ABCDE"),
        [("A", "B"), ("A", "C"), ("B", "D"), ("C", "E")],
        observed=["D", "E"],
    )


def branching_deep() -> BayesNet:
    """A with two branches, B splitting further; leaves D, E, F observed."""
    return BayesNet.from_edges(
        list("ABCDEF"),
        [("A", "B"), ("A", "C"), ("B", "D"), ("B", "E"), ("C", "F")],
        observed=["D", "E", "F"],
    )


def triangle() -> BayesNet:
    """A -> B, A -> C, B -> C, all latent."""
    return BayesNet.from_edges(list("ABC"), [("A", "B"), ("A", "C"), ("B", "C")])


def binary_tree(depth: int) -> BayesNet:
    """Binary tree x_0 .. x_{2^d - 2}; x_i has parent x_{(i-1)//2}; leaves observed."""
    n = 2 ** depth - 1
    names = [f"x{i}" for i in range(n)]
    edges = [((i - 1) // 2, i) for i in range(1, n)]
    return BayesNet.from_edges(names, edges, observed=range(2 ** (depth - 1) - 1, n))


def gmm(n_points: int) -> BayesNet:
    """Collapsed Gaussian mixture: theta -> x_i <- z_i <- phi."""
    names = ["theta", "phi"] + [f"z{i}" for i in range(1, n_points + 1)] \
        + [f"x{i}" for i in range(1, n_points + 1)]
    edges = []
    for i in range(1, n_points + 1):
        edges += [("phi", f"z{i}"), (f"z{i}", f"x{i}"), ("theta", f"x{i}")]
    return BayesNet.from_edges(names, edges, observed=[f"x{i}" for i in range(1, n_points + 1)])


def chain(n: int) -> BayesNet:
    """X0 -> X1 -> ... -> X_{n-1}, last variable observed."""
    return BayesNet.from_edges(
        [f"X{i}" for i in range(n)], [(i, i + 1) for i in range(n - 1)], observed=[n - 1]
    )


def random_dag(rng: np.random.Generator, n: int, edge_prob: float | None = None,
               observed_prob: float = 0.4, max_parents: int | None = None) -> BayesNet:
    """Random DAG over a shuffled order with at least one latent variable.

    Variable ids are permuted relative to the generating order so that the
    ascending-id tie-break is not aligned with the topology.
    """
    if edge_prob is None:
        edge_prob = float(rng.uniform(0.2, 0.6))
    perm = rng.permutation(n)
    edges = []
    for j in range(n):
        cands = [i for i in range(j) if rng.random() < edge_prob]
        if max_parents is not None and len(cands) > max_parents:
            cands = sorted(rng.choice(cands, max_parents, replace=False).tolist())
        edges += [(int(perm[i]), int(perm[j])) for i in cands]
    observed = [v for v in range(n) if rng.random() < observed_prob]
    if len(observed) == n:
        observed.remove(int(rng.choice(observed)))
    return BayesNet.from_edges([f"V{i}" for i in range(n)], edges, observed)
