"""Independent brute-force oracles and hypothesis strategies shared by the tests.

Nothing here calls into the algorithms under test beyond building graphs.
"""

from __future__ import annotations

import itertools
import json
from pathlib import Path

import numpy as np
from hypothesis import strategies as st

from nami.graph import BayesNet

FIXTURES = Path(__file__).parent / "fixtures"


def fixture(name: str):
    return json.loads((FIXTURES / name).read_text(encoding="utf-8"))


@st.composite
def dags(draw, min_n: int = 1, max_n: int = 7, observed: bool = True, need_latent: bool = False):
    n = draw(st.integers(min_n, max_n))
    perm = draw(st.permutations(range(n)))
    edges = []
    for j in range(n):
        for i in range(j):
            if draw(st.booleans()):
                edges.append((perm[i], perm[j]))
    obs = [v for v in range(n) if observed and draw(st.booleans())]
    if need_latent and len(obs) == n:
        obs = obs[1:]
    return BayesNet.from_edges([f"V{i}" for i in range(n)], edges, obs)


# -- d-separation by trail enumeration ---------------------------------------

def descendants(bn: BayesNet, v: int) -> set[int]:
    seen, frontier = set(), [v]
    while frontier:
        u = frontier.pop()
        for c in range(bn.n):
            if u in bn.parents[c] and c not in seen:
                seen.add(c)
                frontier.append(c)
    return seen


def simple_trails(bn: BayesNet, a: int, b: int):
    nbrs = {v: set(bn.parents[v]) | {c for c in range(bn.n) if v in bn.parents[c]} for v in range(bn.n)}

    def walk(path):
        last = path[-1]
        if last == b:
            yield list(path)
            return
        for w in sorted(nbrs[last]):
            if w not in path:
                yield from walk(path + [w])

    yield from walk([a])


def trail_active(bn: BayesNet, trail, z) -> bool:
    z = set(z)
    if trail[0] in z or trail[-1] in z:
        return False
    for p, m, q in zip(trail, trail[1:], trail[2:]):
        collider = p in bn.parents[m] and q in bn.parents[m]
        if collider:
            if m not in z and not (descendants(bn, m) & z):
                return False
        elif m in z:
            return False
    return True


def dsep_oracle(bn: BayesNet, x: int, y: int, z) -> bool:
    return not any(trail_active(bn, t, z) for t in simple_trails(bn, x, y))


def pairwise_oracle(bn: BayesNet) -> set[tuple[int, int, frozenset]]:
    out = set()
    for i, j in itertools.combinations(range(bn.n), 2):
        rest = [v for v in range(bn.n) if v not in (i, j)]
        for k in range(len(rest) + 1):
            for zs in itertools.combinations(rest, k):
                if dsep_oracle(bn, i, j, zs):
                    out.add((i, j, frozenset(zs)))
    return out


# -- numerical oracles ---------------------------------------------------------

def brute_joint(dbn) -> np.ndarray:
    """Joint by looping over every assignment and multiplying CPD entries."""
    cards = dbn.cards
    out = np.zeros(cards)
    for assign in itertools.product(*(range(c) for c in cards)):
        p = 1.0
        for v, f in enumerate(dbn.cpds):
            p *= f.values[tuple(assign[u] for u in f.scope)]
        out[assign] = p
    return out


def numeric_indep(table: np.ndarray, x: int, y: int, z, tol: float = 1e-9) -> bool:
    """Check p(x, y | z) = p(x | z) p(y | z) on every slice with p(z) > 0."""
    keep = sorted({x, y, *z})
    drop = tuple(a for a in range(table.ndim) if a not in keep)
    m = table.sum(axis=drop)
    ax = {v: i for i, v in enumerate(keep)}
    pz = m.sum(axis=(ax[x], ax[y]), keepdims=True)
    pxz = m.sum(axis=ax[y], keepdims=True)
    pyz = m.sum(axis=ax[x], keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        lhs = np.where(pz > 0, m * pz, 0.0)
        rhs = np.where(pz > 0, pxz * pyz, 0.0)
    return bool(np.max(np.abs(lhs - rhs)) <= tol)


# -- clique trees ----------------------------------------------------------------

def sepset_violations(bn: BayesNet, ct) -> list[int]:
    """Tree edges whose sepset fails to d-separate the two sides in ``bn``."""
    from nami.independence import d_separated

    bad = []
    for i, p in enumerate(ct.parent):
        if p is None:
            continue
        s = ct.sepsets[i]
        below = set().union(*(ct.cliques[k] for k in ct.subtree(i))) - s
        above = set(range(bn.n)) - below - s
        if below and above and not d_separated(bn, below, above, s):
            bad.append(i)
    return bad
