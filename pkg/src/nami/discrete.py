"""Exact inference on small discrete BNs and KL certification of inverses.

Tables are dense numpy arrays with one axis per scope variable, in scope
order. Everything is enumerated exactly; sizes are capped, not sampled.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceededError, FactorError, SupportError, UniverseMismatchError
from .graph import BayesNet
from .inversion import InverseStructure, check_valid_inverse

JOINT_CAP = 2 ** 20
NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Factor:
    scope: tuple[int, ...]
    cards: tuple[int, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        scope, cards = tuple(int(v) for v in self.scope), tuple(int(c) for c in self.cards)
        if len(set(scope)) != len(scope):
            raise FactorError(f"repeated variable in scope {scope}")
        if len(scope) != len(cards) or any(c < 1 for c in cards):
            raise FactorError("scope and cardinalities disagree")
        vals = np.asarray(self.values, dtype=float)
        if vals.size != int(np.prod(cards, dtype=np.int64)):
            raise FactorError(f"table has {vals.size} entries, expected {int(np.prod(cards))}")
        vals = vals.reshape(cards)
        if np.isnan(vals).any() or (vals < 0).any():
            raise FactorError("factor entries must be non-negative numbers")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "scope", scope)
        object.__setattr__(self, "cards", cards)
        object.__setattr__(self, "values", vals)

    @classmethod
    def scalar(cls, value: float = 1.0) -> Factor:
        return cls((), (), np.array(value))

    def card_of(self, v: int) -> int:
        return self.cards[self.scope.index(v)]

    def aligned(self, scope: Sequence[int]) -> np.ndarray:
        """Values transposed and broadcast to ``scope`` (a superset of our scope)."""
        missing = set(self.scope) - set(scope)
        if missing:
            raise FactorError(f"scope {tuple(scope)} misses {sorted(missing)}")
        present = [v for v in scope if v in self.scope]
        arr = np.transpose(self.values, [self.scope.index(v) for v in present])
        shape = [self.card_of(v) if v in self.scope else 1 for v in scope]
        return arr.reshape(shape)

    def allclose(self, other: Factor, rtol: float = 1e-10, atol: float = 0.0) -> bool:
        if set(self.scope) != set(other.scope):
            return False
        return bool(np.allclose(self.values, other.aligned(self.scope), rtol=rtol, atol=atol))


def factor_product(a: Factor, b: Factor) -> Factor:
    for v in set(a.scope) & set(b.scope):
        if a.card_of(v) != b.card_of(v):
            raise FactorError(f"variable {v} has cardinality {a.card_of(v)} vs {b.card_of(v)}")
    scope = a.scope + tuple(v for v in b.scope if v not in a.scope)
    cards = a.cards + tuple(b.card_of(v) for v in scope[len(a.scope):])
    return Factor(scope, cards, a.aligned(scope) * b.aligned(scope))


def factor_marginalize(a: Factor, v: int) -> Factor:
    if v not in a.scope:
        raise FactorError(f"variable {v} not in scope {a.scope}")
    k = a.scope.index(v)
    return Factor(a.scope[:k] + a.scope[k + 1:], a.cards[:k] + a.cards[k + 1:], a.values.sum(axis=k))


def product_all(factors: Iterable[Factor]) -> Factor:
    out = Factor.scalar()
    for f in factors:
        out = factor_product(out, f)
    return out


def eliminate_variables(factors: Sequence[Factor], order: Sequence[int],
                        trace: list | None = None) -> Factor:
    """Sum-product variable elimination; ``trace`` collects each ψ scope."""
    pool = list(factors)
    known = set().union(*(f.scope for f in pool)) if pool else set()
    for v in order:
        if v not in known:
            raise FactorError(f"variable {v} appears in no factor")
        touching = [f for f in pool if v in f.scope]
        pool = [f for f in pool if v not in f.scope]
        psi = product_all(touching)
        if trace is not None:
            trace.append(frozenset(psi.scope))
        pool.append(factor_marginalize(psi, v))
    return product_all(pool)


@dataclass(frozen=True, eq=False)
class DiscreteBN:
    """A BN with one CPD per variable, scoped ``(parents..., variable)``."""

    structure: BayesNet
    cpds: tuple[Factor, ...]
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        bn = self.structure
        if len(self.cpds) != bn.n:
            raise FactorError(f"{len(self.cpds)} CPDs for {bn.n} variables")
        cards: dict[int, int] = {}
        for v, f in enumerate(self.cpds):
            if f.scope != tuple(bn.parents[v]) + (v,):
                raise FactorError(f"CPD of {bn.names[v]!r} has scope {f.scope}")
            for u, c in zip(f.scope, f.cards):
                if cards.setdefault(u, c) != c:
                    raise FactorError(f"inconsistent cardinality for {bn.names[u]!r}")
            sums = f.values.sum(axis=-1)
            if not np.allclose(sums, 1.0, rtol=0, atol=NORM_TOL):
                raise FactorError(f"CPD of {bn.names[v]!r} is not normalized")

    @property
    def cards(self) -> tuple[int, ...]:
        return tuple(f.cards[-1] for f in self.cpds)

    @property
    def n(self) -> int:
        return self.structure.n


def random_cpds(rng: np.random.Generator, bn: BayesNet, max_card: int = 3,
                alpha: float = 1.0, cards: Sequence[int] | None = None) -> DiscreteBN:
    """Dirichlet(alpha) CPDs with cardinalities drawn from ``2..max_card``."""
    if cards is None:
        cards = [int(rng.integers(2, max_card + 1)) for _ in range(bn.n)]
    cpds = []
    for v in range(bn.n):
        scope = tuple(bn.parents[v]) + (v,)
        shape = tuple(cards[u] for u in scope)
        rows = rng.dirichlet([alpha] * cards[v], size=int(np.prod(shape[:-1], dtype=np.int64)))
        cpds.append(Factor(scope, shape, rows.reshape(shape)))
    return DiscreteBN(bn, tuple(cpds))


def joint(bn: DiscreteBN, cap: int = JOINT_CAP) -> Factor:
    """Full joint table with scope ``(0, 1, ..., n-1)``."""
    size = int(np.prod(bn.cards, dtype=np.int64))
    if size > cap:
        raise CapExceededError(f"joint has {size} entries, cap is {cap}")
    scope = tuple(range(bn.n))
    vals = np.ones(bn.cards)
    for f in bn.cpds:
        vals = vals * f.aligned(scope)
    return Factor(scope, bn.cards, vals)


def _conditional(table: np.ndarray, v: int, parents: Sequence[int]) -> tuple[np.ndarray, bool]:
    """p(v | parents) from a joint over all variables, shaped ``(parents..., v)``."""
    keep = list(parents) + [v]
    drop = tuple(a for a in range(table.ndim) if a not in keep)
    marg = table.sum(axis=drop)
    present = sorted(keep)
    marg = np.transpose(marg, [present.index(a) for a in keep])
    norm = marg.sum(axis=-1, keepdims=True)
    zero = norm[..., 0] <= 0
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = np.where(norm > 0, marg / np.where(norm > 0, norm, 1.0), 1.0 / marg.shape[-1])
    return cond, bool(zero.any())


def fit_inverse_exact(bn: DiscreteBN, h: InverseStructure | BayesNet) -> DiscreteBN:
    """Exact conditionals of ``bn``'s joint for every factor of ``h``.

    Rows whose parent configuration has probability zero are uniform and
    listed in ``flags``.
    """
    hj = h.joint_graph() if isinstance(h, InverseStructure) else h
    if not hj.same_universe(bn.structure):
        raise UniverseMismatchError("inverse and model are over different variables")
    table = joint(bn).values
    cards = bn.cards
    cpds, flags = [], []
    for v in range(hj.n):
        pa = hj.parents[v]
        cond, zero = _conditional(table, v, pa)
        if zero:
            flags.append(hj.names[v])
        cpds.append(Factor(tuple(pa) + (v,), tuple(cards[u] for u in pa) + (cards[v],), cond))
    return DiscreteBN(hj, tuple(cpds), tuple(flags))


def expected_posterior_kl(bn: DiscreteBN, q: DiscreteBN) -> float:
    """E_{p(x)} KL(p(z|x) || q(z|x)) by enumeration over every assignment."""
    g, h = bn.structure, q.structure
    if not h.same_universe(g) or q.cards != bn.cards:
        raise UniverseMismatchError("q and p disagree on variables or cardinalities")
    check_valid_inverse(h)
    p = joint(bn).values
    scope = tuple(range(g.n))
    px = p.sum(axis=tuple(v for v in scope if v not in g.observed), keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_post = np.where(p > 0, np.log(p) - np.log(np.where(px > 0, px, 1.0)), 0.0)
    log_q = np.zeros(p.shape)
    for z in g.latents:
        f = q.cpds[z]
        with np.errstate(divide="ignore"):
            log_q = log_q + np.log(f.aligned(scope))
    bad = (p > 0) & np.isneginf(log_q)
    if bad.any():
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        assignment = {g.names[v]: idx[v] for v in scope}
        raise SupportError(f"q assigns zero probability where p does not: {assignment}", assignment)
    log_q = np.where(p > 0, log_q, 0.0)
    kl = float(np.sum(p * (log_post - log_q)))
    return max(kl, 0.0)


def enumerate_assignments(cards: Sequence[int]) -> Iterable[tuple[int, ...]]:
    return itertools.product(*(range(c) for c in cards))
