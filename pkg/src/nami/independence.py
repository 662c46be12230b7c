"""Active trails, d-separation and enumeration of pairwise independencies."""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import CapExceededError, InvalidTrailError, OverlapError, UniverseMismatchError
from .graph import BayesNet, immoralities, skeleton

DEFAULT_ENUM_CAP = 14


def enum_cap(cap: int | None = None) -> int:
    """Resolve the enumeration cap: explicit value, then ``NAMI_ENUM_CAP``, then 14."""
    if cap is not None:
        return cap
    env = os.environ.get("NAMI_ENUM_CAP")
    return int(env) if env else DEFAULT_ENUM_CAP


@dataclass(frozen=True)
class IndepAssertion:
    """``(x ⟂ y | z)`` with ``min(x) < min(y)``."""

    x: frozenset[int]
    y: frozenset[int]
    z: frozenset[int] = frozenset()

    def __post_init__(self):
        x, y, z = frozenset(self.x), frozenset(self.y), frozenset(self.z)
        if not x or not y:
            raise OverlapError("independence sides must be nonempty")
        if x & y or x & z or y & z:
            raise OverlapError("independence sets must be pairwise disjoint")
        if min(y) < min(x):
            x, y = y, x
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)

    @classmethod
    def pair(cls, a: int, b: int, z: Iterable[int] = ()) -> IndepAssertion:
        return cls(frozenset([a]), frozenset([b]), frozenset(z))

    def sort_key(self):
        return (sorted(self.x), sorted(self.y), len(self.z), sorted(self.z))

    def __lt__(self, other: IndepAssertion) -> bool:
        return self.sort_key() < other.sort_key()

    def format(self, names: Sequence[str]) -> str:
        def fmt(s):
            return ",".join(names[v] for v in sorted(s))

        cond = fmt(self.z) if self.z else "∅"
        return f"({fmt(self.x)} ⟂ {fmt(self.y)} | {cond})"

    def to_json(self, names: Sequence[str]) -> list:
        return [
            ",".join(names[v] for v in sorted(self.x)),
            [names[v] for v in sorted(self.z)],
            [names[v] for v in sorted(self.y)],
        ]


@dataclass(frozen=True)
class IndepSet:
    assertions: frozenset[IndepAssertion]
    universe: int

    def __contains__(self, a: IndepAssertion) -> bool:
        return a in self.assertions

    def __len__(self) -> int:
        return len(self.assertions)

    def __iter__(self) -> Iterator[IndepAssertion]:
        return iter(sorted(self.assertions))

    def issubset(self, other: IndepSet) -> bool:
        return self.assertions <= other.assertions

    def to_json(self, names: Sequence[str]) -> list:
        return [a.to_json(names) for a in self]


def is_active_trail(bn: BayesNet, trail: Sequence[int], z: Iterable[int]) -> bool:
    z = frozenset(z)
    if len(set(trail)) != len(trail):
        raise InvalidTrailError("trail nodes must be distinct")
    for a, b in zip(trail, trail[1:]):
        if not bn.adjacent(a, b):
            raise InvalidTrailError(f"{bn.names[a]} and {bn.names[b]} are not adjacent")
    if trail and (trail[0] in z or trail[-1] in z):
        return False
    for prev, mid, nxt in zip(trail, trail[1:], trail[2:]):
        if bn.has_edge(prev, mid) and bn.has_edge(nxt, mid):
            if mid not in z and not (bn.descendants(mid) & z):
                return False
        elif mid in z:
            return False
    return True


def reachable(bn: BayesNet, sources: Iterable[int], z: Iterable[int]) -> set[int]:
    """Nodes connected to ``sources`` by an active trail given ``z``.

    Two-phase reachability: mark ancestors of ``z``, then walk (node,
    direction) states so a node entered from a parent may only turn back up
    when it is an ancestor of the evidence. Sources not in ``z`` are included.
    """
    z = frozenset(z)
    anc_z = bn.ancestors_of_set(z)
    up, down = 0, 1
    stack = [(s, up) for s in sources]
    visited: set[tuple[int, int]] = set()
    out: set[int] = set()
    while stack:
        state = stack.pop()
        if state in visited:
            continue
        visited.add(state)
        node, direction = state
        if node not in z:
            out.add(node)
        if direction == up:
            if node not in z:
                stack.extend((p, up) for p in bn.parents[node])
                stack.extend((c, down) for c in bn.children(node))
        else:
            if node not in z:
                stack.extend((c, down) for c in bn.children(node))
            if node in anc_z:
                stack.extend((p, up) for p in bn.parents[node])
    return out


def d_separated(bn: BayesNet, x: Iterable[int], y: Iterable[int], z: Iterable[int] = ()) -> bool:
    x, y, z = frozenset(x), frozenset(y), frozenset(z)
    if x & y or x & z or y & z:
        raise OverlapError("X, Y and Z must be pairwise disjoint")
    return not (reachable(bn, x, z) & y)


def _subsets_by_size(items: Sequence[int]) -> Iterator[tuple[int, ...]]:
    for k in range(len(items) + 1):
        yield from itertools.combinations(items, k)


def iter_independencies(bn: BayesNet, cap: int | None = None) -> Iterator[IndepAssertion]:
    """Yield every pairwise ``(i ⟂ j | Z)`` that holds in ``bn``, in canonical order.

    Canonical order is ``(i, j, |Z|, sorted Z)`` with ``i < j``.
    """
    limit = enum_cap(cap)
    if bn.n > limit:
        raise CapExceededError(f"{bn.n} variables exceeds enumeration cap {limit}")
    n = bn.n
    for i in range(n):
        others = [v for v in range(n) if v != i]
        reach = {zs: reachable(bn, (i,), zs) for zs in _subsets_by_size(others)}
        for j in range(i + 1, n):
            rest = [v for v in others if v != j]
            for zs in _subsets_by_size(rest):
                if j not in reach[zs]:
                    yield IndepAssertion.pair(i, j, zs)


def enumerate_independencies(bn: BayesNet, cap: int | None = None) -> IndepSet:
    return IndepSet(frozenset(iter_independencies(bn, cap)), bn.n)


def same_markov_equivalence(g: BayesNet, h: BayesNet) -> bool:
    if not g.same_universe(h):
        raise UniverseMismatchError("graphs are over different variables")
    return skeleton(g) == skeleton(h) and immoralities(g) == immoralities(h)
