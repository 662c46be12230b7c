"""Directed and undirected graph structures over dense integer variable ids.

All algorithms in the package work on indices ``0..n-1``; names exist for
I/O and display only. Values are immutable once constructed.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import GraphError

Edge = tuple[int, int]


@dataclass(frozen=True)
class UndirectedGraph:
    n: int
    adjacency: tuple[frozenset[int], ...]

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise GraphError("adjacency length does not match n")
        for v, nbrs in enumerate(self.adjacency):
            if v in nbrs:
                raise GraphError(f"self-loop at {v}")
            for u in nbrs:
                if not 0 <= u < self.n or v not in self.adjacency[u]:
                    raise GraphError(f"asymmetric or out-of-range edge {v}-{u}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> UndirectedGraph:
        adj: list[set[int]] = [set() for _ in range(n)]
        for a, b in edges:
            if a == b:
                raise GraphError(f"self-loop at {a}")
            adj[a].add(b)
            adj[b].add(a)
        return cls(n, tuple(frozenset(s) for s in adj))

    def edges(self) -> list[Edge]:
        """Sorted list of ``(a, b)`` pairs with ``a < b``."""
        return sorted((a, b) for a in range(self.n) for b in self.adjacency[a] if a < b)

    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges())

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.adjacency[a]

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adjacency[v]

    def issubgraph(self, other: UndirectedGraph) -> bool:
        return self.n == other.n and all(
            a <= b for a, b in zip(self.adjacency, other.adjacency)
        )


@dataclass(frozen=True)
class BayesNet:
    """A BN structure: a DAG over named variables with an observed subset.

    ``parents[v]`` is the ordered parent tuple of variable ``v``. Construction
    rejects cycles, duplicate parents, self-loops and out-of-range ids.
    """

    names: tuple[str, ...]
    parents: tuple[tuple[int, ...], ...]
    observed: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        n = len(self.names)
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "parents", tuple(tuple(p) for p in self.parents))
        object.__setattr__(self, "observed", frozenset(self.observed))
        if len(set(self.names)) != n:
            raise GraphError("variable names must be unique")
        if len(self.parents) != n:
            raise GraphError("parents must have one entry per variable")
        for v, ps in enumerate(self.parents):
            if len(set(ps)) != len(ps):
                raise GraphError(f"duplicate parent for {self.names[v]!r}")
            for p in ps:
                if not 0 <= p < n:
                    raise GraphError(f"parent id {p} out of range")
                if p == v:
                    raise GraphError(f"self-loop at {self.names[v]!r}")
        for v in self.observed:
            if not 0 <= v < n:
                raise GraphError(f"observed id {v} out of range")
        if len(self._kahn()) != n:
            raise GraphError("graph contains a directed cycle")

    # construction helpers

    @classmethod
    def from_edges(
        cls,
        names: Sequence[str],
        edges: Iterable[tuple],
        observed: Iterable = (),
    ) -> BayesNet:
        """Build from ``(parent, child)`` pairs given as names or ids."""
        names = tuple(names)
        index = {name: i for i, name in enumerate(names)}

        def resolve(x) -> int:
            if isinstance(x, str):
                if x not in index:
                    raise GraphError(f"unknown variable {x!r}")
                return index[x]
            return int(x)

        parents: list[list[int]] = [[] for _ in names]
        seen: set[Edge] = set()
        for u, v in edges:
            e = (resolve(u), resolve(v))
            if e in seen:
                raise GraphError(f"duplicate edge {u}->{v}")
            seen.add(e)
            if not 0 <= e[1] < len(names):
                raise GraphError(f"child id {e[1]} out of range")
            parents[e[1]].append(e[0])
        return cls(names, tuple(tuple(sorted(p)) for p in parents),
                   frozenset(resolve(o) for o in observed))

    @classmethod
    def empty(cls, n: int, observed: Iterable[int] = ()) -> BayesNet:
        return cls(tuple(f"X{i}" for i in range(n)), ((),) * n, frozenset(observed))

    def with_parents(self, v: int, parents: Iterable[int]) -> BayesNet:
        ps = list(self.parents)
        ps[v] = tuple(sorted(parents))
        return BayesNet(self.names, tuple(ps), self.observed)

    def without_edge(self, u: int, v: int) -> BayesNet:
        if u not in self.parents[v]:
            raise GraphError(f"no edge {u}->{v}")
        return self.with_parents(v, (p for p in self.parents[v] if p != u))

    # basic queries

    @property
    def n(self) -> int:
        return len(self.names)

    @cached_property
    def _children(self) -> tuple[tuple[int, ...], ...]:
        ch: list[list[int]] = [[] for _ in range(self.n)]
        for v, ps in enumerate(self.parents):
            for p in ps:
                ch[p].append(v)
        return tuple(tuple(sorted(c)) for c in ch)

    def children(self, v: int) -> tuple[int, ...]:
        return self._children[v]

    @cached_property
    def latents(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.n) if v not in self.observed)

    def is_observed(self, v: int) -> bool:
        return v in self.observed

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise GraphError(f"unknown variable {name!r}") from None

    def edges(self) -> list[Edge]:
        """Sorted ``(parent, child)`` pairs."""
        return sorted((p, v) for v, ps in enumerate(self.parents) for p in ps)

    def edge_count(self) -> int:
        return sum(len(p) for p in self.parents)

    def has_edge(self, u: int, v: int) -> bool:
        return u in self.parents[v]

    def adjacent(self, u: int, v: int) -> bool:
        return u in self.parents[v] or v in self.parents[u]

    def ancestors(self, v: int) -> frozenset[int]:
        return self._closure(v, self.parents)

    def descendants(self, v: int) -> frozenset[int]:
        return self._closure(v, self._children)

    @staticmethod
    def _closure(v, step) -> frozenset[int]:
        seen: set[int] = set()
        stack = list(step[v])
        while stack:
            u = stack.pop()
            if u not in seen:
                seen.add(u)
                stack.extend(step[u])
        return frozenset(seen)

    def ancestors_of_set(self, vs: Iterable[int]) -> frozenset[int]:
        """Ancestors of ``vs`` including ``vs`` itself."""
        seen = set(vs)
        stack = list(seen)
        while stack:
            for p in self.parents[stack.pop()]:
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return frozenset(seen)

    def _kahn(self) -> list[int]:
        indeg = [len(p) for p in self.parents]
        heap = [v for v in range(self.n) if indeg[v] == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            v = heapq.heappop(heap)
            order.append(v)
            for c in self._children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    heapq.heappush(heap, c)
        return order

    def same_universe(self, other: BayesNet) -> bool:
        return self.names == other.names

    def __repr__(self) -> str:
        edges = ", ".join(f"{self.names[u]}->{self.names[v]}" for u, v in self.edges())
        obs = ",".join(self.names[v] for v in sorted(self.observed))
        return f"BayesNet([{edges}], observed={{{obs}}})"


def topological_order(bn: BayesNet) -> list[int]:
    """Kahn's algorithm, smallest available id first."""
    return bn._kahn()


def skeleton(bn: BayesNet) -> UndirectedGraph:
    return UndirectedGraph.from_edges(bn.n, bn.edges())


def immoralities(bn: BayesNet) -> frozenset[tuple[int, int, int]]:
    """All ``(x, z, y)`` with ``x -> z <- y``, ``x < y`` and x, y non-adjacent."""
    out = set()
    for z, ps in enumerate(bn.parents):
        for x, y in itertools.combinations(sorted(ps), 2):
            if not bn.adjacent(x, y):
                out.add((x, z, y))
    return frozenset(out)


def moral_edges(bn: BayesNet) -> list[Edge]:
    """Co-parent edges that moralization adds on top of the skeleton."""
    added = set()
    for ps in bn.parents:
        for x, y in itertools.combinations(sorted(ps), 2):
            if not bn.adjacent(x, y):
                added.add((x, y))
    return sorted(added)


def moralize(bn: BayesNet) -> UndirectedGraph:
    return UndirectedGraph.from_edges(bn.n, bn.edges() + moral_edges(bn))


def markov_blanket(bn: BayesNet, v: int) -> frozenset[int]:
    """Parents and children of ``v`` plus the children's other parents."""
    mb = set(bn.parents[v]) | set(bn.children(v))
    for c in bn.children(v):
        mb.update(bn.parents[c])
    mb.discard(v)
    return frozenset(mb)
