"""Simulated variable elimination on the moral graph.

A :class:`MarkedGraph` is the induced graph under construction: the moral
graph grown by fill edges, with eliminated variables marked. Its cliques are
the scopes of the intermediate factors variable elimination would create.

With ``prune_barren`` the neighbourhoods are taken in the moral graph of the
ancestral closure of the unmarked variables. Eliminated variables with no
unmarked descendant sum out to one and stop linking their co-parents, so a
variable's unmarked neighbours are then exactly the unmarked variables it is
d-connected to given the rest.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import AlreadyMarkedError, DuplicateVariableError, GraphError
from .graph import BayesNet, Edge, UndirectedGraph, moralize


class MarkedGraph:
    """Mutable induced graph. Mutate only through :meth:`eliminate`."""

    def __init__(self, base: UndirectedGraph, bn: BayesNet | None = None,
                 prune_barren: bool = False):
        if prune_barren and bn is None:
            raise GraphError("prune_barren needs the directed model")
        self.origin = base
        self.n = base.n
        self.adj: list[set[int]] = [set(s) for s in base.adjacency]
        self.marked: set[int] = set()
        self.fill_log: list[Edge] = []
        self.bn = bn
        self.prune_barren = prune_barren
        # live adjacency drives neighbours and costs; adj accumulates every edge
        self.live = [set(s) for s in base.adjacency] if prune_barren else self.adj
        # a variable stays relevant while unmarked or with a relevant child
        self.relevant: set[int] = set(range(self.n))
        self._live_children = [len(bn.children(v)) for v in range(self.n)] if bn else []

    @classmethod
    def from_bn(cls, bn: BayesNet, prune_barren: bool = False) -> MarkedGraph:
        return cls(moralize(bn), bn, prune_barren)

    def copy(self) -> MarkedGraph:
        new = MarkedGraph.__new__(MarkedGraph)
        new.origin = self.origin
        new.n = self.n
        new.adj = [set(s) for s in self.adj]
        new.marked = set(self.marked)
        new.fill_log = list(self.fill_log)
        new.bn = self.bn
        new.prune_barren = self.prune_barren
        new.live = [set(s) for s in self.live] if self.prune_barren else new.adj
        new.relevant = set(self.relevant)
        new._live_children = list(self._live_children)
        return new

    @property
    def base(self) -> UndirectedGraph:
        return UndirectedGraph(self.n, tuple(frozenset(s) for s in self.adj))

    def unmarked_neighbors(self, v: int) -> list[int]:
        return sorted(u for u in self.live[v] if u not in self.marked)

    def min_fill_cost(self, v: int) -> int:
        if v in self.marked:
            raise AlreadyMarkedError(f"variable {v} is already eliminated")
        nbrs = [u for u in self.live[v] if u not in self.marked]
        cost = 0
        for i, a in enumerate(nbrs):
            adj_a = self.live[a]
            for b in nbrs[i + 1:]:
                if b not in adj_a:
                    cost += 1
        return cost

    def eliminate(self, v: int) -> tuple[list[int], list[Edge]]:
        """Connect the unmarked neighbours of ``v`` pairwise, then mark ``v``.

        Returns the unmarked neighbours (captured before marking) and the fill
        edges added, each as ``(a, b)`` with ``a < b``.
        """
        if v in self.marked:
            raise AlreadyMarkedError(f"variable {v} is already eliminated")
        nbrs = self.unmarked_neighbors(v)
        fills = []
        for a, b in itertools.combinations(nbrs, 2):
            if b not in self.live[a]:
                self.live[a].add(b)
                self.live[b].add(a)
                self.adj[a].add(b)
                self.adj[b].add(a)
                fills.append((a, b))
        self.fill_log.extend(fills)
        self.marked.add(v)
        if self.prune_barren and self._drop_irrelevant(v):
            self._rebuild_live()
        return nbrs, fills

    def _drop_irrelevant(self, v: int) -> bool:
        stack, dropped = [v], False
        while stack:
            a = stack.pop()
            if a not in self.marked or self._live_children[a] or a not in self.relevant:
                continue
            self.relevant.discard(a)
            dropped = True
            for p in self.bn.parents[a]:
                self._live_children[p] -= 1
                stack.append(p)
        return dropped

    def _rebuild_live(self) -> None:
        unmarked = [u for u in range(self.n) if u not in self.marked]
        # unmarked u, w adjacent iff joined through marked relevant nodes
        moral: dict[int, set[int]] = {a: set() for a in self.relevant}
        for a in self.relevant:
            pa = self.bn.parents[a]
            for p in pa:
                moral[a].add(p)
                moral[p].add(a)
            for p, q in itertools.combinations(pa, 2):
                moral[p].add(q)
                moral[q].add(p)
        for u in range(self.n):
            self.live[u] = set()
        for u in unmarked:
            seen, stack = {u}, [u]
            while stack:
                for w in moral[stack.pop()]:
                    if w in seen:
                        continue
                    seen.add(w)
                    if w in self.marked:
                        stack.append(w)
                    else:
                        self.live[u].add(w)

    def replay(self) -> UndirectedGraph:
        """Rebuild the grown graph from the original plus ``fill_log``."""
        return UndirectedGraph.from_edges(self.n, self.origin.edges() + self.fill_log)


def min_fill_cost(j: MarkedGraph, v: int) -> int:
    return j.min_fill_cost(v)


def eliminate(j: MarkedGraph, v: int) -> tuple[MarkedGraph, list[Edge]]:
    """Pure variant of :meth:`MarkedGraph.eliminate`; ``j`` is left untouched."""
    new = j.copy()
    _, fills = new.eliminate(v)
    return new, fills


@dataclass(frozen=True)
class EliminationStep:
    variable: int
    neighbors: tuple[int, ...]
    fills: tuple[Edge, ...]

    @property
    def clique(self) -> frozenset[int]:
        return frozenset(self.neighbors) | {self.variable}


@dataclass(frozen=True)
class EliminationTrace:
    steps: tuple[EliminationStep, ...]

    @property
    def order(self) -> tuple[int, ...]:
        return tuple(s.variable for s in self.steps)

    @property
    def cliques(self) -> list[frozenset[int]]:
        return [s.clique for s in self.steps]

    def width(self) -> int:
        """Largest clique size (0 for an empty trace)."""
        return max((len(s.neighbors) + 1 for s in self.steps), default=0)


def _check_order(bn: BayesNet, order: Sequence[int]) -> None:
    if len(set(order)) != len(order):
        raise DuplicateVariableError("elimination order repeats a variable")
    for v in order:
        if not 0 <= v < bn.n:
            raise GraphError(f"variable id {v} out of range")


def simulate_elimination(bn: BayesNet, order: Sequence[int],
                         prune_barren: bool = False) -> tuple[MarkedGraph, EliminationTrace]:
    _check_order(bn, order)
    j = MarkedGraph.from_bn(bn, prune_barren)
    steps = []
    for v in order:
        nbrs, fills = j.eliminate(v)
        steps.append(EliminationStep(v, tuple(nbrs), tuple(fills)))
    return j, EliminationTrace(tuple(steps))


def induced_graph(bn: BayesNet, order: Sequence[int]) -> MarkedGraph:
    return simulate_elimination(bn, order)[0]


@dataclass(frozen=True)
class CliqueTree:
    """Clique tree built from one elimination run, without clique absorption.

    Clique ``i < len(order)`` belongs to the i-th eliminated variable. When
    some variables are never eliminated a final residual clique holds all of
    them. ``parent[i]`` is the downstream neighbour (``None`` for the root)
    and ``sepsets[i]`` labels the edge from ``i`` to its parent.
    """

    cliques: tuple[frozenset[int], ...]
    owners: tuple[int | None, ...]
    parent: tuple[int | None, ...]
    sepsets: tuple[frozenset[int], ...]
    factor_assignment: dict[int, int]

    def neighbors(self, i: int) -> list[int]:
        out = [c for c, p in enumerate(self.parent) if p == i]
        if self.parent[i] is not None:
            out.append(self.parent[i])
        return out

    def path(self, i: int, j: int) -> list[int]:
        """Clique indices on the unique tree path from ``i`` to ``j``."""
        def up(k):
            chain = [k]
            while self.parent[chain[-1]] is not None:
                chain.append(self.parent[chain[-1]])
            return chain

        a, b = up(i), up(j)
        common = set(a) & set(b)
        meet = next(k for k in a if k in common)
        return a[: a.index(meet) + 1] + list(reversed(b[: b.index(meet)]))

    def subtree(self, i: int) -> set[int]:
        """Clique indices in the subtree hanging below ``i`` (inclusive)."""
        out = {i}
        grew = True
        while grew:
            grew = False
            for c, p in enumerate(self.parent):
                if p in out and c not in out:
                    out.add(c)
                    grew = True
        return out

    def sepset_of(self, variable: int) -> frozenset[int]:
        return self.sepsets[self.owners.index(variable)]

    def satisfies_running_intersection(self) -> bool:
        for i, j in itertools.combinations(range(len(self.cliques)), 2):
            shared = self.cliques[i] & self.cliques[j]
            if shared and not all(shared <= self.cliques[k] for k in self.path(i, j)):
                return False
        return True

    def is_family_preserving(self, bn: BayesNet) -> bool:
        return all(
            ({v} | set(bn.parents[v])) <= self.cliques[c]
            for v, c in self.factor_assignment.items()
        ) and len(self.factor_assignment) == bn.n


def clique_tree(bn: BayesNet, order: Sequence[int], prune_barren: bool = False) -> CliqueTree:
    _, trace = simulate_elimination(bn, order, prune_barren)
    pos = {v: i for i, v in enumerate(trace.order)}
    cliques = [s.clique for s in trace.steps]
    owners: list[int | None] = list(trace.order)
    remaining = frozenset(range(bn.n)) - set(pos)
    residual = None
    if remaining:
        # a step clique with no eliminated neighbours left can host the rest
        residual = next((i for i, s in enumerate(trace.steps)
                         if remaining <= s.clique and not any(u in pos for u in s.neighbors)), None)
    hosted = residual is not None
    if remaining and not hosted:
        residual = len(cliques)
        cliques.append(remaining)
        owners.append(None)

    parent: list[int | None] = []
    sepsets: list[frozenset[int]] = []
    for i, step in enumerate(trace.steps):
        rest = frozenset(step.neighbors)
        later = [pos[u] for u in rest if u in pos]
        if later:
            parent.append(min(later))
        elif rest and residual != i:
            parent.append(residual)
        else:
            parent.append(None)
        sepsets.append(rest)
    if remaining and not hosted:
        parent.append(None)
        sepsets.append(frozenset())

    # components finished early hang off the root with an empty sepset
    root = residual if residual is not None else len(cliques) - 1
    for i in range(len(parent)):
        if parent[i] is None and i != root:
            parent[i] = root

    assignment = {}
    for v in range(bn.n):
        family = {v} | set(bn.parents[v])
        assignment[v] = next(i for i, c in enumerate(cliques) if family <= c)
    return CliqueTree(tuple(cliques), tuple(owners), tuple(parent), tuple(sepsets), assignment)
