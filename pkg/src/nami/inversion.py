"""Inverse structure construction: NaMI and the baseline inverses.

An inverse structure is a BN over the model's variables in which latents are
conditioned on observations and on each other. Edges never run from a latent
into an observed variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .elimination import MarkedGraph
from .errors import EmptyLatentsError, InvalidInverseError, InvalidOrderError, InvalidPartitionError
from .graph import BayesNet, Edge, markov_blanket, moral_edges, topological_order

NAMI_MODES = ("forward", "reverse", "grouped")
MODES = NAMI_MODES + ("heuristic", "fully-connected", "mean-field", "custom")


@dataclass(frozen=True)
class NamiStep:
    frontier: tuple[int, ...]
    variable: int
    fills: tuple[Edge, ...]
    parents: tuple[int, ...]


@dataclass(frozen=True)
class InverseStructure:
    """An inverse graph plus the run that produced it.

    ``models_observed`` says whether ``graph`` also fixes the factorization of
    the observed block. When it does not (NaMI stopping at the latents, the
    fully-connected and mean-field baselines), the observed variables are left
    unconstrained: :meth:`joint_graph` completes them into a full DAG.
    """

    graph: BayesNet
    mode: str
    elim_order: tuple[int, ...] = ()
    steps: tuple[NamiStep, ...] = ()
    models_observed: bool = False
    groups: tuple[tuple[int, ...], ...] | None = None
    moral_added: tuple[Edge, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        check_valid_inverse(self.graph)

    @property
    def names(self) -> tuple[str, ...]:
        return self.graph.names

    def parents(self, v: int) -> tuple[int, ...]:
        return self.graph.parents[v]

    def factor_order(self) -> tuple[int, ...]:
        """Latents in sampling order: reverse of the elimination order."""
        if self.elim_order:
            return tuple(v for v in reversed(self.elim_order) if not self.graph.is_observed(v))
        return tuple(v for v in topological_order(self.graph) if not self.graph.is_observed(v))

    def joint_graph(self) -> BayesNet:
        if self.models_observed:
            return self.graph
        g = self.graph
        obs = sorted(g.observed)
        parents = list(g.parents)
        for k, x in enumerate(obs):
            parents[x] = tuple(sorted(set(parents[x]) | set(obs[:k])))
        return BayesNet(g.names, tuple(parents), g.observed)

    def without_edge(self, u: int, v: int) -> InverseStructure:
        return replace(self, graph=self.graph.without_edge(u, v), steps=())


def check_valid_inverse(h: BayesNet) -> None:
    for x in h.observed:
        bad = [p for p in h.parents[x] if p not in h.observed]
        if bad:
            raise InvalidInverseError(
                f"latent {h.names[bad[0]]!r} is a parent of observed {h.names[x]!r}"
            )


def _require_latents(bn: BayesNet) -> None:
    if not bn.latents:
        raise EmptyLatentsError("model has no latent variables")


def latent_links(bn: BayesNet, step: Sequence[Sequence[int]]) -> list[frozenset[int]]:
    """For each variable, the nearest latents reached by following ``step``.

    Walking stops at the first latent on each path and passes through
    observed variables, so ``latent_links(bn, bn.parents)[u]`` are the
    latents directly upstream of ``u`` once the observations are projected out.
    """
    out = []
    for u in range(bn.n):
        found: set[int] = set()
        seen: set[int] = set()
        stack = list(step[u])
        while stack:
            w = stack.pop()
            if w in seen:
                continue
            seen.add(w)
            if bn.is_observed(w):
                stack.extend(step[w])
            else:
                found.add(w)
        out.append(frozenset(found))
    return out


def nami_invert(
    bn: BayesNet,
    mode: str = "forward",
    groups: Sequence[Iterable[int]] | None = None,
    include_observed: bool = False,
    prune_barren: bool = True,
) -> InverseStructure:
    """Natural minimal I-map inverse by simulated min-fill variable elimination.

    ``mode`` is ``"forward"`` (eliminate in topological order) or
    ``"reverse"``. ``groups`` is an ordered partition of the latents that are
    eliminated block by block. With ``include_observed`` the elimination
    continues over the observed variables so the result also factorizes the
    observed block.

    Upstream latents of a variable are the nearest latents above it, looking
    through observed variables. ``prune_barren`` drops eliminated latents that
    no longer have an unmarked descendant from the graph (see
    :class:`~nami.elimination.MarkedGraph`); without it the parent sets can
    keep edges that only a summed-out leaf latent justified.
    """
    if mode not in ("forward", "reverse"):
        raise ValueError(f"mode must be 'forward' or 'reverse', got {mode!r}")
    _require_latents(bn)
    latents = set(bn.latents)
    if groups is not None:
        blocks = [frozenset(g) for g in groups]
        flat = [v for b in blocks for v in b]
        if any(not b for b in blocks) or len(flat) != len(set(flat)) or set(flat) != latents:
            raise InvalidPartitionError("groups must partition the latent variables")
    else:
        blocks = [frozenset(latents)]
    if include_observed and bn.observed:
        blocks.append(frozenset(bn.observed))

    if mode == "forward":
        up_step, down_step = bn.parents, bn._children
    else:
        up_step, down_step = bn._children, bn.parents
    upstream, downstream = latent_links(bn, up_step), latent_links(bn, down_step)
    if include_observed:
        # the observed block is ordered by direct links only
        upstream = [upstream[u] if u in latents else frozenset(up_step[u]) for u in range(bn.n)]
        downstream = [downstream[u] | {w for w in down_step[u] if bn.is_observed(w)}
                      for u in range(bn.n)]

    j = MarkedGraph.from_bn(bn, prune_barren)
    marked = j.marked
    parents: list[tuple[int, ...]] = [()] * bn.n
    steps = []

    for block in blocks:
        def ready(u):
            return all(w in marked or w not in block for w in upstream[u])

        frontier = {u for u in block if ready(u)}
        while frontier:
            snapshot = tuple(sorted(frontier))
            v = min(frontier, key=lambda u: (j.min_fill_cost(u), u))
            nbrs, fills = j.eliminate(v)
            parents[v] = tuple(nbrs)
            frontier.discard(v)
            steps.append(NamiStep(snapshot, v, tuple(fills), tuple(nbrs)))
            for u in downstream[v]:
                if u in block and u not in marked and ready(u):
                    frontier.add(u)
        left = block - marked
        if left:  # unreachable for a DAG; guards the frontier bookkeeping
            raise AssertionError(f"frontier exhausted with {sorted(left)} unmarked")

    graph = BayesNet(bn.names, tuple(parents), bn.observed)
    return InverseStructure(
        graph=graph,
        mode="grouped" if groups is not None else mode,
        elim_order=tuple(s.variable for s in steps),
        steps=tuple(steps),
        models_observed=include_observed,
        groups=tuple(tuple(sorted(b)) for b in blocks[: len(groups)]) if groups is not None else None,
        moral_added=tuple(moral_edges(bn)),
    )


def stuhlmuller_invert(bn: BayesNet, order: Sequence[int] | None = None) -> InverseStructure:
    """Heuristic inverse: parents are the earlier Markov-blanket members.

    Variables are visited in ``order`` (default: the reverse of
    :func:`topological_order`); observed variables keep only observed parents.
    """
    _require_latents(bn)
    if order is None:
        order = list(reversed(topological_order(bn)))
    if sorted(order) != list(range(bn.n)):
        raise InvalidOrderError("order must be a permutation of all variables")
    seen: set[int] = set()
    parents: list[tuple[int, ...]] = [()] * bn.n
    for y in order:
        cand = seen & markov_blanket(bn, y)
        if bn.is_observed(y):
            cand = {c for c in cand if bn.is_observed(c)}
        parents[y] = tuple(sorted(cand))
        seen.add(y)
    graph = BayesNet(bn.names, tuple(parents), bn.observed)
    return InverseStructure(graph, "heuristic", models_observed=True)


def fully_connected_inverse(bn: BayesNet, order: Sequence[int] | None = None) -> InverseStructure:
    """Every latent conditions on all observations and all earlier latents."""
    _require_latents(bn)
    if order is None:
        order = [v for v in reversed(topological_order(bn)) if not bn.is_observed(v)]
    if sorted(order) != list(bn.latents):
        raise InvalidOrderError("order must be a permutation of the latent variables")
    obs = tuple(sorted(bn.observed))
    parents: list[tuple[int, ...]] = [()] * bn.n
    for k, z in enumerate(order):
        parents[z] = tuple(sorted(obs + tuple(order[:k])))
    graph = BayesNet(bn.names, tuple(parents), bn.observed)
    return InverseStructure(graph, "fully-connected")


def mean_field_inverse(bn: BayesNet) -> InverseStructure:
    _require_latents(bn)
    obs = tuple(sorted(bn.observed))
    parents = tuple(() if bn.is_observed(v) else obs for v in range(bn.n))
    return InverseStructure(BayesNet(bn.names, parents, bn.observed), "mean-field")


def edge_count(h: InverseStructure) -> int:
    return h.graph.edge_count()
