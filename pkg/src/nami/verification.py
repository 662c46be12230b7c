"""Certification of inverse structures: I-map, minimality, naturalness."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence, Union

from .errors import CapExceededError, NotAnIMapError, UniverseMismatchError
from .graph import BayesNet, Edge
from .independence import IndepAssertion, d_separated, enum_cap, iter_independencies
from .inversion import InverseStructure

GraphLike = Union[BayesNet, InverseStructure]


@dataclass(frozen=True)
class Check:
    """Outcome of one property check; truthy iff the property holds."""

    ok: bool
    witness: Any = None
    method: str = "exhaustive"

    def __bool__(self) -> bool:
        return self.ok


def _joint(h: GraphLike) -> BayesNet:
    return h.joint_graph() if isinstance(h, InverseStructure) else h


def _check_universe(h: BayesNet, g: BayesNet) -> None:
    if not h.same_universe(g):
        raise UniverseMismatchError("inverse and model are over different variables")


def local_markov_violation(h: BayesNet, g: BayesNet) -> IndepAssertion | None:
    """First local independence of ``h`` that fails to hold in ``g``.

    ``h`` is an I-map of ``g`` exactly when every ``v ⟂ NonDesc(v) | Pa(v)``
    of ``h`` is a d-separation in ``g``. The returned pairwise assertion is
    implied by ``h`` and violated in ``g``.
    """
    for v in range(h.n):
        pa = frozenset(h.parents[v])
        rest = frozenset(range(h.n)) - h.descendants(v) - pa - {v}
        if rest and not d_separated(g, {v}, rest, pa):
            for y in sorted(rest):
                if not d_separated(g, {v}, {y}, pa):
                    return IndepAssertion.pair(v, y, pa)
    return None


def is_imap(h: GraphLike, g: BayesNet, cap: int | None = None, method: str = "auto") -> Check:
    """Does ``h`` assert only independencies that hold in ``g``?

    ``method="enumerate"`` walks every pairwise assertion of ``h`` in
    canonical order and is limited by the enumeration cap. ``"auto"`` decides
    through the local Markov property, then enumerates for a canonical witness
    when within the cap; above it the witness is a violated local independence.
    """
    hj = _joint(h)
    _check_universe(hj, g)
    limit = enum_cap(cap)
    if method == "enumerate":
        if hj.n > limit:
            raise CapExceededError(f"{hj.n} variables exceeds enumeration cap {limit}")
        for a in iter_independencies(hj, limit):
            if not d_separated(g, a.x, a.y, a.z):
                return Check(False, a)
        return Check(True)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    local = local_markov_violation(hj, g)
    if local is None:
        return Check(True, method="local-markov")
    if hj.n <= limit:
        return is_imap(hj, g, limit, method="enumerate")
    return Check(False, local, method="local-markov")


def _removable_edges(h: GraphLike) -> list[Edge]:
    return (h.graph if isinstance(h, InverseStructure) else h).edges()


def is_minimal_imap(h: GraphLike, g: BayesNet, cap: int | None = None) -> Check:
    """An I-map from which no single edge can be deleted.

    For an :class:`InverseStructure` only the edges of the inverse itself are
    candidates; the completed observed block is not.
    """
    base = is_imap(h, g, cap)
    if not base:
        raise NotAnIMapError(f"not an I-map: {base.witness}")
    # the local Markov test decides each deletion exactly; no witness is needed
    for u, v in _removable_edges(h):
        if local_markov_violation(_joint(h.without_edge(u, v)), g) is None:
            return Check(False, (u, v), method=base.method)
    return Check(True, method=base.method)


def is_natural(h: GraphLike, g: BayesNet) -> Check:
    """Either no latent-to-latent edge points at a ``g``-descendant, or none at an ancestor.

    Edges leaving observed variables are conditioning inputs and exempt. The
    witness of a failure is the pair ``(edge into a descendant, edge into an
    ancestor)``.
    """
    hg = h.graph if isinstance(h, InverseStructure) else h
    _check_universe(hg, g)
    to_desc = to_anc = None
    for u, v in hg.edges():
        if hg.is_observed(u):
            continue
        if to_desc is None and v in g.descendants(u):
            to_desc = (u, v)
        if to_anc is None and v in g.ancestors(u):
            to_anc = (u, v)
    if to_desc is not None and to_anc is not None:
        return Check(False, (to_desc, to_anc), method="direct")
    return Check(True, method="direct")


def prune_minimal_inverse(g: BayesNet, order: Sequence[int], cap: int | None = None) -> BayesNet:
    """Minimal I-map for ``order`` by greedy single-variable removal.

    Each variable starts conditioned on all its predecessors; a predecessor
    is dropped whenever it is d-separated from the variable by the others,
    repeating until nothing more can be dropped.
    """
    limit = enum_cap(cap)
    if g.n > limit:
        raise CapExceededError(f"{g.n} variables exceeds cap {limit}")
    if sorted(order) != list(range(g.n)):
        raise ValueError("order must be a permutation of all variables")
    parents: list[tuple[int, ...]] = [()] * g.n
    for i, y in enumerate(order):
        kept = set(order[:i])
        changed = True
        while changed:
            changed = False
            for w in sorted(kept):
                if d_separated(g, {y}, {w}, kept - {w}):
                    kept.discard(w)
                    changed = True
        parents[y] = tuple(sorted(kept))
    return BayesNet(g.names, tuple(parents), g.observed)


@dataclass
class VerificationReport:
    imap: Check
    minimal: Check | None
    natural: Check
    nodes: int
    edges: int
    names: tuple[str, ...] = field(repr=False, default=())

    @property
    def ok(self) -> bool:
        return bool(self.imap) and bool(self.minimal) and bool(self.natural)

    def _fmt_witness(self, kind: str, w) -> str | None:
        if w is None:
            return None
        if kind == "imap":
            return w.format(self.names)
        if kind == "minimal":
            return f"{self.names[w[0]]}->{self.names[w[1]]}"
        return ", ".join(f"{self.names[a]}->{self.names[b]}" for a, b in w)

    def to_dict(self) -> dict:
        return {
            "is_imap": self.imap.ok,
            "imap_witness": self._fmt_witness("imap", self.imap.witness),
            "imap_method": self.imap.method,
            "is_minimal": None if self.minimal is None else self.minimal.ok,
            "minimal_witness": None if self.minimal is None
            else self._fmt_witness("minimal", self.minimal.witness),
            "is_natural": self.natural.ok,
            "natural_witness": self._fmt_witness("natural", self.natural.witness),
            "nodes": self.nodes,
            "edges": self.edges,
        }

    def table(self) -> str:
        d = self.to_dict()
        rows = [
            ("I-map", d["is_imap"], d["imap_witness"]),
            ("minimal", d["is_minimal"], d["minimal_witness"]),
            ("natural", d["is_natural"], d["natural_witness"]),
        ]
        lines = [f"{'check':<9} {'result':<7} witness"]
        for name, val, wit in rows:
            shown = "n/a" if val is None else ("pass" if val else "FAIL")
            lines.append(f"{name:<9} {shown:<7} {wit or ''}".rstrip())
        lines.append(f"nodes={self.nodes} edges={self.edges} method={d['imap_method']}")
        return "\n".join(lines)


def verify(h: GraphLike, g: BayesNet, cap: int | None = None) -> VerificationReport:
    imap = is_imap(h, g, cap)
    minimal = is_minimal_imap(h, g, cap) if imap else None
    natural = is_natural(h, g)
    hg = h.graph if isinstance(h, InverseStructure) else h
    return VerificationReport(imap, minimal, natural, hg.n, hg.edge_count(), hg.names)
