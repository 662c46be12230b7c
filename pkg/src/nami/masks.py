"""Masking matrices for autoregressive inverse factors.

Every mask is a 0/1 matrix with rows indexing source units and columns
target units. A stack carries the VarId behind each input and output unit so
connectivity can be compared against conditioning sets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import MaskSpecError
from .inversion import InverseStructure


@dataclass(frozen=True)
class SubsetLabel:
    id: int
    members: frozenset[int]


@dataclass(frozen=True)
class MaskSpec:
    input_labels: tuple[SubsetLabel, ...]
    hidden_labels: tuple[tuple[SubsetLabel, ...], ...]
    output_labels: tuple[SubsetLabel, ...]
    input_vars: tuple[int, ...]
    output_vars: tuple[int, ...]
    pool: tuple[SubsetLabel, ...] = ()
    seed: int | None = None
    degrees: tuple[tuple[int, ...], ...] | None = None  # MADE integers per layer

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return tuple(len(h) for h in self.hidden_labels)

    def validate(self) -> None:
        if len(self.input_labels) != len(self.input_vars):
            raise MaskSpecError("one VarId per input unit is required")
        if len(self.output_labels) != len(self.output_vars):
            raise MaskSpecError("one VarId per output unit is required")
        by_id: dict[int, frozenset[int]] = {}
        every = list(self.input_labels) + list(self.output_labels) + list(self.pool)
        every += [lab for layer in self.hidden_labels for lab in layer]
        for lab in every:
            if by_id.setdefault(lab.id, lab.members) != lab.members:
                raise MaskSpecError(f"label id {lab.id} names two different subsets")
        if len({m for m in by_id.values()}) != len(by_id):
            raise MaskSpecError("two label ids name the same subset")
        if self.pool:
            allowed = set(self.pool)
            for layer in self.hidden_labels:
                for lab in layer:
                    if lab not in allowed:
                        raise MaskSpecError(f"hidden label {sorted(lab.members)} is not in the pool")
        if any(not layer for layer in self.hidden_labels):
            raise MaskSpecError("hidden layers must be nonempty")


@dataclass(frozen=True, eq=False)
class MaskStack:
    masks: tuple[np.ndarray, ...]
    skip: np.ndarray | None
    input_vars: tuple[int, ...]
    output_vars: tuple[int, ...]

    def reachability(self) -> np.ndarray:
        """Boolean (inputs x outputs) matrix: is there any unmasked path?"""
        if not self.masks:
            raise MaskSpecError("stack has no layers")
        reach = self.masks[0].astype(bool)
        for m in self.masks[1:]:
            if reach.shape[1] != m.shape[0]:
                raise MaskSpecError(f"mask shapes {reach.shape} and {m.shape} do not chain")
            reach = (reach.astype(np.int64) @ m.astype(np.int64)) > 0
        if self.skip is not None:
            if self.skip.shape != reach.shape:
                raise MaskSpecError(f"skip mask shape {self.skip.shape} != {reach.shape}")
            reach = reach | self.skip.astype(bool)
        return reach

    def reachable_sets(self) -> list[frozenset[int]]:
        reach = self.reachability()
        return [frozenset(self.input_vars[i] for i in np.flatnonzero(reach[:, o]))
                for o in range(reach.shape[1])]

    def equals(self, other: MaskStack) -> bool:
        same_skip = (self.skip is None) == (other.skip is None) and (
            self.skip is None or np.array_equal(self.skip, other.skip))
        return (len(self.masks) == len(other.masks) and same_skip
                and all(np.array_equal(a, b) for a, b in zip(self.masks, other.masks))
                and self.input_vars == other.input_vars and self.output_vars == other.output_vars)

    def to_json(self, spec: MaskSpec | None = None) -> dict:
        out = {
            "shapes": [list(m.shape) for m in self.masks],
            "input_vars": list(self.input_vars),
            "output_vars": list(self.output_vars),
            "masks": [m.astype(int).ravel().tolist() for m in self.masks],
            "skip": None if self.skip is None else self.skip.astype(int).ravel().tolist(),
        }
        if spec is not None:
            out["seed"] = spec.seed
            if spec.degrees is not None:
                out["degrees"] = [list(d) for d in spec.degrees]
            out["labels"] = {
                "input": [_label_json(lab) for lab in spec.input_labels],
                "hidden": [[_label_json(lab) for lab in layer] for layer in spec.hidden_labels],
                "output": [_label_json(lab) for lab in spec.output_labels],
            }
        return out

    def save_npz(self, path) -> None:
        arrays = {f"mask{i}": m for i, m in enumerate(self.masks)}
        if self.skip is not None:
            arrays["skip"] = self.skip
        np.savez(path, **arrays)


def _label_json(lab: SubsetLabel) -> dict:
    return {"id": lab.id, "members": sorted(lab.members)}


def _assign(rng: np.random.Generator, pool: Sequence, size: int, ensure_coverage: bool) -> list:
    """``size`` draws from ``pool``; with coverage every entry appears once first."""
    if ensure_coverage and size >= len(pool):
        head = list(rng.permutation(len(pool)))
        rest = rng.integers(0, len(pool), size - len(pool)).tolist()
        idx = head + rest
    else:
        idx = rng.integers(0, len(pool), size).tolist()
    return [pool[i] for i in idx]


def _as_mask(cond: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(cond, dtype=np.uint8)


def made_masks(n_latent: int, n_obs: int, hidden_sizes: Sequence[int], seed: int = 0,
               ensure_coverage: bool = True, skip: bool = True) -> tuple[MaskStack, MaskSpec]:
    """Conditional MADE over latents z_1..z_m given observations x.

    Inputs are z_1..z_m followed by the observations, labelled i and 0. Hidden
    units draw integer labels from 1..m-1 (clamped to 1 when m = 1, which
    leaves only the observations connected). Output i sees inputs labelled
    below i. Latent z_i has VarId i-1 and observation j has VarId m+j.
    """
    m = n_latent
    if m < 1:
        raise MaskSpecError("need at least one latent")
    if n_obs < 0 or any(h < 1 for h in hidden_sizes):
        raise MaskSpecError("layer sizes must be positive")
    rng = np.random.default_rng(seed)
    in_int = np.array(list(range(1, m + 1)) + [0] * n_obs)
    out_int = np.arange(1, m + 1)
    pool = list(range(1, max(m - 1, 1) + 1))
    hidden_int = [np.array(_assign(rng, pool, h, ensure_coverage)) for h in hidden_sizes]

    masks = []
    prev = in_int
    for k, cur in enumerate(hidden_int):
        rule = prev[:, None] < cur[None, :] if k == 0 else prev[:, None] <= cur[None, :]
        masks.append(_as_mask(rule))
        prev = cur
    masks.append(_as_mask(prev[:, None] < out_int[None, :]))
    skip_mask = _as_mask(in_int[:, None] < out_int[None, :]) if skip else None

    in_vars = tuple(range(m + n_obs))
    out_vars = tuple(range(m))
    obs = frozenset(range(m, m + n_obs))

    # subset reading: unit with integer k may depend on x and z_1..z_{k-1}
    in_sets = [frozenset([v]) if k else obs for v, k in zip(in_vars, in_int)]
    prefixes = {k: obs | frozenset(range(k - 1)) for k in range(1, m + 1)}
    labels = _numbered(in_sets + list(prefixes.values()))
    spec = MaskSpec(
        input_labels=tuple(labels[s] for s in in_sets),
        hidden_labels=tuple(tuple(labels[prefixes[int(k)]] for k in h) for h in hidden_int),
        output_labels=tuple(labels[prefixes[int(k)]] for k in out_int),
        input_vars=in_vars,
        output_vars=out_vars,
        pool=tuple(labels[prefixes[k]] for k in pool),
        seed=seed,
        degrees=(tuple(map(int, in_int)), *(tuple(map(int, h)) for h in hidden_int),
                 tuple(map(int, out_int))),
    )
    return MaskStack(tuple(masks), skip_mask, in_vars, out_vars), spec


def subset_masks(spec: MaskSpec, skip: bool = True) -> MaskStack:
    """Connect a source to a target iff the source's subset lies inside the target's."""
    spec.validate()

    def rule(src: Sequence[SubsetLabel], dst: Sequence[SubsetLabel]) -> np.ndarray:
        return _as_mask([[a.members <= b.members for b in dst] for a in src])

    layers = [spec.input_labels, *spec.hidden_labels, spec.output_labels]
    masks = tuple(rule(a, b) for a, b in zip(layers, layers[1:]))
    skip_mask = rule(spec.input_labels, spec.output_labels) if skip else None
    return MaskStack(masks, skip_mask, spec.input_vars, spec.output_vars)


def _numbered(subsets: Sequence[frozenset[int]]) -> dict[frozenset[int], SubsetLabel]:
    out: dict[frozenset[int], SubsetLabel] = {}
    for s in subsets:
        if s not in out:
            out[s] = SubsetLabel(len(out), s)
    return out


def tree_made_spec(depth: int, hidden_sizes: Sequence[int], seed: int = 0,
                   ensure_coverage: bool = True) -> MaskSpec:
    """Subset spec for q_i(x_i | x_{i+1}, ..., x_{2i+2}) on a binary tree of ``depth``.

    Inputs are x_0..x_{2^d-2}, each labelled by itself; outputs are the
    internal nodes. For each i the pool holds {x_{i+1}} and the suffixes
    {x_s, ..., x_{2i+2}} for s = i+2 .. 2i+1.
    """
    if depth < 2:
        raise MaskSpecError("tree depth must be at least 2")
    n = 2 ** depth - 1
    internal = range(2 ** (depth - 1) - 1)
    pool_sets = []
    for i in internal:
        pool_sets.append(frozenset([i + 1]))
        pool_sets += [frozenset(range(s, 2 * i + 3)) for s in range(i + 2, 2 * i + 2)]
    out_sets = [frozenset(range(i + 1, 2 * i + 3)) for i in internal]
    in_sets = [frozenset([v]) for v in range(n)]
    labels = _numbered(in_sets + pool_sets + out_sets)
    pool = tuple(dict.fromkeys(labels[s] for s in pool_sets))
    rng = np.random.default_rng(seed)
    hidden = tuple(tuple(_assign(rng, pool, h, ensure_coverage)) for h in hidden_sizes)
    return MaskSpec(
        input_labels=tuple(labels[s] for s in in_sets),
        hidden_labels=hidden,
        output_labels=tuple(labels[s] for s in out_sets),
        input_vars=tuple(range(n)),
        output_vars=tuple(internal),
        pool=pool,
        seed=seed,
    )


def inverse_subset_spec(h: InverseStructure, hidden_sizes: Sequence[int], seed: int = 0,
                        ensure_coverage: bool = True) -> MaskSpec:
    """Subset spec realizing the latent factors of any inverse structure.

    The hidden pool is the distinct parent sets together with their nonempty
    pairwise intersections.
    """
    g = h.graph
    latents = h.factor_order()
    parent_sets = [frozenset(g.parents[z]) for z in latents]
    inter = [a & b for i, a in enumerate(parent_sets) for b in parent_sets[i + 1:] if a & b]
    pool_sets = [s for s in dict.fromkeys(parent_sets + inter) if s]
    if not pool_sets:
        raise MaskSpecError("every factor is unconditional; nothing to mask")
    in_sets = [frozenset([v]) for v in range(g.n)]
    labels = _numbered(in_sets + pool_sets + parent_sets)
    pool = tuple(labels[s] for s in pool_sets)
    rng = np.random.default_rng(seed)
    hidden = tuple(tuple(_assign(rng, pool, s, ensure_coverage)) for s in hidden_sizes)
    return MaskSpec(
        input_labels=tuple(labels[s] for s in in_sets),
        hidden_labels=hidden,
        output_labels=tuple(labels[s] for s in parent_sets),
        input_vars=tuple(range(g.n)),
        output_vars=tuple(latents),
        pool=pool,
        seed=seed,
    )


def verify_connectivity(stack: MaskStack, expected: Mapping[int, frozenset[int]] | Sequence[
        frozenset[int]]) -> tuple[bool, tuple | None]:
    """Compare reachable inputs per output with ``expected`` exactly.

    ``expected`` maps output VarId to its input VarIds (a sequence is read in
    output-unit order). The witness is ``(output, input, "extra" | "missing")``.
    """
    reach = stack.reachable_sets()
    if isinstance(expected, Mapping):
        want = [frozenset(expected[v]) for v in stack.output_vars]
    else:
        want = [frozenset(s) for s in expected]
        if len(want) != len(reach):
            raise MaskSpecError(f"{len(want)} expected sets for {len(reach)} outputs")
    for o, (got, exp) in enumerate(zip(reach, want)):
        if got - exp:
            return False, (stack.output_vars[o], min(got - exp), "extra")
        if exp - got:
            return False, (stack.output_vars[o], min(exp - got), "missing")
    return True, None


def dumps(stack: MaskStack, spec: MaskSpec | None = None) -> str:
    return json.dumps(stack.to_json(spec))
