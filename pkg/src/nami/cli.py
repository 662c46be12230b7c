"""Command-line front end.

Exit codes: 0 success, 1 a certified property failed, 2 unreadable input
(bad arguments, missing file, malformed JSON), 3 semantically invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import io as nio
from .bench import FAMILIES, BenchConfig, rows_to_csv, run_bench
from .discrete import expected_posterior_kl, fit_inverse_exact
from .errors import NamiError, SupportError
from .graph import BayesNet
from .independence import enumerate_independencies
from .inversion import (
    InverseStructure,
    fully_connected_inverse,
    mean_field_inverse,
    nami_invert,
    stuhlmuller_invert,
)
from .masks import inverse_subset_spec, made_masks, subset_masks, tree_made_spec
from .verification import verify

INVERT_MODES = ("forward", "reverse", "heuristic", "full", "mean-field")
EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_SEMANTIC = 0, 1, 2, 3


class InputError(Exception):
    """Input that could not be read or parsed (exit 2)."""


def _read(path: str) -> dict:
    try:
        return nio.load_json(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def _parse_groups(text: str | None, bn: BayesNet) -> list[list[int]] | None:
    """Groups as JSON (``[["A","B"],["C"]]``) or ``A,B;C``."""
    if text is None:
        return None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError:
        raw = [[n.strip() for n in part.split(",") if n.strip()] for part in text.split(";")]
    if not isinstance(raw, list) or not all(isinstance(g, list) for g in raw):
        raise InputError("groups must be a list of lists of names")
    return [[bn.index(str(n)) for n in g] for g in raw]


def build_inverse(bn: BayesNet, mode: str, groups=None, include_observed: bool = False,
                  prune_barren: bool = True) -> InverseStructure:
    if mode in ("forward", "reverse"):
        return nami_invert(bn, mode, groups, include_observed, prune_barren)
    if groups is not None:
        raise NamiError(f"--groups only applies to NaMI modes, not {mode!r}")
    if mode == "heuristic":
        return stuhlmuller_invert(bn)
    if mode == "full":
        return fully_connected_inverse(bn)
    if mode == "mean-field":
        return mean_field_inverse(bn)
    raise NamiError(f"unknown mode {mode!r}")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_invert(args) -> int:
    bn = nio.bn_from_json(_read(args.input))
    h = build_inverse(bn, args.mode, _parse_groups(args.groups, bn), args.include_observed,
                      not args.literal)
    text = nio.inverse_to_dot(h) if args.format == "dot" else nio.dump_json(nio.inverse_to_json(h))
    _emit(text, args.out)
    return EXIT_OK


def cmd_trace(args) -> int:
    bn = nio.bn_from_json(_read(args.input))
    if args.mode not in ("forward", "reverse"):
        raise NamiError("trace needs a NaMI mode: forward or reverse")
    h = nami_invert(bn, args.mode, _parse_groups(args.groups, bn), prune_barren=not args.literal)
    _emit(nio.format_trace(bn, h), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    g = nio.bn_from_json(_read(args.model))
    h = nio.inverse_from_json(_read(args.inverse))
    report = verify(h, g, args.cap)
    if args.emit_independencies:
        indeps = enumerate_independencies(h.joint_graph(), args.cap)
        nio.dump_json(indeps.to_json(h.names), args.emit_independencies)
    if args.json:
        sys.stdout.write(nio.dump_json(report.to_dict()))
    else:
        sys.stdout.write(report.table() + "\n")
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_kl(args) -> int:
    bn = nio.discrete_from_json(_read(args.model))
    h = nio.inverse_from_json(_read(args.inverse))
    q = fit_inverse_exact(bn, h)
    kl = expected_posterior_kl(bn, q)
    sys.stdout.write(f"{kl:.12g}\n")
    if q.flags:
        sys.stderr.write(f"zero-probability parent rows set uniform for: {', '.join(q.flags)}\n")
    return EXIT_OK


def _sizes(text: str) -> list[int]:
    try:
        return [int(float(s)) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise InputError(f"bad size list {text!r}") from exc


def cmd_masks(args) -> int:
    hidden = _sizes(args.hidden)
    coverage = not args.uniform
    if args.kind == "made":
        stack, spec = made_masks(args.latents, args.observed, hidden, args.seed, coverage)
    elif args.kind == "tree":
        spec = tree_made_spec(args.depth, hidden, args.seed, coverage)
        stack = subset_masks(spec)
    else:
        if not args.inverse:
            raise InputError("--kind subset needs --inverse")
        h = nio.inverse_from_json(_read(args.inverse))
        spec = inverse_subset_spec(h, hidden, args.seed, coverage)
        stack = subset_masks(spec)
    if args.npz:
        stack.save_npz(args.npz)
    _emit(json.dumps(stack.to_json(spec)) + "\n", args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = BenchConfig(args.family, tuple(_sizes(args.sizes)), args.mode, args.repeats, args.seed)
    _emit(rows_to_csv(run_bench(cfg)), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nami", description="Natural minimal I-map inversion of BNs.")
    sub = p.add_subparsers(dest="command", required=True)

    def nami_flags(sp):
        sp.add_argument("--groups", help='ordered latent groups: JSON or "A,B;C"')
        sp.add_argument("--literal", action="store_true",
                        help="keep summed-out leaf latents in the graph (plain induced graph)")
        sp.add_argument("--out", "-o")

    sp = sub.add_parser("invert", help="build an inverse structure")
    sp.add_argument("input")
    sp.add_argument("--mode", choices=INVERT_MODES, default="forward")
    sp.add_argument("--format", choices=("json", "dot"), default="json")
    sp.add_argument("--include-observed", action="store_true")
    nami_flags(sp)
    sp.set_defaults(func=cmd_invert)

    sp = sub.add_parser("trace", help="print the NaMI elimination trace")
    sp.add_argument("input")
    sp.add_argument("--mode", choices=("forward", "reverse"), default="forward")
    nami_flags(sp)
    sp.set_defaults(func=cmd_trace)

    sp = sub.add_parser("verify", help="certify I-map, minimality and naturalness")
    sp.add_argument("model")
    sp.add_argument("inverse")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--emit-independencies", metavar="PATH")
    sp.add_argument("--cap", type=int, default=None)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("kl", help="exact expected posterior KL of the fitted inverse")
    sp.add_argument("model")
    sp.add_argument("inverse")
    sp.set_defaults(func=cmd_kl)

    sp = sub.add_parser("masks", help="generate masking matrices")
    sp.add_argument("--kind", choices=("made", "tree", "subset"), default="made")
    sp.add_argument("--latents", type=int, default=3)
    sp.add_argument("--observed", type=int, default=1)
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--inverse")
    sp.add_argument("--hidden", default="64,64")
    sp.add_argument("--uniform", action="store_true", help="disable ensure-coverage")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--npz")
    sp.add_argument("--out", "-o")
    sp.set_defaults(func=cmd_masks)

    sp = sub.add_parser("bench", help="time NaMI on a graph family, CSV out")
    sp.add_argument("--family", choices=FAMILIES, default="chain")
    sp.add_argument("--sizes", default="100,1000,10000")
    sp.add_argument("--mode", choices=("forward", "reverse"), default="forward")
    sp.add_argument("--repeats", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", "-o")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except SupportError as exc:
        sys.stderr.write(f"support error: {exc}\n")
        return EXIT_SEMANTIC
    except NamiError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())
