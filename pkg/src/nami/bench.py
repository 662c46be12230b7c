"""Timing of NaMI inversion across graph families."""

from __future__ import annotations

import csv
import gc
import io
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import models
from .graph import BayesNet
from .inversion import nami_invert

FAMILIES = ("chain", "tree", "random")


@dataclass(frozen=True)
class BenchConfig:
    family: str = "chain"
    sizes: tuple[int, ...] = (100, 1000, 10000)
    mode: str = "forward"
    repeats: int = 3
    seed: int = 0


@dataclass(frozen=True)
class BenchRow:
    n: int
    c: int
    edges: int
    seconds: float


def family_graph(family: str, size: int, seed: int = 0) -> BayesNet:
    """``size`` is the node count, except for trees where it is the depth."""
    if family == "chain":
        return models.chain(size)
    if family == "tree":
        return models.binary_tree(size)
    if family == "random":
        rng = np.random.default_rng([seed, size])
        return models.random_dag(rng, size, edge_prob=min(1.0, 2.0 / max(size, 1)),
                                 max_parents=3)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def run_bench(cfg: BenchConfig) -> list[BenchRow]:
    rows = []
    for size in cfg.sizes:
        g = family_graph(cfg.family, size, cfg.seed)
        best, h = float("inf"), None
        for _ in range(max(cfg.repeats, 1)):
            # as in timeit, keep the cyclic collector out of the timed region
            enabled = gc.isenabled()
            gc.disable()
            try:
                t0 = time.perf_counter()
                h = nami_invert(g, cfg.mode)
                best = min(best, time.perf_counter() - t0)
            finally:
                if enabled:
                    gc.enable()
        c = max((len(s.parents) + 1 for s in h.steps), default=0)
        rows.append(BenchRow(g.n, c, h.graph.edge_count(), best))
    return rows


def rows_to_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "c", "edges", "seconds"])
    for r in rows:
        w.writerow([r.n, r.c, r.edges, f"{r.seconds:.6f}"])
    return buf.getvalue()
