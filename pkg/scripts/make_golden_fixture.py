"""Search Dirichlet CPDs on the branching model until the heuristic inverse's KL exceeds a bar.

The first draw (in seed order) that clears ``--min-kl`` is frozen as JSON so
tests can check it without repeating the search.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from nami import io, models
from nami.discrete import expected_posterior_kl, fit_inverse_exact, random_cpds
from nami.inversion import nami_invert, stuhlmuller_invert

BUILDERS = {"branching": models.branching, "branching_deep": models.branching_deep}


def search(model: str, min_kl: float, seed: int, max_tries: int, max_card: int, alpha: float):
    g = BUILDERS[model]()
    heuristic = stuhlmuller_invert(g)
    rng = np.random.default_rng(seed)
    for attempt in range(max_tries):
        bn = random_cpds(rng, g, max_card=max_card, alpha=alpha)
        kl = expected_posterior_kl(bn, fit_inverse_exact(bn, heuristic))
        if kl > min_kl:
            nami_kl = expected_posterior_kl(bn, fit_inverse_exact(bn, nami_invert(g)))
            return bn, kl, nami_kl, attempt
    raise SystemExit(f"no CPDs with KL > {min_kl} after {max_tries} draws")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--model", choices=sorted(BUILDERS), default="branching")
    ap.add_argument("--min-kl", type=float, default=1e-2)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-tries", type=int, default=1000)
    ap.add_argument("--max-card", type=int, default=2)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--out")
    args = ap.parse_args()
    bn, kl, nami_kl, attempt = search(args.model, args.min_kl, args.seed, args.max_tries,
                                      args.max_card, args.alpha)
    out = Path(args.out) if args.out else (
        Path(__file__).resolve().parents[1] / "tests" / "fixtures" / f"{args.model}_golden.json")
    io.dump_json(io.discrete_to_json(bn), out)
    print(f"draw {attempt}: heuristic KL={kl:.6g} nami KL={nami_kl:.3g} -> {out}")


if __name__ == "__main__":
    main()
