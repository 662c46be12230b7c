"""Time NaMI on a graph family and print per-10x growth."""

from __future__ import annotations

import argparse

from nami.bench import FAMILIES, BenchConfig, rows_to_csv, run_bench


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", choices=FAMILIES, default="chain")
    ap.add_argument("--sizes", default="100,1000,10000")
    ap.add_argument("--mode", choices=("forward", "reverse"), default="forward")
    ap.add_argument("--repeats", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cfg = BenchConfig(args.family, tuple(int(s) for s in args.sizes.split(",")), args.mode,
                      args.repeats, args.seed)
    rows = run_bench(cfg)
    print(rows_to_csv(rows), end="")
    for a, b in zip(rows, rows[1:]):
        print(f"# n {a.n} -> {b.n}: time x{b.seconds / a.seconds:.1f}")


if __name__ == "__main__":
    main()
