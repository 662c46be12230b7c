"""Edge counts of the inverse constructions on binary trees of increasing depth."""

from __future__ import annotations

import argparse

from nami import models
from nami.inversion import edge_count, fully_connected_inverse, nami_invert


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depths", default="2,3,4,5,6")
    depths = [int(d) for d in ap.parse_args().depths.split(",")]
    print("depth,nodes,reverse,forward,reverse_literal,forward_literal,fully_connected")
    for d in depths:
        g = models.binary_tree(d)
        cols = [
            nami_invert(g, "reverse"),
            nami_invert(g, "forward"),
            nami_invert(g, "reverse", prune_barren=False),
            nami_invert(g, "forward", prune_barren=False),
            fully_connected_inverse(g),
        ]
        print(",".join(str(x) for x in [d, g.n, *(edge_count(h) for h in cols)]))


if __name__ == "__main__":
    main()
