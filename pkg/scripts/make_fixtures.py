"""Write the structural JSON fixtures and the golden student trace to tests/fixtures."""

from __future__ import annotations

import argparse
from pathlib import Path

from nami import io, models
from nami.inversion import nami_invert

FIXTURES = {
    "student.json": models.student,
    "branching.json": models.branching,
    "branching_deep.json": models.branching_deep,
    "triangle.json": models.triangle,
    "binary_tree_d3.json": lambda: models.binary_tree(3),
    "gmm5.json": lambda: models.gmm(5),
    "chain3.json": lambda: models.chain(3),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dest", default=Path(__file__).resolve().parents[1] / "tests" / "fixtures")
    dest = Path(ap.parse_args().dest)
    dest.mkdir(parents=True, exist_ok=True)
    for name, build in FIXTURES.items():
        io.dump_json(io.bn_to_json(build()), dest / name)
    student = models.student()
    (dest / "student_forward_trace.txt").write_text(
        io.format_trace(student, nami_invert(student)), encoding="utf-8")
    print(f"wrote {len(FIXTURES) + 1} files to {dest}")


if __name__ == "__main__":
    main()
