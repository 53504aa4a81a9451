#!/usr/bin/env python3
"""Regenerate the bundled triangulation corpus in src/torsion4/data/."""
from pathlib import Path

from torsion4.builders import boundary_4_simplex, two_tets_sphere
from torsion4.io import write_triangulation

DATA = Path(__file__).resolve().parent.parent / "src" / "torsion4" / "data"


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    write_triangulation(two_tets_sphere(), DATA / "s3_two_tets.json")
    write_triangulation(boundary_4_simplex(),
                        DATA / "s3_boundary_4simplex.json")
    for p in sorted(DATA.glob("*.json")):
        print(p)


if __name__ == "__main__":
    main()
