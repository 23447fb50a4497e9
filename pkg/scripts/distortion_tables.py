#!/usr/bin/env python3
"""Distortion profiles of the three standard subgroup embeddings, as CSV.

- the axis <e1> inside Z^2 (undistorted: delta(n) = n),
- the center <a3> inside the Heisenberg lattice (quadratic distortion),
- the fiber <b> inside the Baumslag-Solitar group B(1,2) (exponential).
"""

import argparse

from endogrowth.ball import cyclic_distortion
from endogrowth.families import BSMachine, FreeAbelianMachine, HeisenbergMachine


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--radius-flat", type=int, default=12)
    parser.add_argument("--radius-heis", type=int, default=20)
    parser.add_argument("--radius-bs", type=int, default=9)
    args = parser.parse_args()

    cases = [
        ("Z^2, subgroup <e1>", FreeAbelianMachine(2), "e1", args.radius_flat),
        ("Heisenberg lattice, subgroup <a3>", HeisenbergMachine(1), "a3", args.radius_heis),
        ("B(1,2), subgroup <b>", BSMachine(2), "b", args.radius_bs),
    ]
    for title, machine, gen, radius in cases:
        print(f"# {title}, radius {radius}")
        print(cyclic_distortion(machine, gen, radius).to_csv(), end="")
        print()


if __name__ == "__main__":
    main()
