#!/usr/bin/env python3
"""Cross-validate closed forms against empirical estimates on every bundled example.

Prints one row per example: closed-form growth rate, empirical estimate,
algebraic entropy, and the consistency verdict.
"""

import importlib.resources as resources
import json
import math

from endogrowth.reports import build_report

EXAMPLES = [
    ("counter", 32, 2),
    ("bs", 12, 9),
    ("heis_ex1", 25, 10),
    ("nil2_ex3", 12, 6),
    ("klein", 20, 10),
    ("sol_ex1", 40, 8),
    ("sol_ex2", 16, 8),
    ("sol_ex3", 20, 8),
]


def load(name):
    ref = resources.files("endogrowth") / "fixtures" / name
    return json.loads(ref.read_text())


def main():
    header = f"{'example':<10} {'closed':>12} {'estimate':>12} {'entropy':>10} verdict"
    print(header)
    print("-" * len(header))
    for stem, kmax, radius in EXAMPLES:
        report = build_report(
            "compare",
            load(f"{stem}.group"),
            load(f"{stem}.endo"),
            kmax=kmax,
            radius=radius,
        )
        closed = report["closed"]["value"] if report["closed"] else None
        estimate = report["empirical"]["estimate"]
        entropy = math.log(estimate) if estimate > 0 else float("-inf")
        closed_text = f"{closed:.8f}" if closed is not None else "(none)"
        print(
            f"{stem:<10} {closed_text:>12} {estimate:>12.8f} {entropy:>10.6f} "
            f"{report['verdict'] or 'n/a'}"
        )


if __name__ == "__main__":
    main()
