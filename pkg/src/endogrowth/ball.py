"""Cayley balls by breadth-first search, iterate-length tables, growth estimation,
and subgroup distortion profiles.

BFS hashes normal forms, never words, so lengths are exact geodesic distances
and deduplication is automatic.  Construction is deterministic: generators are
expanded in a fixed order from a FIFO frontier.  Completed balls are immutable
and safe to share.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import ResourceCapExceeded, ValidationError
from .words import (
    Endomorphism,
    apply_on_element,
    check_homomorphism,
    image_elements,
    word_str,
)

__all__ = [
    "DEFAULT_CAP",
    "Ball",
    "GrowthEstimate",
    "GrowthSummary",
    "DistortionTable",
    "enumerate_ball",
    "word_length",
    "L_k_table",
    "gr_estimate",
    "distortion",
    "cyclic_distortion",
]

DEFAULT_CAP = 5_000_000


@dataclass(frozen=True)
class Ball:
    """All elements of word length <= radius with their exact lengths.

    ``counts[r]`` is the cumulative number of elements of length <= r.
    """

    radius: int
    dist: dict
    counts: tuple[int, ...]

    def __contains__(self, elem):
        return elem in self.dist

    def length(self, elem) -> Optional[int]:
        return self.dist.get(elem)

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out)
        w.writerow(["n", "count", "delta", "witness"])
        for n, c in enumerate(self.counts):
            w.writerow([n, c, "", ""])
        return out.getvalue()


def _generator_steps(machine):
    steps = []
    for i in range(len(machine.gens)):
        g = machine.gen_elem(i)
        steps.append(g)
        steps.append(machine.inv(g))
    return steps


def enumerate_ball(machine, radius: int, cap: int = DEFAULT_CAP) -> Ball:
    """Exact geodesic lengths for every element within ``radius``.

    Raises ResourceCapExceeded carrying the ball completed through the last
    full radius when more than ``cap`` elements would be stored.
    """
    if radius < 0:
        raise ValidationError("radius must be nonnegative")
    steps = _generator_steps(machine)
    dist = {machine.identity: 0}
    counts = [1]
    frontier = [machine.identity]
    for r in range(1, radius + 1):
        nxt = []
        for x in frontier:
            for s in steps:
                y = machine.mul(x, s)
                if y not in dist:
                    if len(dist) >= cap:
                        partial = Ball(
                            r - 1,
                            {k: v for k, v in dist.items() if v <= r - 1},
                            tuple(counts),
                        )
                        raise ResourceCapExceeded(
                            f"ball exceeded cap {cap} while exploring radius {r}",
                            completed_radius=r - 1,
                            partial=partial,
                        )
                    dist[y] = r
                    nxt.append(y)
        counts.append(len(dist))
        frontier = nxt
        if not frontier:
            break
    while len(counts) <= radius:
        counts.append(counts[-1])
    return Ball(radius, dist, tuple(counts))


def word_length(machine, elem, radius: int, cap: int = DEFAULT_CAP) -> Optional[int]:
    """Exact geodesic length of ``elem``, or None if it lies beyond ``radius``."""
    if elem == machine.identity:
        return 0
    steps = _generator_steps(machine)
    dist = {machine.identity: 0}
    frontier = [machine.identity]
    for r in range(1, radius + 1):
        nxt = []
        for x in frontier:
            for s in steps:
                y = machine.mul(x, s)
                if y not in dist:
                    if y == elem:
                        return r
                    if len(dist) >= cap:
                        raise ResourceCapExceeded(
                            f"search exceeded cap {cap} at radius {r}",
                            completed_radius=r - 1,
                        )
                    dist[y] = r
                    nxt.append(y)
        frontier = nxt
        if not frontier:
            break
    return None


@dataclass(frozen=True)
class GrowthEstimate:
    """Table k -> max generator-image length, with per-entry provenance.

    ``exact`` entries came from BFS geodesics (certified); the rest are
    honest word-construction upper bounds from the family length functional.
    """

    gen_names: tuple[str, ...]
    ks: tuple[int, ...]
    per_gen: dict
    per_gen_exact: dict
    lengths: tuple[int, ...]
    exact: tuple[bool, ...]
    method: str

    def roots(self) -> list[float]:
        return [l ** (1.0 / k) if l > 0 else 0.0 for k, l in zip(self.ks, self.lengths)]

    def running_inf(self) -> list[float]:
        out = []
        cur = float("inf")
        for r in self.roots():
            cur = min(cur, r)
            out.append(cur)
        return out


@dataclass(frozen=True)
class GrowthSummary:
    running_inf: tuple[float, ...]
    final_inf: float
    trend: Optional[float]
    estimate: float
    certified_upper: bool
    per_gen: dict
    direction: str  # "decreasing" | "flat"


def gr_estimate(table: GrowthEstimate) -> GrowthSummary:
    """Summary of a length table: running infimum of k-th roots, a two-step
    ratio trend estimate, and the headline growth-rate estimate.

    With exact entries the running infimum is a certified upper bound for the
    growth rate at every k.  The trend sqrt(L_k / L_(k-2)) converges for
    geometric-times-polynomial length growth and corrects the slow k-th-root
    convergence of linear tables; the headline estimate is the smaller of the
    two.  Upper-bound entries make both heuristic, which reports must flag.
    """
    if not table.ks:
        raise ValidationError("empty growth table")
    runinf = table.running_inf()
    final_inf = runinf[-1]
    if any(l == 0 for l in table.lengths):
        # some power sends every generator to the identity: growth rate 0
        return GrowthSummary(
            tuple(runinf), final_inf, None, 0.0, all(table.exact), {}, "decreasing"
        )
    trend = None
    if len(table.ks) >= 3:
        l_now, l_back = table.lengths[-1], table.lengths[-3]
        if l_back > 0:
            trend = (l_now / l_back) ** 0.5
    estimate = final_inf if trend is None else min(final_inf, trend)
    per_gen = {}
    for name in table.gen_names:
        seq = table.per_gen[name]
        root = seq[-1] ** (1.0 / table.ks[-1]) if seq[-1] > 0 else 0.0
        gtrend = None
        if len(seq) >= 3 and seq[-3] > 0:
            gtrend = (seq[-1] / seq[-3]) ** 0.5
        per_gen[name] = {"root": root, "trend": gtrend}
    mid = runinf[len(runinf) // 2]
    direction = "decreasing" if final_inf < mid - 1e-12 else "flat"
    return GrowthSummary(
        tuple(runinf), final_inf, trend, estimate, all(table.exact), per_gen, direction
    )


def L_k_table(
    machine,
    endo: Endomorphism,
    kmax: int = 16,
    radius: int = 10,
    cap: int = DEFAULT_CAP,
) -> GrowthEstimate:
    """Iterate-length table L_k = max_i length(phi^k(s_i)) for k = 1..kmax.

    Lengths are exact BFS geodesics whenever the image lies in the radius-R
    ball, otherwise the family length functional's upper bound, flagged per
    entry.  An L_k entry is exact when its maximal value is a geodesic that
    dominates every upper-bound entry of the same row.
    """
    verdict = check_homomorphism(machine, endo)
    if not verdict.valid:
        raise ValidationError(
            f"endomorphism violates relator {word_str(verdict.violated_relator, machine.gens)!r}"
        )
    if kmax < 1:
        raise ValidationError("kmax must be >= 1")
    ball = enumerate_ball(machine, radius, cap)
    images = image_elements(machine, endo)
    names = machine.gens.names
    per_gen = {n: [] for n in names}
    per_gen_exact = {n: [] for n in names}
    lengths = []
    exact_flags = []
    current = list(images)
    for _ in range(1, kmax + 1):
        row = []
        for name, x in zip(names, current):
            found = ball.length(x)
            if found is not None:
                val, is_exact = found, True
            else:
                val, is_exact = machine.length_upper(x), False
            per_gen[name].append(val)
            per_gen_exact[name].append(is_exact)
            row.append((val, is_exact))
        l_k = max(v for v, _ in row)
        # exact iff a geodesic entry attains the max: upper-bound entries
        # below it cannot raise the true maximum
        row_exact = any(e and v == l_k for v, e in row)
        lengths.append(l_k)
        exact_flags.append(row_exact)
        current = [apply_on_element(machine, images, x) for x in current]
    return GrowthEstimate(
        names,
        tuple(range(1, kmax + 1)),
        per_gen,
        per_gen_exact,
        tuple(lengths),
        tuple(exact_flags),
        "bfs+length_functional",
    )


@dataclass(frozen=True)
class DistortionTable:
    """n -> max inner length over subgroup elements of ambient length <= n."""

    ns: tuple[int, ...]
    delta: tuple[int, ...]
    witnesses: tuple[str, ...]  # canonical word of an attaining element

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out)
        w.writerow(["n", "count", "delta", "witness"])
        for n, d, wit in zip(self.ns, self.delta, self.witnesses):
            w.writerow([n, "", d, wit])
        return out.getvalue()


def distortion(
    machine,
    membership: Callable,
    inner_length: Callable,
    radius: int,
    cap: int = DEFAULT_CAP,
) -> DistortionTable:
    """Distortion profile of a subgroup given an exact inner length function.

    Witnesses are tie-broken by lexicographically least canonical word.
    """
    ball = enumerate_ball(machine, radius, cap)
    per_radius = [[] for _ in range(radius + 1)]
    for elem, d in ball.dist.items():
        if membership(elem):
            per_radius[d].append(elem)
    ns, deltas, witnesses = [], [], []
    best = 0
    best_witness = ""
    for n in range(radius + 1):
        for elem in per_radius[n]:
            val = inner_length(elem)
            key = word_str(machine.decompose(elem), machine.gens)
            if val > best:
                best, best_witness = val, key
            elif val == best and key < best_witness:
                best_witness = key
        ns.append(n)
        deltas.append(best)
        witnesses.append(best_witness)
    return DistortionTable(tuple(ns), tuple(deltas), tuple(witnesses))


def cyclic_distortion(machine, gen_name: str, radius: int, cap: int = DEFAULT_CAP) -> DistortionTable:
    """Distortion of the cyclic subgroup generated by one generator."""
    idx = machine.gens.index(gen_name)

    def membership(elem):
        return machine.cyclic_inner_length(idx, elem) is not None

    def inner(elem):
        return machine.cyclic_inner_length(idx, elem)

    return distortion(machine, membership, inner, radius, cap)
