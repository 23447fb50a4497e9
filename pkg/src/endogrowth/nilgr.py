"""Closed-form growth rates for nilpotent families.

For a valid endomorphism of a torsion-free nilpotent family the growth rate
equals the spectral radius of the induced matrix on the free abelianization;
the induced block on the designated central generators gives the cross-check
max(sp(block_1), sp(block_2)^(1/2)), which the abelianization block always
attains.  User-supplied block lists for deeper nilpotency classes are
evaluated by the same max-of-root-powers formula without verifying group
provenance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import CertificationError, InconsistencyError, ValidationError
from .exactlin import IntMatrix, SpectralResult, spectral_radius
from .families import HeisenbergMachine, Nil2Machine
from .words import Endomorphism, check_homomorphism, evaluate, word_str

__all__ = [
    "NilReport",
    "BlocksReport",
    "abelianization_matrix",
    "induced_center_matrix",
    "gr_nilpotent_closed",
    "gr_from_blocks",
]


def abelianization_matrix(machine, endo: Endomorphism, validate: bool = True) -> Optional[IntMatrix]:
    """Exponent-sum matrix on the free abelianization; column i is the image of
    generator i.  Returns None when the machine declares no free part."""
    idxs = getattr(machine, "free_ab_indices", None)
    if not idxs:
        return None
    if validate:
        verdict = check_homomorphism(machine, endo)
        if not verdict.valid:
            raise ValidationError(
                f"endomorphism violates relator {word_str(verdict.violated_relator, machine.gens)!r}"
            )
    pos = {g: r for r, g in enumerate(idxs)}
    n = len(idxs)
    cols = []
    for i in idxs:
        vec = [0] * n
        for g, e in endo.images[i].letters:
            if g in pos:
                vec[pos[g]] += e
        cols.append(vec)
    return IntMatrix.from_rows([[cols[j][i] for j in range(n)] for i in range(n)])


def induced_center_matrix(machine, endo: Endomorphism, validate: bool = True) -> IntMatrix:
    """Matrix of the induced map on the designated central generators.

    Computed from exact group arithmetic (central parts of commutators of the
    generator images), so relation-dependent central generators are folded in
    automatically.  For the Heisenberg lattice this is the 1x1 determinant
    block carried by the central generator.
    """
    if validate:
        verdict = check_homomorphism(machine, endo)
        if not verdict.valid:
            raise InconsistencyError(
                f"endomorphism violates relator {word_str(verdict.violated_relator, machine.gens)!r}"
            )
    if isinstance(machine, HeisenbergMachine):
        if machine.include_center_gen:
            m, n, l = evaluate(machine, endo.images[2])
            if (m, n) != (0, 0):
                raise InconsistencyError("central generator image must stay central")
            return IntMatrix.from_rows([[l]])
        img1 = evaluate(machine, endo.images[0])
        img2 = evaluate(machine, endo.images[1])
        # center is generated by [a2, a1] when k = 1
        comm = machine.commutator(img2, img1)
        return IntMatrix.from_rows([[comm[2]]])
    if isinstance(machine, Nil2Machine):
        images = [evaluate(machine, w) for w in endo.images]
        cols = []
        for _, (i, j) in machine.designated:
            c = machine.commutator(images[i - 1], images[j - 1])
            if any(v != 0 for v in c[0]):
                raise InconsistencyError("image commutator left the center")
            cols.append(c[1])
        m = len(machine.central)
        return IntMatrix.from_rows([[cols[j][i] for j in range(m)] for i in range(m)])
    raise ValidationError(f"no central block defined for family {machine.family!r}")


@dataclass(frozen=True)
class NilReport:
    ab_matrix: IntMatrix
    center_matrix: Optional[IntMatrix]
    sp_ab: SpectralResult
    sp_center: Optional[SpectralResult]
    value: float
    cross_check: float

    def certificate(self) -> dict:
        cert = {
            "ab_matrix": [list(r) for r in self.ab_matrix.entries],
            "char_poly_ab": str(self.sp_ab.char_poly),
            "sp_ab": self.sp_ab.value,
            "cross_check": self.cross_check,
        }
        if self.center_matrix is not None:
            cert["center_matrix"] = [list(r) for r in self.center_matrix.entries]
            cert["char_poly_center"] = str(self.sp_center.char_poly)
            cert["sp_center"] = self.sp_center.value
        return cert


_NIL_FAMILIES = ("free_abelian", "heisenberg", "nilpotent2")


def gr_nilpotent_closed(machine, endo: Endomorphism, tol: float = 1e-9) -> NilReport:
    """Growth rate of a valid endomorphism of a torsion-free nilpotent family.

    The value is sp of the abelianization block.  Where a central block is
    available its square root is certified not to exceed the value (within
    tol), and the max-of-blocks cross-check is reported.
    """
    if machine.family not in _NIL_FAMILIES:
        raise ValidationError(
            f"closed nilpotent form needs a torsion-free nilpotent family, not {machine.family!r}"
        )
    verdict = check_homomorphism(machine, endo)
    if not verdict.valid:
        raise ValidationError(
            f"endomorphism violates relator {word_str(verdict.violated_relator, machine.gens)!r}"
        )
    ab = abelianization_matrix(machine, endo, validate=False)
    sp_ab = spectral_radius(ab, tol)
    center = None
    sp_center = None
    cross = sp_ab.value
    if machine.family in ("heisenberg", "nilpotent2"):
        center = induced_center_matrix(machine, endo, validate=False)
        sp_center = spectral_radius(center, tol)
        root = sp_center.value ** 0.5
        if root > sp_ab.value + tol:
            raise CertificationError(
                "central block spectral radius exceeds the square of the abelianization block"
            )
        cross = max(cross, root)
    return NilReport(ab, center, sp_ab, sp_center, sp_ab.value, cross)


@dataclass(frozen=True)
class BlocksReport:
    value: float
    argmax_weight: int
    per_block: tuple[tuple[int, SpectralResult], ...]

    def certificate(self) -> dict:
        return {
            "argmax_weight": self.argmax_weight,
            "blocks": [
                {"weight": w, "sp": r.value, "char_poly": str(r.char_poly)}
                for w, r in self.per_block
            ],
        }


def gr_from_blocks(blocks, tol: float = 1e-9) -> BlocksReport:
    """max over blocks of sp(block)^(1/weight) for user-supplied diagonal blocks.

    Weights must be strictly increasing starting at 1.  No attempt is made to
    verify the blocks arose from an actual group filtration.
    """
    items = [(int(w), m) for w, m in blocks]
    if not items:
        raise ValidationError("block list must be nonempty")
    if items[0][0] != 1 or any(b[0] >= a[0] for b, a in zip(items, items[1:])):
        raise ValidationError("weights must be strictly increasing from 1")
    per_block = []
    best = -1.0
    best_weight = items[0][0]
    for weight, matrix in items:
        res = spectral_radius(matrix, tol)
        per_block.append((weight, res))
        val = res.value ** (1.0 / weight)
        if val > best:
            best, best_weight = val, weight
    return BlocksReport(best, best_weight, tuple(per_block))
