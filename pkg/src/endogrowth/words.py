"""Words over generator alphabets, endomorphisms, and homomorphism checks.

A word is a sequence of (generator index, nonzero exponent) letters.  The
text form is whitespace-separated tokens ``name`` or ``name^INT`` with INT a
nonzero integer (negative allowed), e.g. ``a1^-2 a2 a1``.

Machines (see :mod:`endogrowth.families`) supply exact group arithmetic;
everything here is machine-agnostic.  All values are immutable and all
operations pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import UnknownGeneratorError, ValidationError

__all__ = [
    "GenSet",
    "Word",
    "Endomorphism",
    "parse_word",
    "word_str",
    "reduce_word",
    "evaluate",
    "elem_pow",
    "endo_power_image",
    "check_homomorphism",
    "eventually_trivial",
    "image_elements",
    "apply_on_element",
    "HomVerdict",
    "TrivialityResult",
]


@dataclass(frozen=True)
class GenSet:
    """Ordered generator names; unique, nonempty, no whitespace or '^'."""

    names: tuple[str, ...]

    def __post_init__(self):
        if not self.names:
            raise ValidationError("generator set must be nonempty")
        seen = set()
        for name in self.names:
            if not name or any(c.isspace() for c in name) or "^" in name:
                raise ValidationError(f"bad generator name {name!r}")
            if name in seen:
                raise ValidationError(f"duplicate generator name {name!r}")
            seen.add(name)

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownGeneratorError(f"unknown generator {name!r}") from None


@dataclass(frozen=True)
class Word:
    """Letters (generator index, exponent != 0); not necessarily reduced."""

    letters: tuple[tuple[int, int], ...] = ()

    def __len__(self):
        return sum(abs(e) for _, e in self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def __pow__(self, n: int) -> "Word":
        if n == 0:
            return Word()
        base = self if n > 0 else self.inverse()
        return Word(base.letters * abs(n))

    def is_empty(self) -> bool:
        return not self.letters


def reduce_word(w: Word) -> Word:
    """Free reduction: merge adjacent letters on the same generator, drop zeros."""
    out: list[tuple[int, int]] = []
    for g, e in w.letters:
        if e == 0:
            continue
        if out and out[-1][0] == g:
            merged = out[-1][1] + e
            out.pop()
            if merged != 0:
                out.append((g, merged))
        else:
            out.append((g, e))
    return Word(tuple(out))


def commutator_word(u: Word, v: Word) -> Word:
    return reduce_word(u.inverse() * v.inverse() * u * v)


def parse_word(text: str, gens: GenSet) -> Word:
    """Parse the ``name`` / ``name^INT`` token grammar."""
    letters = []
    for token in text.split():
        name, sep, exp = token.partition("^")
        if sep:
            try:
                e = int(exp)
            except ValueError:
                raise ValidationError(f"bad exponent in token {token!r}") from None
            if e == 0:
                raise ValidationError(f"zero exponent in token {token!r}")
        else:
            e = 1
        letters.append((gens.index(name), e))
    return reduce_word(Word(tuple(letters)))


def word_str(w: Word, gens: GenSet) -> str:
    return " ".join(
        gens.names[g] if e == 1 else f"{gens.names[g]}^{e}" for g, e in w.letters
    )


@dataclass(frozen=True)
class Endomorphism:
    """Map of each generator to a word over the same generators."""

    domain: GenSet
    images: tuple[Word, ...]

    def __post_init__(self):
        if len(self.images) != len(self.domain):
            raise ValidationError("one image word per generator required")
        n = len(self.domain)
        for w in self.images:
            for g, _ in w.letters:
                if not 0 <= g < n:
                    raise UnknownGeneratorError(f"image uses generator index {g}")

    @staticmethod
    def identity(gens: GenSet) -> "Endomorphism":
        return Endomorphism(gens, tuple(Word(((i, 1),)) for i in range(len(gens))))

    @staticmethod
    def from_strings(gens: GenSet, images: dict[str, str]) -> "Endomorphism":
        missing = set(gens.names) - set(images)
        if missing:
            raise ValidationError(f"missing images for {sorted(missing)}")
        extra = set(images) - set(gens.names)
        if extra:
            raise ValidationError(f"images for unknown generators {sorted(extra)}")
        return Endomorphism(gens, tuple(parse_word(images[n], gens) for n in gens.names))

    def image_of_word(self, w: Word) -> Word:
        out = Word()
        for g, e in w.letters:
            out = out * (self.images[g] ** e)
        return reduce_word(out)

    def compose(self, inner: "Endomorphism") -> "Endomorphism":
        """self after inner: (self.compose(inner))(g) = self(inner(g))."""
        if self.domain != inner.domain:
            raise ValidationError("composition needs a common generator set")
        return Endomorphism(self.domain, tuple(self.image_of_word(w) for w in inner.images))

    def __pow__(self, k: int) -> "Endomorphism":
        if k < 0:
            raise ValueError("negative endomorphism power")
        acc = Endomorphism.identity(self.domain)
        for _ in range(k):
            acc = self.compose(acc)
        return acc


def elem_pow(machine, x, n: int):
    """x**n in the machine by binary powering; n may be any integer."""
    if n < 0:
        x = machine.inv(x)
        n = -n
    acc = machine.identity
    while n:
        if n & 1:
            acc = machine.mul(acc, x)
        x = machine.mul(x, x)
        n >>= 1
    return acc


def evaluate(machine, w: Word):
    """Normal form of the product the word spells, exact."""
    n = len(machine.gens)
    acc = machine.identity
    for g, e in w.letters:
        if not 0 <= g < n:
            raise UnknownGeneratorError(f"generator index {g} out of range")
        acc = machine.mul(acc, elem_pow(machine, machine.gen_elem(g), e))
    return acc


def image_elements(machine, endo: Endomorphism) -> tuple:
    """Evaluate each generator image once; basis for fast iteration."""
    return tuple(evaluate(machine, w) for w in endo.images)


def apply_on_element(machine, images: tuple, x):
    """Image of an element under the endomorphism with the given generator images.

    Uses the machine's canonical decomposition, so exponents may be huge
    without any word blowup.
    """
    acc = machine.identity
    for g, e in machine.decompose(x).letters:
        acc = machine.mul(acc, elem_pow(machine, images[g], e))
    return acc


def endo_power_image(endo: Endomorphism, gen: str, k: int) -> Word:
    """phi^k(g) as a reduced word (substitution k times, reduced each round).

    Word lengths can grow geometrically in k for expanding endomorphisms;
    for large k prefer element-level iteration via ``apply_on_element``.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    w = Word(((endo.domain.index(gen), 1),))
    for _ in range(k):
        w = endo.image_of_word(w)
    return reduce_word(w)


@dataclass(frozen=True)
class HomVerdict:
    valid: bool
    violated_relator: Optional[Word] = None
    witness: object = None

    def __bool__(self):
        return self.valid


def check_homomorphism(machine, endo: Endomorphism) -> HomVerdict:
    """Valid iff every relator of the machine maps to the identity."""
    images = image_elements(machine, endo)
    for rel in machine.relators():
        acc = machine.identity
        for g, e in rel.letters:
            acc = machine.mul(acc, elem_pow(machine, images[g], e))
        if acc != machine.identity:
            return HomVerdict(False, rel, acc)
    return HomVerdict(True)


@dataclass(frozen=True)
class TrivialityResult:
    status: str  # "yes" | "no" | "unknown"
    power: Optional[int] = None
    reason: str = ""


def eventually_trivial(machine, endo: Endomorphism, bound: int = 64) -> TrivialityResult:
    """Does some power of the endomorphism send every generator to the identity?

    Exact shortcut first: if the induced matrix on the free abelianization is
    not nilpotent, no power can be trivial.  Otherwise iterate generator
    images as exact elements up to ``bound`` compositions, detecting cycles.
    """
    from .nilgr import abelianization_matrix  # local import avoids a cycle
    from .exactlin import char_poly

    ab = abelianization_matrix(machine, endo)
    if ab is not None:
        p = char_poly(ab)
        nilpotent = all(c == 0 for c in p.coeffs[:-1])
        if not nilpotent:
            return TrivialityResult("no", None, "free abelianization matrix is not nilpotent")

    images = image_elements(machine, endo)
    state = images
    seen = {state}
    for n in range(1, bound + 1):
        if all(x == machine.identity for x in state):
            return TrivialityResult("yes", n, f"all generator images trivial at power {n}")
        state = tuple(apply_on_element(machine, images, x) for x in state)
        if state in seen:
            return TrivialityResult("no", None, "image state cycles without dying")
        seen.add(state)
    return TrivialityResult("unknown", None, f"no verdict within {bound} compositions")
