"""Exact integer matrices, characteristic polynomials, and certified spectral radii.

Everything here is arbitrary precision: matrix products and powers never
overflow, characteristic polynomials are computed exactly over the integers,
and spectral radii come with a rigorous absolute error bound derived from the
exact polynomial (no silent reliance on floating-point eigensolvers).

All values are immutable after construction and all operations are pure, so
concurrent use from any number of threads is safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath

from .errors import CertificationError, DimensionError

__all__ = [
    "IntMatrix",
    "IntPolynomial",
    "SpectralResult",
    "char_poly",
    "det",
    "spectral_radius",
    "exterior_square",
    "kronecker",
    "mat_pow",
    "col_abs_sum",
    "mat_vec",
    "inverse_unimodular_2x2",
]


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix, row-major, arbitrary precision entries."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.entries or not self.entries[0]:
            raise DimensionError("matrix must have at least one row and column")
        width = len(self.entries[0])
        for row in self.entries:
            if len(row) != width:
                raise DimensionError("ragged rows")

    @staticmethod
    def from_rows(rows) -> "IntMatrix":
        return IntMatrix(tuple(tuple(int(x) for x in row) for row in rows))

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @staticmethod
    def zeros(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix(tuple((0,) * cols for _ in range(rows)))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.entries)))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("shape mismatch in addition")
        return IntMatrix(
            tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries))
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(tuple(tuple(-a for a in row) for row in self.entries))

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(c * a for a in row) for row in self.entries))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionError("inner dimensions do not match")
        cols = other.transpose().entries
        return IntMatrix(
            tuple(
                tuple(sum(a * b for a, b in zip(row, col)) for col in cols)
                for row in self.entries
            )
        )

    def __pow__(self, n: int) -> "IntMatrix":
        return mat_pow(self, n)

    def is_zero(self) -> bool:
        return all(a == 0 for row in self.entries for a in row)

    def trace(self) -> int:
        if not self.is_square:
            raise DimensionError("trace of non-square matrix")
        return sum(self.entries[i][i] for i in range(self.rows))


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients in ascending degree order.

    The leading coefficient is nonzero unless this is the zero polynomial.
    """

    coeffs: tuple[int, ...]

    @staticmethod
    def from_coeffs(coeffs) -> "IntPolynomial":
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return IntPolynomial(tuple(cs) if cs else (0,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.coeffs == (0,)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_matrix(self, m: IntMatrix) -> IntMatrix:
        """Horner evaluation at a square matrix, exact."""
        if not m.is_square:
            raise DimensionError("polynomial evaluation needs a square matrix")
        n = m.rows
        acc = IntMatrix.zeros(n, n)
        for c in reversed(self.coeffs):
            acc = acc @ m + IntMatrix.identity(n).scale(c)
        return acc

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            if k == 0:
                term = str(abs(c))
            else:
                mon = "x" if k == 1 else f"x^{k}"
                term = mon if abs(c) == 1 else f"{abs(c)}*{mon}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, term))
        head_sign, head = parts[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, term in parts[1:]:
            out += f" {sign} {term}"
        return out


@dataclass(frozen=True)
class SpectralResult:
    """Certified spectral radius.

    ``value - abs_error <= true max root modulus <= value + abs_error``, and
    every entry of ``roots`` substituted into ``char_poly`` leaves a residual
    of modulus at most ``max_residual``.
    """

    value: float
    abs_error: float
    char_poly: IntPolynomial
    roots: tuple[complex, ...]
    max_residual: float


def _require_square(m: IntMatrix):
    if not m.is_square:
        raise DimensionError(f"square matrix required, got {m.rows}x{m.cols}")


def char_poly(m: IntMatrix) -> IntPolynomial:
    """Exact characteristic polynomial det(xI - M), monic.

    Faddeev-LeVerrier over the integers; the interior divisions are exact.
    """
    _require_square(m)
    n = m.rows
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    acc = IntMatrix.identity(n)
    for k in range(1, n + 1):
        acc = m @ acc
        tr = acc.trace()
        if tr % k != 0:
            raise CertificationError("Faddeev-LeVerrier division was not exact")
        c = -tr // k
        coeffs[n - k] = c
        acc = acc + IntMatrix.identity(n).scale(c)
    return IntPolynomial(tuple(coeffs))


def det(m: IntMatrix) -> int:
    """Exact determinant (from the characteristic polynomial's constant term)."""
    p = char_poly(m)
    n = m.rows
    return p.coeffs[0] if n % 2 == 0 else -p.coeffs[0]


def mat_pow(m: IntMatrix, n: int) -> IntMatrix:
    """Exact n-th power by repeated squaring, n >= 0."""
    _require_square(m)
    if n < 0:
        raise ValueError("negative matrix power; invert explicitly first")
    result = IntMatrix.identity(m.rows)
    base = m
    while n:
        if n & 1:
            result = result @ base
        base = base @ base
        n >>= 1
    return result


def col_abs_sum(m: IntMatrix, i: int) -> int:
    """Sum of absolute values of column i."""
    if not 0 <= i < m.cols:
        raise DimensionError(f"column {i} out of range for {m.rows}x{m.cols}")
    return sum(abs(row[i]) for row in m.entries)


def mat_vec(m: IntMatrix, v) -> tuple[int, ...]:
    if m.cols != len(v):
        raise DimensionError("vector length does not match matrix width")
    return tuple(sum(a * b for a, b in zip(row, v)) for row in m.entries)


def inverse_unimodular_2x2(m: IntMatrix) -> IntMatrix:
    """Exact inverse of a 2x2 integer matrix with determinant +-1."""
    if (m.rows, m.cols) != (2, 2):
        raise DimensionError("2x2 matrix required")
    (a, b), (c, d) = m.entries
    dt = a * d - b * c
    if dt not in (1, -1):
        raise ValueError(f"determinant {dt} is not a unit")
    return IntMatrix.from_rows([[d * dt, -b * dt], [-c * dt, a * dt]])


def exterior_square(m: IntMatrix) -> IntMatrix:
    """Second exterior power on the basis of pairs (i, j), i < j, lexicographic.

    Entry at row (p, q), column (i, j) is the 2x2 minor
    m[p][i]*m[q][j] - m[p][j]*m[q][i]; eigenvalues of the result are the
    pairwise products of eigenvalues of ``m``.
    """
    _require_square(m)
    n = m.rows
    if n < 2:
        raise DimensionError("exterior square needs size >= 2")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    e = m.entries
    return IntMatrix(
        tuple(
            tuple(e[p][i] * e[q][j] - e[p][j] * e[q][i] for (i, j) in pairs)
            for (p, q) in pairs
        )
    )


def kronecker(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    """Kronecker product; eigenvalues are pairwise products."""
    out = []
    for i in range(a.rows):
        for k in range(b.rows):
            out.append(
                tuple(
                    a.entries[i][j] * b.entries[k][l]
                    for j in range(a.cols)
                    for l in range(b.cols)
                )
            )
    return IntMatrix(tuple(out))


_PRECISION_LADDER = (60, 120, 240, 480, 960)


def _square_free_part(coeffs):
    """Monic radical of a monic integer polynomial (ascending coefficients).

    The radical p/gcd(p, p') of a monic integer polynomial is again monic with
    integer coefficients and has the same root set, all simple.
    """
    from fractions import Fraction

    def normalize(p):
        while p and p[-1] == 0:
            p.pop()
        return p

    def polymod(a, b):
        a = a[:]
        while len(a) >= len(b) and a:
            f = a[-1] / b[-1]
            off = len(a) - len(b)
            for i, c in enumerate(b):
                a[off + i] -= f * c
            a = normalize(a[:-1] + [a[-1]])
            a = normalize(a)
        return a

    p = [Fraction(c) for c in coeffs]
    dp = normalize([Fraction(k * c) for k, c in enumerate(coeffs)][1:])
    a, b = p[:], dp
    while b:
        a, b = b, polymod(a, b)
    g = [c / a[-1] for c in a]  # monic gcd
    # exact division p // g
    q = [Fraction(0)] * (len(p) - len(g) + 1)
    rem = p[:]
    for k in range(len(q) - 1, -1, -1):
        q[k] = rem[k + len(g) - 1] / g[-1]
        for i, c in enumerate(g):
            rem[k + i] -= q[k] * c
    out = []
    for c in q:
        if c.denominator != 1:
            raise CertificationError("square-free part was not integral")
        out.append(int(c))
    return out


def _certified_bounds(coeffs, zs, n):
    """Two-sided bound for the max root modulus from approximate roots.

    ``coeffs`` are the exact integer coefficients (ascending, monic degree n),
    ``zs`` the approximate roots at the current mpmath precision.  Returns
    (lower, upper, max_residual) as mpf, or None when the certificate fails
    at this precision.

    Lower bound: p monic means prod |z - root_i| = |p(z)|, so some true root
    lies within |p(z)|^(1/n) of z.  Upper bound: with q = prod (x - z_j) and
    r = p - q (degree < n), any root L of p has prod |L - z_j| = |r(L)|, so
    |L| > R0 + d forces d^n <= ||r||_1 * max(1,|L|)^(n-1); the smallest
    barrier d with g(d) < d caps all root moduli at R0 + d.
    """
    mp = mpmath.mp
    moduli = [abs(z) for z in zs]
    r0 = max(moduli)

    # residuals of the exact polynomial at the approximations
    residuals = [abs(mpmath.polyval([mpmath.mpf(c) for c in reversed(coeffs)], z)) for z in zs]
    max_res = max(residuals)
    lower = mpmath.mpf(0)
    for mod, res in zip(moduli, residuals):
        cand = mod - res ** (mpmath.mpf(1) / n)
        if cand > lower:
            lower = cand

    # q = prod (x - z_j) with an explicit pad for accumulated rounding
    qc = [mpmath.mpc(1)]
    for z in zs:
        nxt = [mpmath.mpc(0)] * (len(qc) + 1)
        for i, c in enumerate(qc):
            nxt[i + 1] += c
            nxt[i] -= c * z
        qc = nxt
    mag = mpmath.mpf(1)
    for z in zs:
        mag *= 1 + abs(z)
    pad = (n * n + 4) * mag * mpmath.mpf(2) ** (4 - mp.prec)
    r1 = pad
    for k in range(n):
        r1 += abs(qc[k] - coeffs[k])
    # qc[n] is exactly 1 up to construction; include its defect anyway
    r1 += abs(qc[n] - 1) * (r0 + 1) ** n

    cauchy = 1 + max(abs(mpmath.mpf(c)) for c in coeffs)
    delta = max(mpmath.mpf(1), cauchy - r0)

    def barrier(d):
        return (r1 * max(mpmath.mpf(1), r0 + d) ** (n - 1)) ** (mpmath.mpf(1) / n)

    if barrier(delta) >= delta:
        return None
    for _ in range(200):
        nxt = barrier(delta)
        if nxt >= delta:
            break
        delta = nxt
    upper = r0 + delta * (1 + mpmath.mpf(2) ** (8 - mp.prec))
    if lower < 0:
        lower = mpmath.mpf(0)
    return lower, upper, max_res


def spectral_radius(m: IntMatrix, tol: float = 1e-9) -> SpectralResult:
    """Max eigenvalue modulus, certified to absolute tolerance ``tol``.

    Deterministic for fixed input and tolerance.  Raises CertificationError
    rather than returning a loose answer when the precision ladder is
    exhausted without meeting ``tol``.
    """
    _require_square(m)
    if not tol > 0:
        raise ValueError("tol must be positive")
    p = char_poly(m)
    coeffs = list(p.coeffs)
    zero_mult = 0
    while coeffs[0] == 0 and len(coeffs) > 1:
        coeffs.pop(0)
        zero_mult += 1
    if len(coeffs) > 1:
        # multiple roots stall the root finder and weaken the residual
        # bounds; the radical has the same root set, all simple
        coeffs = _square_free_part(coeffs)
    n = len(coeffs) - 1
    if n == 0:
        roots = (complex(0),) * max(zero_mult, 1)
        return SpectralResult(0.0, 0.0, p, roots, 0.0)

    for dps in _PRECISION_LADDER:
        with mpmath.workdps(dps):
            try:
                zs = mpmath.polyroots(
                    [mpmath.mpf(c) for c in reversed(coeffs)], maxsteps=400, extraprec=80
                )
            except mpmath.libmp.NoConvergence:
                continue
            bounds = _certified_bounds(coeffs, zs, n)
            if bounds is None:
                continue
            lower, upper, _ = bounds
            r0 = max(abs(z) for z in zs)
            abs_err = max(upper - r0, r0 - lower)
            if abs_err <= tol:
                roots = tuple(complex(z) for z in zs)
                if zero_mult:
                    roots += (complex(0),)
                # residual bound documented for the rounded roots as returned
                rev = [mpmath.mpf(c) for c in reversed(p.coeffs)]
                max_res = max(abs(mpmath.polyval(rev, mpmath.mpc(z))) for z in roots)
                return SpectralResult(float(r0), float(abs_err), p, roots, float(max_res))
    raise CertificationError(
        f"spectral radius of {m.rows}x{m.cols} matrix not certified to {tol}"
    )
