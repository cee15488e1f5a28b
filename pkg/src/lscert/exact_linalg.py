"""Exact rational linear algebra: the trusted kernel under every certificate check.

All scalars are ``fractions.Fraction`` (arbitrary precision, always stored
reduced with positive denominator). Nothing in this module ever touches a
binary float.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Rational = Fraction

_DECIMAL_RE = re.compile(r"^[+-]?[0-9]+(\.[0-9]+)?$")
_FRACTION_RE = re.compile(r"^[+-]?[0-9]+/[0-9]+$")


class RationalParseError(ValueError):
    """A string that should denote an exact rational does not."""


def rat_from_decimal(text: str) -> Fraction:
    """Parse a decimal literal ("2.2") or a "p/q" literal into an exact Fraction.

    Decimal parsing is exact by construction: "2.2" becomes 11/5, never a
    binary-float approximation.
    """
    if not isinstance(text, str):
        raise RationalParseError(f"expected a rational literal string, got {text!r}")
    s = text.strip()
    if _DECIMAL_RE.match(s):
        return Fraction(s)
    if _FRACTION_RE.match(s):
        num, den = s.split("/")
        if int(den) == 0:
            raise RationalParseError(f"zero denominator in rational literal {text!r}")
        return Fraction(int(num), int(den))
    raise RationalParseError(f"malformed rational literal {text!r}")


def rat_to_str(q: Fraction) -> str:
    """Canonical text form: "p" for integers, "p/q" otherwise."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return rat_from_decimal(v)
    raise TypeError(f"cannot build an exact Rational from {type(v).__name__}: {v!r}")


class RatMatrix:
    """Dense matrix of Fractions, row major. Treated as immutable after construction."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, rows: int, cols: int, entries: Sequence[Fraction]):
        if rows < 0 or cols < 0 or len(entries) != rows * cols:
            raise ValueError(f"entry count {len(entries)} does not match shape {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self._e = tuple(_as_fraction(v) for v in entries)

    @classmethod
    def from_rows(cls, data: Sequence[Sequence]) -> "RatMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        flat = []
        for r in data:
            if len(r) != cols:
                raise ValueError("ragged rows")
            flat.extend(r)
        return cls(rows, cols, [_as_fraction(v) for v in flat])

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "RatMatrix":
        cols = rows if cols is None else cols
        return cls(rows, cols, [Fraction(0)] * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        m = [Fraction(0)] * (n * n)
        for i in range(n):
            m[i * n + i] = Fraction(1)
        return cls(n, n, m)

    def entry(self, i: int, j: int) -> Fraction:
        return self._e[i * self.cols + j]

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return self._e[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._e[i * self.cols : (i + 1) * self.cols]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "RatMatrix":
        return RatMatrix(
            self.cols, self.rows,
            [self._e[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)],
        )

    def is_symmetric(self) -> bool:
        if self.rows != self.cols:
            return False
        for i in range(self.rows):
            for j in range(i + 1, self.cols):
                if self.entry(i, j) != self.entry(j, i):
                    return False
        return True

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        self._check_same_shape(other)
        return RatMatrix(self.rows, self.cols, [a + b for a, b in zip(self._e, other._e)])

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        self._check_same_shape(other)
        return RatMatrix(self.rows, self.cols, [a - b for a, b in zip(self._e, other._e)])

    def scale(self, c) -> "RatMatrix":
        c = _as_fraction(c)
        return RatMatrix(self.rows, self.cols, [c * a for a in self._e])

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        out = [Fraction(0)] * (self.rows * other.cols)
        for i in range(self.rows):
            ri = self.row(i)
            for k, a in enumerate(ri):
                if a:
                    ok = other.row(k)
                    base = i * other.cols
                    for j, b in enumerate(ok):
                        if b:
                            out[base + j] += a * b
        return RatMatrix(self.rows, other.cols, out)

    def matvec(self, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if len(v) != self.cols:
            raise ValueError(f"vector length {len(v)} does not match {self.rows}x{self.cols}")
        return tuple(
            sum((a * b for a, b in zip(self.row(i), v) if a and b), Fraction(0))
            for i in range(self.rows)
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RatMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self._e == other._e
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self._e))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(rat_to_str(x) for x in self.row(i)) for i in range(min(self.rows, 6)))
        tail = " ..." if self.rows > 6 else ""
        return f"RatMatrix({self.rows}x{self.cols}: {body}{tail})"

    def _check_same_shape(self, other: "RatMatrix") -> None:
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError(
                f"shape mismatch {self.rows}x{self.cols} vs {other.rows}x{other.cols}"
            )


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise ValueError(f"vector length mismatch {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v) if a and b), Fraction(0))


def quad_form(M: RatMatrix, v: Sequence[Fraction]) -> Fraction:
    """v' M v, exactly."""
    return dot(v, M.matvec(v))


@dataclass(frozen=True)
class LdlFactorization:
    """M = P L D L' P' with unit lower-triangular L and entrywise nonnegative D.

    ``perm[k]`` is the original index placed at pivot position k.
    """
    perm: tuple[int, ...]
    lower: RatMatrix
    diag: tuple[Fraction, ...]

    def recompose(self) -> RatMatrix:
        n = len(self.perm)
        L = self.lower
        core = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                core[i][j] = sum(
                    (L.entry(i, k) * self.diag[k] * L.entry(j, k) for k in range(min(i, j) + 1)),
                    Fraction(0),
                )
        out = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                out[self.perm[i]][self.perm[j]] = core[i][j]
        return RatMatrix.from_rows(out)


@dataclass(frozen=True)
class NegativeWitness:
    vector: tuple[Fraction, ...]
    value: Fraction  # v' M v, exactly negative


@dataclass(frozen=True)
class PsdVerdict:
    is_psd: bool
    factorization: LdlFactorization | None = None
    witness: NegativeWitness | None = None


def psd_check(M: RatMatrix) -> PsdVerdict:
    """Decide positive semidefiniteness exactly.

    Symmetric Gaussian elimination with diagonal pivoting on the largest
    remaining diagonal entry. A negative diagonal entry, or a nonzero row
    whose diagonal has reached zero, produces an explicit direction v with
    v' M v < 0; otherwise the accumulated P L D L' P' factorization
    certifies PSD.
    """
    if M.rows != M.cols:
        raise ValueError(f"psd_check needs a square matrix, got {M.rows}x{M.cols}")
    if not M.is_symmetric():
        raise ValueError("psd_check needs a symmetric matrix")
    n = M.rows
    S = [list(M.row(i)) for i in range(n)]  # mutated in place under permutation
    perm = list(range(n))
    L = [[Fraction(0)] * n for _ in range(n)]
    diag: list[Fraction] = []

    def swap(a: int, b: int) -> None:
        if a == b:
            return
        S[a], S[b] = S[b], S[a]
        for r in range(n):
            S[r][a], S[r][b] = S[r][b], S[r][a]
        perm[a], perm[b] = perm[b], perm[a]
        L[a], L[b] = L[b], L[a]

    def lift_witness(k: int, w: dict[int, Fraction]) -> NegativeWitness:
        # w lives on pivoted coordinates >= k; cancel the head via L.
        u = [Fraction(0)] * n
        for idx, val in w.items():
            u[idx] = val
        # back-substitute u_head = -L11^{-T} (L21' w), i.e. solve rows k-1..0
        for i in range(k - 1, -1, -1):
            acc = sum((L[r][i] * u[r] for r in range(i + 1, n) if u[r]), Fraction(0))
            u[i] = -acc
        v = [Fraction(0)] * n
        for pos in range(n):
            v[perm[pos]] = u[pos]
        value = quad_form(M, v)
        assert value < 0
        return NegativeWitness(tuple(v), value)

    for k in range(n):
        p = max(range(k, n), key=lambda i: S[i][i])
        if S[p][p] > 0:
            swap(k, p)
            d = S[k][k]
            diag.append(d)
            L[k][k] = Fraction(1)
            col = [S[i][k] for i in range(n)]
            for i in range(k + 1, n):
                L[i][k] = col[i] / d
            for i in range(k + 1, n):
                ci = col[i]
                if ci:
                    fi = ci / d
                    Si = S[i]
                    for j in range(k + 1, n):
                        if col[j]:
                            Si[j] -= fi * col[j]
            for i in range(k + 1, n):
                S[i][k] = Fraction(0)
                S[k][i] = Fraction(0)
            continue
        # All remaining diagonal entries are <= 0.
        for i in range(k, n):
            if S[i][i] < 0:
                return PsdVerdict(False, witness=lift_witness(k, {i: Fraction(1)}))
        for i in range(k, n):
            for j in range(i + 1, n):
                if S[i][j]:
                    sgn = Fraction(1) if S[i][j] > 0 else Fraction(-1)
                    return PsdVerdict(False, witness=lift_witness(k, {i: Fraction(1), j: -sgn}))
        # Remaining block is identically zero: finish the factorization.
        for i in range(k, n):
            L[i][i] = Fraction(1)
            diag.append(Fraction(0))
        break

    fact = LdlFactorization(tuple(perm), RatMatrix.from_rows(L), tuple(diag))
    return PsdVerdict(True, factorization=fact)


@dataclass(frozen=True)
class InRangeFailure:
    """b is not in the range of M: no x solves M x = b."""
    detail: str = "right-hand side outside the range of the matrix"


def rref(A: RatMatrix) -> tuple[RatMatrix, tuple[int, ...]]:
    """Exact reduced row echelon form and the (strictly increasing) pivot columns."""
    m, n = A.rows, A.cols
    R = [list(A.row(i)) for i in range(m)]
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if R[i][c]), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        pv = R[r][c]
        if pv != 1:
            R[r] = [x / pv for x in R[r]]
        for i in range(m):
            if i != r and R[i][c]:
                f = R[i][c]
                Ri, Rr = R[i], R[r]
                for j in range(c, n):
                    if Rr[j]:
                        Ri[j] -= f * Rr[j]
        pivots.append(c)
        r += 1
    return RatMatrix.from_rows(R) if m else A, tuple(pivots)


def solve_exact(M: RatMatrix, b: Sequence[Fraction]) -> tuple[Fraction, ...] | InRangeFailure:
    """Solve M x = b exactly, or report that b is outside range(M).

    Returns one solution (free coordinates zeroed). For symmetric M the
    quadratic form b' x is independent of which solution is returned.
    """
    if len(b) != M.rows:
        raise ValueError(f"rhs length {len(b)} does not match {M.rows}x{M.cols}")
    bf = [_as_fraction(x) for x in b]
    aug = RatMatrix(
        M.rows, M.cols + 1,
        [x for i in range(M.rows) for x in (*M.row(i), bf[i])],
    )
    R, pivots = rref(aug)
    if M.cols in pivots:
        return InRangeFailure()
    x = [Fraction(0)] * M.cols
    for r, c in enumerate(pivots):
        x[c] = R.entry(r, M.cols)
    return tuple(x)
