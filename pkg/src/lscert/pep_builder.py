"""Performance-estimation data for cyclic gradient descent, built exactly.

Everything here is normalized to L = D = 1. Index set for one pattern
application of length t: (*, 0, 1, ..., t), where * is the minimizer.
Rows/columns of multiplier matrices and of the dual slack matrix follow
that order, so a multiplier on the pair (0,1) sits at matrix position
(1, 2) counting from zero.

Basis coordinates (dimension t+2): coordinate 0 carries the initial point,
coordinate i+1 carries the gradient at step i.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .exact_linalg import RatMatrix, rat_from_decimal, rat_to_str

STAR = "*"
Index = object  # STAR or int


@dataclass(frozen=True)
class StepsizePattern:
    """Normalized stepsizes h applied cyclically; the actual step is h_k / L."""
    h: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.h) < 1:
            raise ValueError("a stepsize pattern needs at least one step")
        for i, v in enumerate(self.h):
            if not isinstance(v, Fraction):
                raise TypeError(f"h[{i}] must be an exact Fraction, got {type(v).__name__}")
            if v <= 0:
                raise ValueError(f"h[{i}] = {v} must be positive")

    @classmethod
    def from_text(cls, text: str) -> "StepsizePattern":
        parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
        return cls(tuple(rat_from_decimal(p) for p in parts))

    @property
    def t(self) -> int:
        return len(self.h)

    @property
    def sum_h(self) -> Fraction:
        return sum(self.h, Fraction(0))

    @property
    def avg_h(self) -> Fraction:
        return self.sum_h / self.t

    def as_text(self) -> str:
        return ",".join(rat_to_str(v) for v in self.h)


def index_set(t: int) -> tuple:
    return (STAR, *range(t + 1))


def index_pairs(t: int) -> Iterator[tuple]:
    for i in index_set(t):
        for j in index_set(t):
            if i != j:
                yield (i, j)


def mat_pos(idx, t: int) -> int:
    """Row/column of an index in the (*, 0, ..., t) matrix ordering."""
    if idx == STAR:
        return 0
    if not (0 <= idx <= t):
        raise ValueError(f"index {idx} outside 0..{t}")
    return idx + 1


@dataclass(frozen=True)
class PepBasis:
    t: int
    g: dict
    x: dict
    f: dict


def build_basis(h: StepsizePattern) -> PepBasis:
    """Coordinate vectors for gradients, iterates and objective values.

    x_i = x_0 - sum_{j<i} h_j g_j with L = 1; the starred entries are zero.
    """
    t = h.t
    dim = t + 2
    zero = tuple(Fraction(0) for _ in range(dim))
    g = {STAR: zero}
    for i in range(t + 1):
        v = [Fraction(0)] * dim
        v[i + 1] = Fraction(1)
        g[i] = tuple(v)
    x = {STAR: zero}
    cur = [Fraction(0)] * dim
    cur[0] = Fraction(1)
    x[0] = tuple(cur)
    for i in range(1, t + 1):
        cur[i] -= h.h[i - 1]  # coordinate i carries g_{i-1}
        x[i] = tuple(cur)
    fzero = tuple(Fraction(0) for _ in range(t + 1))
    f = {STAR: fzero}
    for i in range(t + 1):
        v = [Fraction(0)] * (t + 1)
        v[i] = Fraction(1)
        f[i] = tuple(v)
    return PepBasis(t, g, x, f)


def sym_outer(u: Sequence[Fraction], v: Sequence[Fraction]) -> RatMatrix:
    """u (.) v = (u v' + v u') / 2, the symmetric outer product."""
    n = len(u)
    if len(v) != n:
        raise ValueError("length mismatch in symmetric outer product")
    half = Fraction(1, 2)
    ent = [half * (u[i] * v[j] + v[i] * u[j]) for i in range(n) for j in range(n)]
    return RatMatrix(n, n, ent)


@dataclass(frozen=True)
class PairData:
    A: RatMatrix
    B: RatMatrix
    C: RatMatrix
    a: tuple[Fraction, ...]


@dataclass(frozen=True)
class PepData:
    pattern: StepsizePattern
    basis: PepBasis
    pairs: dict

    def pair(self, i, j) -> PairData:
        return self.pairs[(i, j)]


def build_pep_data(h: StepsizePattern) -> PepData:
    """All A/B/C matrices and a vectors over ordered index pairs i != j.

    A_{i,j} = g_j (.) (x_i - x_j), B and C are the squared versions, and
    a_{i,j} = f_j - f_i, so that the interpolation inequality for the pair
    reads F a_{i,j} + Tr(G A_{i,j}) + Tr(G C_{i,j})/2 <= 0.
    """
    basis = build_basis(h)
    pairs = {}
    for i, j in index_pairs(h.t):
        dx = tuple(a - b for a, b in zip(basis.x[i], basis.x[j]))
        dg = tuple(a - b for a, b in zip(basis.g[i], basis.g[j]))
        pairs[(i, j)] = PairData(
            A=sym_outer(basis.g[j], dx),
            B=sym_outer(dx, dx),
            C=sym_outer(dg, dg),
            a=tuple(a - b for a, b in zip(basis.f[j], basis.f[i])),
        )
    return PepData(h, basis, pairs)


def _check_multiplier_shape(h: StepsizePattern, arg: RatMatrix, name: str) -> None:
    dim = h.t + 2
    if arg.rows != dim or arg.cols != dim:
        raise ValueError(f"{name} must be {dim}x{dim} for t={h.t}, got {arg.rows}x{arg.cols}")


def sum_a(h: StepsizePattern, arg: RatMatrix) -> tuple[Fraction, ...]:
    """sum_{i != j} arg_{i,j} a_{i,j}, exploiting that a_{i,j} = f_j - f_i."""
    _check_multiplier_shape(h, arg, "multiplier matrix")
    t = h.t
    out = [Fraction(0)] * (t + 1)
    for i in index_set(t):
        pi = mat_pos(i, t)
        for j in index_set(t):
            if i == j:
                continue
            v = arg.entry(pi, mat_pos(j, t))
            if v:
                if j != STAR:
                    out[j] += v
                if i != STAR:
                    out[i] -= v
    return tuple(out)


def m_vec(h: StepsizePattern, arg: RatMatrix) -> tuple[Fraction, ...]:
    """First column of the dual slack matrix below its corner, as a linear map.

    Only pairs (*, j) touch it: m[j] = -arg_{*,j} / 2.
    """
    _check_multiplier_shape(h, arg, "multiplier matrix")
    t = h.t
    half = Fraction(1, 2)
    return tuple(-half * arg.entry(0, mat_pos(j, t)) for j in range(t + 1))


def M_mat(h: StepsizePattern, arg: RatMatrix) -> RatMatrix:
    """Trailing (t+1)x(t+1) block of sum arg_{i,j} (A_{i,j} + C_{i,j}/2)."""
    _check_multiplier_shape(h, arg, "multiplier matrix")
    t = h.t
    n = t + 1
    M = [[Fraction(0)] * n for _ in range(n)]
    half = Fraction(1, 2)

    # trailing coordinates of x_i: coordinate k holds -h_k for k < i, else 0
    def x_trail(i):
        if i == STAR:
            return ()
        return tuple(-h.h[k] for k in range(i))

    for i in index_set(t):
        pi = mat_pos(i, t)
        row = arg.row(pi)
        for j in index_set(t):
            if i == j:
                continue
            v = row[mat_pos(j, t)]
            if not v:
                continue
            # A part: g_j (.) (x_i - x_j); zero when j is the minimizer
            if j != STAR:
                xi, xj = x_trail(i), x_trail(j)
                top = max(len(xi), len(xj))
                for k in range(top):
                    wk = (xi[k] if k < len(xi) else Fraction(0)) - (
                        xj[k] if k < len(xj) else Fraction(0))
                    if wk:
                        c = half * v * wk
                        M[j][k] += c
                        M[k][j] += c
            # C part: (g_i - g_j)(g_i - g_j)' / 2
            hv = half * v
            if i == STAR:
                M[j][j] += hv
            elif j == STAR:
                M[i][i] += hv
            else:
                M[i][i] += hv
                M[j][j] += hv
                M[i][j] -= hv
                M[j][i] -= hv
    return RatMatrix.from_rows(M)


def bordered(corner: Fraction, m: Sequence[Fraction], M: RatMatrix) -> RatMatrix:
    """[[corner, m'], [m, M]] as one symmetric matrix."""
    n = M.rows
    if len(m) != n:
        raise ValueError("border length does not match block size")
    rows = [[corner, *m]]
    for i in range(n):
        rows.append([m[i], *M.row(i)])
    return RatMatrix.from_rows(rows)


@dataclass(frozen=True)
class ZBlocks:
    """Block decomposition of the dual slack matrix: corner, first column, trailing block.

    corner is reported after the 1/delta rescaling of the first row and
    column, i.e. it equals sum_i (h_i + eps).
    """
    corner: Fraction
    m: tuple[Fraction, ...]
    M: RatMatrix


def block_split(h: StepsizePattern, eps: Fraction, arg: RatMatrix) -> ZBlocks:
    corner = sum((hi + eps for hi in h.h), Fraction(0))
    return ZBlocks(corner, m_vec(h, arg), M_mat(h, arg))


def assemble_Z(h: StepsizePattern, eps: Fraction, lam: RatMatrix, delta: Fraction) -> RatMatrix:
    """The dual slack matrix at one gap level delta.

    Z = sum_i (h_i + eps) delta^2 * B_{0,*} + sum_{i != j} lam_{i,j} (A_{i,j} + C_{i,j}/2);
    only the corner is quadratic in delta.
    """
    _check_multiplier_shape(h, lam, "lambda")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    corner = sum((hi + eps for hi in h.h), Fraction(0)) * delta * delta
    return bordered(corner, m_vec(h, lam), M_mat(h, lam))
