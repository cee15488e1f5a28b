"""Numerical search for certificate multipliers, plus exact rounding.

The pipeline mirrors how the long certificates were produced: solve a dense
SDP feasibility problem for an approximate multiplier pair, round it to
rationals satisfying the equality conditions exactly, then hand the result
to the exact verifier. Floats are only ever a search heuristic; exact
arithmetic is the arbiter.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .certificate import (
    Certificate,
    Infeasible,
    MembershipReport,
    PreconditionError,
    check_membership,
    minimal_epsilon,
)
from .conelp import (
    ConeDims,
    SolverOptions,
    solve_conic,
    svec_pack,
    svec_unpack,
)
from .exact_linalg import RatMatrix, rref
from .pep_builder import (
    STAR,
    StepsizePattern,
    build_pep_data,
    index_pairs,
    mat_pos,
)

DESK_SCALE_MAX_T = 127          # verification-side cap: t + 2 <= 129
DEFAULT_GENERATION_MAX_T = 31   # numerical generation supported by default


class NotFound(Exception):
    """The numerical search exhausted its budget without an approximate member.

    This is NOT a proof of emptiness; it reports the best residuals reached.
    """

    def __init__(self, message: str, residuals: dict | None = None):
        super().__init__(message)
        self.residuals = residuals or {}


class RoundingFailure(Exception):
    """Rounding produced an exactly-infeasible point (try more denominator bits)."""


@dataclass(frozen=True)
class SolveOptions:
    max_iters: int = 200
    tol: float = 1e-8
    seed: int = 0               # recorded for provenance; the solve itself is deterministic
    psd_margin_target: float = 0.0  # boundary solutions are expected at 0

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")


def _pairs(t: int) -> list[tuple]:
    return list(index_pairs(t))


def _x_trail_entry(h: StepsizePattern, i, k: int) -> Fraction:
    if i == STAR or k >= i:
        return Fraction(0)
    return -h.h[k]


def _lambda_equality_system(h: StepsizePattern) -> tuple[RatMatrix, tuple[Fraction, ...]]:
    """Stacked equalities on lambda: multiplier balance rows, then first-column rows."""
    t = h.t
    pairs = _pairs(t)
    rows = 2 * (t + 1)
    cols = len(pairs)
    E = [[Fraction(0)] * cols for _ in range(rows)]
    for col, (i, j) in enumerate(pairs):
        if j != STAR:
            E[j][col] += 1
        if i != STAR:
            E[i][col] -= 1
        if i == STAR:  # first-column contribution: m[j] = -lambda_{*,j}/2
            E[t + 1 + j][col] = Fraction(-1, 2)
    rhs = [Fraction(0)] * rows
    rhs[t] += 1
    rhs[0] -= 1
    return RatMatrix.from_rows(E), tuple(rhs)


def _gamma_equality_system(h: StepsizePattern) -> tuple[RatMatrix, tuple[Fraction, ...]]:
    t = h.t
    pairs = _pairs(t)
    cols = len(pairs)
    E = [[Fraction(0)] * cols for _ in range(t + 1)]
    for col, (i, j) in enumerate(pairs):
        if j != STAR:
            E[j][col] += 1
        if i != STAR:
            E[i][col] -= 1
    rhs = [Fraction(0)] * (t + 1)
    rhs[0] = 2 * h.sum_h
    return RatMatrix.from_rows(E), tuple(rhs)


@dataclass
class _AffineSpace:
    """Exact solution set {x : E x = rhs} as particular + nullspace basis."""
    particular: list[Fraction]
    basis: list[list[Fraction]]     # one entry per free column
    pivots: tuple[int, ...]         # original column indices
    free: tuple[int, ...]           # original column indices
    reduced: RatMatrix              # rref of [E | rhs] in permuted column order
    _order: list[int] = field(default_factory=list)
    _piv_sorted: tuple[int, ...] = ()
    _free_sorted: tuple[int, ...] = ()

    @property
    def dim(self) -> int:
        return len(self.basis)


def _affine_space(E: RatMatrix, rhs: Sequence[Fraction],
                  priority: Sequence[float] | None = None) -> _AffineSpace:
    """Row-reduce [E | rhs]. With ``priority`` given, columns are scanned in
    order of decreasing priority so pivots land on high-priority coordinates;
    all reported indices refer to the original column order."""
    n = E.cols
    if priority is None:
        order = list(range(n))
    else:
        order = sorted(range(n), key=lambda i: (-priority[i], i))
    aug = RatMatrix(E.rows, n + 1,
                    [x for i in range(E.rows)
                     for x in (*(E.entry(i, cc) for cc in order), rhs[i])])
    R, piv = rref(aug)
    if n in piv:
        raise ValueError("equality system is inconsistent")
    piv_orig = tuple(order[c] for c in piv)
    free_sorted = tuple(c for c in range(n) if c not in set(piv))
    free_orig = tuple(order[c] for c in free_sorted)
    particular = [Fraction(0)] * n
    for r, c in enumerate(piv):
        particular[order[c]] = R.entry(r, n)
    basis = []
    for f in free_sorted:
        v = [Fraction(0)] * n
        v[order[f]] = Fraction(1)
        for r, c in enumerate(piv):
            v[order[c]] = -R.entry(r, f)
        basis.append(v)
    space = _AffineSpace(particular, basis, piv_orig, free_orig, R)
    space._order = order  # permuted column order used inside ``reduced``
    space._piv_sorted = piv
    space._free_sorted = free_sorted
    return space


def _pair_block_maps(h: StepsizePattern) -> tuple[np.ndarray, np.ndarray]:
    """Per-pair svec rows of the bordered PSD blocks.

    Returns (BM, Bm), each (n_pairs, svec_dim) for blocks of size t+2:
    BM[e] is the trailing-block contribution of a unit multiplier on pair e,
    Bm[e] the border (first column) contribution.
    """
    t = h.t
    pairs = _pairs(t)
    dim = t + 2
    sd = dim * (dim + 1) // 2
    BM = np.zeros((len(pairs), sd))
    Bm = np.zeros((len(pairs), sd))
    for e, (i, j) in enumerate(pairs):
        blk = np.zeros((dim, dim))
        if j != STAR:
            for k in range(t + 1):
                w = float(_x_trail_entry(h, i, k) - _x_trail_entry(h, j, k))
                if w:
                    blk[1 + j, 1 + k] += 0.5 * w
                    blk[1 + k, 1 + j] += 0.5 * w
        if i == STAR:
            blk[1 + j, 1 + j] += 0.5
        elif j == STAR:
            blk[1 + i, 1 + i] += 0.5
        else:
            blk[1 + i, 1 + i] += 0.5
            blk[1 + j, 1 + j] += 0.5
            blk[1 + i, 1 + j] -= 0.5
            blk[1 + j, 1 + i] -= 0.5
        BM[e] = svec_pack(blk)
        if i == STAR:
            border = np.zeros((dim, dim))
            border[0, 1 + j] = border[1 + j, 0] = -0.5
            Bm[e] = svec_pack(border)
    return BM, Bm


def _pair_matrix_to_vec(mat: np.ndarray, t: int) -> np.ndarray:
    pairs = _pairs(t)
    return np.array([mat[mat_pos(i, t), mat_pos(j, t)] for i, j in pairs])


def _vec_to_pair_matrix(vec: Sequence, t: int) -> np.ndarray:
    out = np.zeros((t + 2, t + 2))
    for v, (i, j) in zip(vec, _pairs(t)):
        out[mat_pos(i, t), mat_pos(j, t)] = float(v)
    return out


def recompute_residuals(pattern: StepsizePattern, Delta: float,
                        lam: np.ndarray, gam: np.ndarray) -> dict[str, float]:
    """Float feasibility diagnostics for an approximate multiplier pair."""
    t = pattern.t
    pairs = _pairs(t)
    hf = [float(v) for v in pattern.h]
    sum_h = sum(hf)

    def eq_residual(mat: np.ndarray, rhs: np.ndarray) -> float:
        acc = np.zeros(t + 1)
        for i, j in pairs:
            v = mat[mat_pos(i, t), mat_pos(j, t)]
            if j != STAR:
                acc[j] += v
            if i != STAR:
                acc[i] -= v
        return float(np.max(np.abs(acc - rhs)))

    rhs_l = np.zeros(t + 1)
    rhs_l[t] += 1.0
    rhs_l[0] -= 1.0
    rhs_g = np.zeros(t + 1)
    rhs_g[0] = 2.0 * sum_h

    BM, Bm = _pair_block_maps(pattern)
    lam_vec = _pair_matrix_to_vec(lam, t)
    gam_vec = _pair_matrix_to_vec(gam, t)
    corner = np.zeros((t + 2, t + 2))
    corner[0, 0] = sum_h
    base = svec_pack(corner) + BM.T @ lam_vec + Bm.T @ gam_vec
    X1 = svec_unpack(base, t + 2)
    X2 = svec_unpack(base + Delta * (BM.T @ gam_vec), t + 2)
    lam_plus = lam_vec + Delta * gam_vec

    def min_eig(M: np.ndarray) -> float:
        if not np.all(np.isfinite(M)):
            return float("-inf")
        try:
            return float(np.linalg.eigvalsh(M)[0])
        except np.linalg.LinAlgError:
            return float("-inf")

    return {
        "eq_lambda_inf": eq_residual(lam, rhs_l),
        "eq_gamma_inf": eq_residual(gam, rhs_g),
        "m_lambda_inf": float(np.max(np.abs(lam[0, 1:]))) / 2.0,
        "min_lambda": float(lam_vec.min()),
        "min_lambda_plus_delta_gamma": float(lam_plus.min()),
        "min_eig_psd_at_zero": min_eig(X1),
        "min_eig_psd_at_delta": min_eig(X2),
    }


@dataclass(frozen=True)
class FloatCertificate:
    """Approximate multiplier pair from the numerical solver.

    ``residuals`` is always recomputed from the stored matrices at
    construction time, never carried over stale.
    """
    pattern: StepsizePattern
    Delta: float
    lam: np.ndarray
    gam: np.ndarray
    residuals: dict[str, float] = field(default_factory=dict)
    solver_status: str = ""
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "lam", np.ascontiguousarray(self.lam, dtype=float))
        object.__setattr__(self, "gam", np.ascontiguousarray(self.gam, dtype=float))
        object.__setattr__(
            self, "residuals",
            recompute_residuals(self.pattern, self.Delta, self.lam, self.gam))

    def tobytes(self) -> bytes:
        return self.lam.tobytes() + self.gam.tobytes()

    def worst_violation(self) -> float:
        r = self.residuals
        return max(r["eq_lambda_inf"], r["eq_gamma_inf"], r["m_lambda_inf"],
                   -r["min_lambda"], -r["min_lambda_plus_delta_gamma"],
                   -r["min_eig_psd_at_zero"], -r["min_eig_psd_at_delta"], 0.0)


def _validate_search_inputs(pattern: StepsizePattern, Delta: Fraction | float,
                            max_t: int) -> None:
    if pattern.t > max_t:
        raise PreconditionError(
            f"pattern length {pattern.t} exceeds the supported scale (t <= {max_t})")
    cap = min(0.5, 1.0 / (2.0 * float(pattern.sum_h)))
    if not (0.0 < float(Delta) < cap + 1e-15):
        raise PreconditionError(
            f"Delta={float(Delta)} outside (0, min(1/2, 1/(2 sum h))={cap:.6g})")


def solve_approx(pattern: StepsizePattern, Delta: float,
                 opts: SolveOptions | None = None, *,
                 max_t: int = DESK_SCALE_MAX_T,
                 verbose: bool = False) -> FloatCertificate:
    """Find an approximate multiplier pair by pure-feasibility path following.

    The equality conditions are built into the parameterization (exact
    nullspace basis, floated), and the interior-point iteration follows the
    central path of the remaining cone constraints toward their analytic
    center. Exact certificates sit on the PSD boundary (a strictly positive
    corner-Schur slack would beat the true one-dimensional worst case), so
    no margin is forced on the PSD blocks. Deterministic for fixed inputs.

    Scaling notes, load-bearing for t ~ 31: multipliers pinned to zero by the
    first-column equality get no cone rows at all, the (*, j) rows of
    lambda + Delta*gamma are carried as gamma_(*,j) >= 0 (the same constraint,
    scaled 1/Delta), and gamma is boxed directly so every search direction is
    visible in the Schur system at unit scale.
    """
    opts = opts or SolveOptions()
    _validate_search_inputs(pattern, Delta, max_t)
    t = pattern.t
    pairs = _pairs(t)
    n_pairs = len(pairs)
    Df = float(Delta)

    El, rl = _lambda_equality_system(pattern)
    Eg, rg = _gamma_equality_system(pattern)
    sp_l = _affine_space(El, rl)
    sp_g = _affine_space(Eg, rg)
    lam0 = np.array([float(v) for v in sp_l.particular])
    gam0 = np.array([float(v) for v in sp_g.particular])
    Nl = np.array([[float(v) for v in col] for col in sp_l.basis]).T if sp_l.dim else np.zeros((n_pairs, 0))
    Ng = np.array([[float(v) for v in col] for col in sp_g.basis]).T if sp_g.dim else np.zeros((n_pairs, 0))
    kl, kg = Nl.shape[1], Ng.shape[1]
    m = kl + kg

    BM, Bm = _pair_block_maps(pattern)
    dim = t + 2
    sd = dim * (dim + 1) // 2
    sum_h = float(pattern.sum_h)
    box = 1e4 * (1.0 + sum_h)

    star_rows = [e for e, (i, _) in enumerate(pairs) if i == STAR]
    rest = [e for e, (i, _) in enumerate(pairs) if i != STAR]
    n_rest = len(rest)

    rows_c: list[np.ndarray] = []
    rows_A: list[np.ndarray] = []

    def add_rows(cs: np.ndarray, As: np.ndarray) -> None:
        rows_c.append(cs)
        rows_A.append(As)

    Az = np.concatenate([Nl, np.zeros((n_pairs, kg))], axis=1)
    Gz = np.concatenate([np.zeros((n_pairs, kl)), Ng], axis=1)
    # lambda_e >= 0 on entries not pinned to zero by the first-column equality
    add_rows(lam0[rest], -Az[rest])
    # (lambda + Delta*gamma)_e >= 0 away from the starred row
    add_rows(lam0[rest] + Df * gam0[rest], -(Az[rest] + Df * Gz[rest]))
    # on the starred row lambda is pinned to zero: the same constraint is
    # gamma_(*,j) >= 0 after dividing by Delta (unit-scale coefficients)
    add_rows(gam0[star_rows], -Gz[star_rows])
    # boxes keep the search region compact; slack in practice
    add_rows(np.full(n_rest, box) - lam0[rest], Az[rest])
    add_rows(np.full(n_pairs, box) - gam0, Gz)
    add_rows(np.full(n_rest, box) + gam0[rest], -Gz[rest])

    l_rows = sum(len(cs) for cs in rows_c)

    corner = np.zeros((dim, dim))
    corner[0, 0] = sum_h
    corner_svec = svec_pack(corner)
    # PSD block at gap 0: corner + M(lambda) + border(gamma)
    add_rows(corner_svec + BM.T @ lam0 + Bm.T @ gam0,
             -np.concatenate([BM.T @ Nl, Bm.T @ Ng], axis=1))
    # PSD block at gap Delta: trailing block shifts by Delta*M(gamma)
    add_rows(corner_svec + BM.T @ lam0 + (Bm + Df * BM).T @ gam0,
             -np.concatenate([BM.T @ Nl, (Bm + Df * BM).T @ Ng], axis=1))

    A = np.concatenate(rows_A, axis=0)
    c = np.concatenate(rows_c, axis=0)
    dims = ConeDims(l_rows, (dim, dim))
    res = solve_conic(A, np.zeros(m), c, dims,
                      SolverOptions(max_iters=opts.max_iters, tol=min(1e-9, opts.tol / 10),
                                    verbose=verbose),
                      init_scale=max(1.0, sum_h))

    z = res.y
    lam_vec = lam0 + (Nl @ z[:kl] if kl else 0.0)
    gam_vec = gam0 + (Ng @ z[kl:kl + kg] if kg else 0.0)
    fc = FloatCertificate(
        pattern=pattern,
        Delta=Df,
        lam=_vec_to_pair_matrix(lam_vec, t),
        gam=_vec_to_pair_matrix(gam_vec, t),
        solver_status=res.status,
        seed=opts.seed,
    )
    viol = fc.worst_violation()
    min_eig = min(fc.residuals["min_eig_psd_at_zero"], fc.residuals["min_eig_psd_at_delta"])
    if viol > opts.tol or min_eig < opts.psd_margin_target - opts.tol:
        raise NotFound(
            f"no approximate certificate for h=({pattern.as_text()}) at "
            f"Delta={Df:g}: worst violation {viol:.3e} "
            f"(solver status: {res.status}); this is not a proof of emptiness",
            residuals=fc.residuals,
        )
    return fc


def _dyadic(v: float, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(round(float(v) * scale), scale)


def _solve_pivots(space: _AffineSpace, values: dict[int, Fraction],
                  n: int) -> list[Fraction]:
    """Fill pivot coordinates exactly given fixed free coordinates."""
    x = [Fraction(0)] * n
    for f in space.free:
        x[f] = values[f]
    R = space.reduced
    for r, c_orig in enumerate(space.pivots):
        acc = R.entry(r, n)  # reduced rhs
        for f_sorted, f_orig in zip(space._free_sorted, space.free):
            coef = R.entry(r, f_sorted)
            if coef:
                acc -= coef * x[f_orig]
        x[c_orig] = acc
    return x


def round_to_exact(approx: FloatCertificate, denom_bits: int = 53,
                   exact_delta: Fraction | None = None) -> Certificate:
    """Round an approximate pair to exact rationals satisfying the equalities.

    Non-pivot entries become nearest dyadic rationals with denominator
    2^denom_bits (entries of lambda that would round negative are clamped to
    zero first); pivot entries, chosen by the rref of the stacked equality
    system, are then solved exactly.
    """
    if not all(np.isfinite(v) for v in approx.residuals.values()):
        raise PreconditionError("approximate certificate has non-finite residuals")
    pattern = approx.pattern
    t = pattern.t
    n = len(_pairs(t))
    # a float gap cap is a dyadic rational, so it carries over exactly
    Delta = exact_delta if exact_delta is not None else Fraction(approx.Delta)

    lam_f = _pair_matrix_to_vec(approx.lam, t)
    gam_f = _pair_matrix_to_vec(approx.gam, t)
    El, rl = _lambda_equality_system(pattern)
    Eg, rg = _gamma_equality_system(pattern)

    # entries below solver noise are meant to sit on the boundary: snap them
    # to exact zero so pivot entries tied to them by the equalities follow
    snap = 2.0 ** (-(denom_bits // 2))

    def round_entry(v: float) -> Fraction:
        return Fraction(0) if abs(v) <= snap else _dyadic(v, denom_bits)

    # pivots go to large-magnitude entries, so the exact corrections from the
    # pivot solve cannot flip the sign of a boundary (near-zero) multiplier;
    # an entry that still solves negative gets demoted to a clamped free
    # coordinate and the system is re-pivoted
    prio_l = np.abs(lam_f)
    lam_vec = None
    for _ in range(8):
        sp_l = _affine_space(El, rl, priority=prio_l)
        lam_free = {f: max(Fraction(0), round_entry(lam_f[f])) for f in sp_l.free}
        lam_vec = _solve_pivots(sp_l, lam_free, n)
        bad = [e for e, v in enumerate(lam_vec) if v < 0]
        if not bad:
            break
        prio_l = prio_l.copy()
        prio_l[bad] = -1.0
    else:
        bad = [e for e, v in enumerate(lam_vec) if v < 0]
        raise RoundingFailure(
            f"re-pivoting left {len(bad)} negative lambda entries (worst "
            f"{float(min(lam_vec[e] for e in bad)):.3e}); retry with larger denom_bits")

    prio_g = np.abs(gam_f)
    gam_vec = None
    for _ in range(8):
        sp_g = _affine_space(Eg, rg, priority=prio_g)
        gam_free = {}
        for f in sp_g.free:
            g = round_entry(gam_f[f])
            if lam_vec[f] + Delta * g < 0:
                g = -lam_vec[f] / Delta  # lift to the boundary of the nonnegativity face
            gam_free[f] = g
        gam_vec = _solve_pivots(sp_g, gam_free, n)
        bad = [e for e in range(n) if lam_vec[e] + Delta * gam_vec[e] < 0]
        if not bad:
            break
        prio_g = prio_g.copy()
        prio_g[bad] = -1.0
    else:
        bad = [e for e in range(n) if lam_vec[e] + Delta * gam_vec[e] < 0]
        worst = min(lam_vec[e] + Delta * gam_vec[e] for e in bad)
        raise RoundingFailure(
            f"re-pivoting left nonnegativity of lambda + Delta*gamma violated at "
            f"{len(bad)} entries (worst {float(worst):.3e}); retry with larger "
            "denom_bits")

    def to_matrix(vec: list[Fraction]) -> RatMatrix:
        rows = [[Fraction(0)] * (t + 2) for _ in range(t + 2)]
        for v, (i, j) in zip(vec, _pairs(t)):
            rows[mat_pos(i, t)][mat_pos(j, t)] = v
        return RatMatrix.from_rows(rows)

    return Certificate(pattern, Delta, Fraction(0), to_matrix(lam_vec), to_matrix(gam_vec))


DENOM_BITS_LADDER = (53, 80, 128)


def _tidy_eps_ceiling(em: Fraction) -> Fraction:
    """Smallest d * 10^k >= em with a single significant digit d (0 if em <= 0).

    Stored slacks stay human-readable; validity is monotone in eps, so any
    ceiling of the minimal slack verifies.
    """
    if em <= 0:
        return Fraction(0)
    unit = Fraction(1)
    while unit < em:
        unit *= 10
    while unit / 10 >= em:
        unit /= 10
    step = unit / 10  # step < em <= unit
    d = -((-em.numerator * step.denominator) // (em.denominator * step.numerator))
    return d * step


def generate(pattern: StepsizePattern, Delta: Fraction | float,
             opts: SolveOptions | None = None, *,
             denom_bits: int | None = None,
             max_t: int = DEFAULT_GENERATION_MAX_T,
             verbose: bool = False) -> tuple[Certificate, MembershipReport, Fraction]:
    """Full pipeline: numerical solve, exact rounding, exact verification.

    Returns only exactly-verified certificates (with epsilon set to the
    computed minimal slack when that is positive). Raises NotFound or
    RoundingFailure otherwise.
    """
    opts = opts or SolveOptions()
    _validate_search_inputs(pattern, Delta, max_t)
    Delta_exact = Delta if isinstance(Delta, Fraction) else Fraction(Delta)
    approx = solve_approx(pattern, float(Delta_exact), opts, max_t=max_t, verbose=verbose)
    ladder = (denom_bits,) if denom_bits else DENOM_BITS_LADDER
    last_error: Exception | None = None
    for bits in ladder:
        try:
            cert0 = round_to_exact(approx, bits, exact_delta=Delta_exact)
        except RoundingFailure as e:
            last_error = e
            continue
        em = minimal_epsilon(cert0.pattern, cert0.Delta, cert0.lam, cert0.gam)
        if isinstance(em, Infeasible):
            last_error = RoundingFailure(
                f"rounded pair admits no finite epsilon ({em.reason}); retry with "
                "larger denom_bits")
            continue
        eps = _tidy_eps_ceiling(em)  # validity is monotone in eps
        cert = Certificate(cert0.pattern, cert0.Delta, eps, cert0.lam, cert0.gam)
        report = check_membership(cert)
        if report.overall:
            return cert, report, em
        last_error = RoundingFailure(
            f"exact verification failed after rounding at {bits} bits: "
            f"{report.failed_conditions()}")
    raise last_error if last_error else RoundingFailure("rounding ladder exhausted")


@dataclass(frozen=True)
class PrimalValue:
    """Numerical optimum of the worst-case-gap SDP at one gap level."""
    value: float
    gram_eigenvalues: np.ndarray
    numerical_rank: int
    status: str

    @property
    def rank_one(self) -> bool:
        e = self.gram_eigenvalues
        return len(e) > 0 and (len(e) == 1 or e[-2] < 1e-6 * max(e[-1], 1e-300))


def evaluate_primal(pattern: StepsizePattern, delta: float,
                    opts: SolveOptions | None = None, *,
                    verbose: bool = False) -> PrimalValue:
    """Solve the worst-case final-gap SDP (upper bound on the true worst case).

    Maximizes the final objective value over Gram-matrix relaxations with
    unit initial distance and initial gap at most delta; also reports the
    numerical rank of the optimal Gram matrix.
    """
    opts = opts or SolveOptions()
    if delta < 0:
        raise PreconditionError(f"delta={delta} must be nonnegative")
    if pattern.t > DEFAULT_GENERATION_MAX_T:
        raise PreconditionError(
            f"primal evaluation is desk scale (t <= {DEFAULT_GENERATION_MAX_T})")
    t = pattern.t
    data = build_pep_data(pattern)
    pairs = _pairs(t)
    dim = t + 2
    sd = dim * (dim + 1) // 2
    nf = t + 1
    m = nf + sd  # variables: objective values F, then svec of the Gram matrix

    big = 100.0 * (1.0 + float(pattern.sum_h)) ** 2
    l_rows = len(pairs) + 2 + 2 * nf + dim
    A = np.zeros((l_rows + sd, m))
    c = np.zeros(l_rows + sd)
    row = 0
    for (i, j) in pairs:
        pd = data.pair(i, j)
        A[row, :nf] = [float(v) for v in pd.a]
        K = pd.A + pd.C.scale(Fraction(1, 2))
        A[row, nf:] = svec_pack(np.array([[float(K.entry(r, cc)) for cc in range(dim)]
                                          for r in range(dim)]))
        row += 1
    # Tr(G B_{0,*}) <= 1: the initial-distance constraint
    B0 = np.zeros((dim, dim))
    B0[0, 0] = 1.0
    A[row, nf:] = svec_pack(B0)
    c[row] = 1.0
    row += 1
    # initial gap at most delta
    A[row, 0] = 1.0
    c[row] = float(delta)
    row += 1
    # loose boxes guarantee compactness
    for k in range(nf):
        A[row, k] = 1.0
        c[row] = big
        row += 1
        A[row, k] = -1.0
        c[row] = big
        row += 1
    for k in range(dim):
        E = np.zeros((dim, dim))
        E[k, k] = 1.0
        A[row, nf:] = svec_pack(E)
        c[row] = big
        row += 1
    # PSD block: the Gram matrix itself
    A[l_rows:, nf:] = -np.eye(sd)

    b = np.zeros(m)
    b[t] = 1.0  # maximize the final objective value
    res = solve_conic(A, b, c, ConeDims(l_rows, (dim,)),
                      SolverOptions(max_iters=opts.max_iters, tol=min(1e-9, opts.tol / 10),
                                    verbose=verbose),
                      init_scale=1.0)
    G = svec_unpack(res.y[nf:], dim)
    eigs = np.linalg.eigvalsh(G)
    lead = max(float(eigs[-1]), 0.0)
    rank = int(np.sum(eigs > 1e-6 * max(lead, 1e-300)))
    return PrimalValue(value=res.objective, gram_eigenvalues=eigs,
                       numerical_rank=rank, status=res.status)
