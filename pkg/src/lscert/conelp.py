"""Dense primal-dual path-following solver for small conic programs.

Solves the pair

    (P) min c'x  s.t.  A'x = b,  x in K
    (D) max b'y  s.t.  A y + s = c,  s in K

over K = (nonnegative orthant) x (product of dense PSD blocks), using
Nesterov-Todd scaling with a Mehrotra predictor-corrector and an infeasible
start. Problems here are desk scale (PSD blocks up to ~130), so every
factorization is dense. The implementation is deterministic: no randomness
enters anywhere.

Symmetric matrices travel in "svec" form: upper-triangle entries row-major,
off-diagonals scaled by sqrt(2), so Euclidean inner products equal trace
inner products.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SQRT2 = float(np.sqrt(2.0))


@dataclass(frozen=True)
class ConeDims:
    nonneg: int
    psd: tuple[int, ...] = ()

    @property
    def svec_dims(self) -> tuple[int, ...]:
        return tuple(p * (p + 1) // 2 for p in self.psd)

    @property
    def total(self) -> int:
        return self.nonneg + sum(self.svec_dims)

    @property
    def order(self) -> int:
        """Barrier parameter nu: one per LP coordinate, p per PSD block."""
        return self.nonneg + sum(self.psd)


def svec_pack(M: np.ndarray) -> np.ndarray:
    p = M.shape[-1]
    iu, ju = np.triu_indices(p)
    w = np.where(iu == ju, 1.0, SQRT2)
    return M[..., iu, ju] * w


def svec_unpack(v: np.ndarray, p: int) -> np.ndarray:
    iu, ju = np.triu_indices(p)
    w = np.where(iu == ju, 1.0, 1.0 / SQRT2)
    lead = v.shape[:-1]
    M = np.zeros(lead + (p, p))
    M[..., iu, ju] = v * w
    M[..., ju, iu] = M[..., iu, ju]
    return M


def svec_identity(p: int) -> np.ndarray:
    return svec_pack(np.eye(p))


@dataclass
class ConicResult:
    status: str                 # "optimal", "max_iters", "numerical"
    y: np.ndarray
    x: np.ndarray               # cone-space primal variable (svec form)
    s: np.ndarray               # cone-space dual slack (svec form)
    objective: float            # b'y at the returned point
    iterations: int
    primal_residual: float
    dual_residual: float
    rel_gap: float

    @property
    def converged(self) -> bool:
        return self.status == "optimal"


class _Scaling:
    """Nesterov-Todd scaling point for one iterate."""

    def __init__(self, dims: ConeDims, x: np.ndarray, s: np.ndarray):
        self.dims = dims
        l = dims.nonneg
        self.w = np.sqrt(x[:l] / s[:l])
        self.lam_lp = np.sqrt(x[:l] * s[:l])
        self.R: list[np.ndarray] = []
        self.Rinv: list[np.ndarray] = []
        self.d: list[np.ndarray] = []
        off = l
        for p, sd in zip(dims.psd, dims.svec_dims):
            X = svec_unpack(x[off:off + sd], p)
            S = svec_unpack(s[off:off + sd], p)
            Lx = np.linalg.cholesky(X)
            Ls = np.linalg.cholesky(S)
            U, d, Vt = np.linalg.svd(Ls.T @ Lx)
            R = Lx @ Vt.T / np.sqrt(d)
            Rinv = (U / np.sqrt(d)).T @ Ls.T
            self.R.append(R)
            self.Rinv.append(Rinv)
            self.d.append(d)
            off += sd

    def lam(self) -> np.ndarray:
        """Scaled point: lambda = W^{-1} x = W s (diagonal in the PSD blocks)."""
        parts = [self.lam_lp]
        for p, d in zip(self.dims.psd, self.d):
            parts.append(svec_pack(np.diag(d)))
        return np.concatenate(parts) if parts else np.zeros(0)

    def mu(self) -> float:
        return (float(np.dot(self.lam_lp, self.lam_lp)) +
                sum(float(np.dot(d, d)) for d in self.d)) / max(self.dims.order, 1)

    # --- scaled-space maps ------------------------------------------------
    def scale_x(self, dx: np.ndarray) -> np.ndarray:
        """dx_bar = W^{-1}(dx): LP divide by w; PSD Rinv (.) Rinv'."""
        l = self.dims.nonneg
        out = [dx[:l] / self.w]
        off = l
        for p, sd, Rinv in zip(self.dims.psd, self.dims.svec_dims, self.Rinv):
            M = svec_unpack(dx[off:off + sd], p)
            out.append(svec_pack(Rinv @ M @ Rinv.T))
            off += sd
        return np.concatenate(out)

    def scale_s(self, ds: np.ndarray) -> np.ndarray:
        """ds_bar = W(ds): LP multiply by w; PSD R' (.) R."""
        l = self.dims.nonneg
        out = [ds[:l] * self.w]
        off = l
        for p, sd, R in zip(self.dims.psd, self.dims.svec_dims, self.R):
            M = svec_unpack(ds[off:off + sd], p)
            out.append(svec_pack(R.T @ M @ R))
            off += sd
        return np.concatenate(out)

    def unscale_x(self, dxb: np.ndarray) -> np.ndarray:
        """dx = W(dx_bar): LP multiply by w; PSD R (.) R'."""
        l = self.dims.nonneg
        out = [dxb[:l] * self.w]
        off = l
        for p, sd, R in zip(self.dims.psd, self.dims.svec_dims, self.R):
            M = svec_unpack(dxb[off:off + sd], p)
            out.append(svec_pack(R @ M @ R.T))
            off += sd
        return np.concatenate(out)

    def apply_w2(self, v: np.ndarray) -> np.ndarray:
        """W^2(v): LP multiply by w^2; PSD W (.) W with W = R R'."""
        l = self.dims.nonneg
        out = [v[:l] * self.w ** 2]
        off = l
        for p, sd, R in zip(self.dims.psd, self.dims.svec_dims, self.R):
            M = svec_unpack(v[off:off + sd], p)
            W = R @ R.T
            out.append(svec_pack(W @ M @ W))
            off += sd
        return np.concatenate(out)

    # --- complementarity algebra in scaled space ---------------------------
    def solve_jordan(self, rhs: np.ndarray) -> np.ndarray:
        """Solve lam o z = rhs for z, with lam the (diagonal) scaled point."""
        l = self.dims.nonneg
        out = [rhs[:l] / self.lam_lp]
        off = l
        for p, sd, d in zip(self.dims.psd, self.dims.svec_dims, self.d):
            Mr = svec_unpack(rhs[off:off + sd], p)
            denom = 0.5 * (d[:, None] + d[None, :])
            out.append(svec_pack(Mr / denom))
            off += sd
        return np.concatenate(out)

    def jordan_product(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        l = self.dims.nonneg
        out = [u[:l] * v[:l]]
        off = l
        for p, sd in zip(self.dims.psd, self.dims.svec_dims):
            U = svec_unpack(u[off:off + sd], p)
            V = svec_unpack(v[off:off + sd], p)
            out.append(svec_pack(0.5 * (U @ V + V @ U)))
            off += sd
        return np.concatenate(out)

    def lam_sq(self) -> np.ndarray:
        parts = [self.lam_lp ** 2]
        for p, d in zip(self.dims.psd, self.d):
            parts.append(svec_pack(np.diag(d ** 2)))
        return np.concatenate(parts)

    def step_to_boundary(self, which: str, dbar: np.ndarray) -> float:
        """Largest alpha with lam + alpha*dbar staying in the cone (scaled space)."""
        l = self.dims.nonneg
        alpha = np.inf
        lp = dbar[:l]
        neg = lp < 0
        if neg.any():
            alpha = min(alpha, float(np.min(-self.lam_lp[neg] / lp[neg])))
        off = l
        for p, sd, d in zip(self.dims.psd, self.dims.svec_dims, self.d):
            M = svec_unpack(dbar[off:off + sd], p)
            T = M / np.sqrt(d)[:, None] / np.sqrt(d)[None, :]
            emin = float(np.linalg.eigvalsh(T)[0])
            if emin < 0:
                alpha = min(alpha, 1.0 / (-emin))
            off += sd
        return alpha


@dataclass
class SolverOptions:
    max_iters: int = 100
    tol: float = 1e-9
    step_frac: float = 0.99
    verbose: bool = False


def _identity_point(dims: ConeDims, scale: float = 1.0) -> np.ndarray:
    parts = [np.ones(dims.nonneg) * scale]
    for p in dims.psd:
        parts.append(svec_identity(p) * scale)
    return np.concatenate(parts)


def _min_cone_eig(dims: ConeDims, v: np.ndarray) -> float:
    l = dims.nonneg
    m = float(v[:l].min()) if l else np.inf
    off = l
    for p, sd in zip(dims.psd, dims.svec_dims):
        m = min(m, float(np.linalg.eigvalsh(svec_unpack(v[off:off + sd], p))[0]))
        off += sd
    return m


def _shift_into_cone(dims: ConeDims, v: np.ndarray, floor: float = 1.0) -> np.ndarray:
    """Add a multiple of the cone identity so the minimum eigenvalue is >= floor."""
    m = _min_cone_eig(dims, v)
    if m >= floor:
        return v
    return v + (floor - m) * _identity_point(dims)


class _Schur:
    """Forms and factors H = A' W^2 A, with the PSD columns pre-unpacked."""

    def __init__(self, A: np.ndarray, dims: ConeDims):
        self.A = A
        self.dims = dims
        l = dims.nonneg
        self.A_lp = A[:l, :]
        self.blocks: list[np.ndarray] = []  # (m, p, p) tensors
        off = l
        for p, sd in zip(dims.psd, dims.svec_dims):
            cols = A[off:off + sd, :].T  # (m, sd)
            self.blocks.append(svec_unpack(cols, p))
            off += sd

    def factor(self, sc: _Scaling) -> np.ndarray:
        m = self.A.shape[1]
        H = np.zeros((m, m))
        if self.dims.nonneg:
            B = self.A_lp * (sc.w ** 2)[:, None]
            H += self.A_lp.T @ B
        for T, R in zip(self.blocks, sc.R):
            # H_jk = <R' A_j R, R' A_k R>
            Tt = np.matmul(np.matmul(R.T, T), R)
            U = svec_pack(Tt)
            H += U @ U.T
        return H


def _chol_solve(H: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    jitter = 0.0
    base = float(np.mean(np.diag(H))) if H.shape[0] else 1.0
    for _ in range(6):
        try:
            L = np.linalg.cholesky(H + jitter * np.eye(H.shape[0]))
            z = np.linalg.solve(L, rhs)
            return np.linalg.solve(L.T, z)
        except np.linalg.LinAlgError:
            jitter = max(base * 1e-14, jitter * 100 if jitter else base * 1e-14)
    # fall back to least squares on numerically tough systems
    return np.linalg.lstsq(H, rhs, rcond=None)[0]


def solve_conic(
    A: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    dims: ConeDims,
    opts: SolverOptions | None = None,
    init_scale: float = 1.0,
) -> ConicResult:
    """Solve max b'y s.t. c - A y in K (and its primal partner)."""
    opts = opts or SolverOptions()
    A = np.ascontiguousarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    n, m = A.shape
    if dims.total != n:
        raise ValueError(f"cone dims total {dims.total} != rows of A {n}")
    if b.shape != (m,) or c.shape != (n,):
        raise ValueError("b/c shapes do not match A")

    schur = _Schur(A, dims)
    # least-squares start shifted into the cone: keeps the initial residuals
    # commensurate with the complementarity scale
    y = np.linalg.lstsq(A, c, rcond=None)[0]
    s = _shift_into_cone(dims, c - A @ y, floor=init_scale)
    x = _shift_into_cone(dims, np.linalg.lstsq(A.T, b, rcond=None)[0], floor=init_scale)

    bnorm = 1.0 + float(np.linalg.norm(b))
    cnorm = 1.0 + float(np.linalg.norm(c))
    best = None

    for it in range(1, opts.max_iters + 1):
        rx = A.T @ x - b            # primal equality residual
        rs = A @ y + s - c          # dual residual
        gap = float(np.dot(x, s))
        pobj = float(np.dot(c, x))
        dobj = float(np.dot(b, y))
        pres = float(np.linalg.norm(rx)) / bnorm
        dres = float(np.linalg.norm(rs)) / cnorm
        relgap = gap / max(1.0, abs(pobj), abs(dobj))
        if not all(map(np.isfinite, (gap, pobj, dobj, pres, dres))):
            if best is not None:
                best.status = "numerical"
                return best
            return ConicResult("numerical", y, x, s, dobj, it - 1,
                               float("inf"), float("inf"), float("inf"))

        snapshot = ConicResult("running", y.copy(), x.copy(), s.copy(), dobj,
                               it - 1, pres, dres, relgap)
        if best is None or max(pres, dres, relgap) < max(
                best.primal_residual, best.dual_residual, best.rel_gap):
            best = snapshot
        if opts.verbose:
            print(f"  it {it:3d}  pres {pres:9.2e}  dres {dres:9.2e}  "
                  f"gap {relgap:9.2e}  obj {dobj:+.9e}")
        if pres <= opts.tol and dres <= opts.tol and relgap <= opts.tol:
            return ConicResult("optimal", y, x, s, dobj, it - 1, pres, dres, relgap)

        try:
            sc = _Scaling(dims, x, s)
            mu = sc.mu()
            H = schur.factor(sc)
        except (np.linalg.LinAlgError, FloatingPointError):
            best.status = "numerical"
            return best

        def newton(dtarget: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
            # A' W^2 A dy = -rx - A' W(dtarget_unscaled) - A' W^2 rs
            wd = sc.unscale_x(dtarget)
            rhs = -rx - A.T @ wd - A.T @ sc.apply_w2(rs)
            dy = _chol_solve(H, rhs)
            dy += _chol_solve(H, rhs - H @ dy)  # one round of refinement
            ds = -rs - A @ dy
            dx = wd - sc.apply_w2(ds)
            return dx, dy, ds

        lam_sq = sc.lam_sq()

        try:
            # predictor
            d_aff = sc.solve_jordan(-lam_sq)
            dx_a, dy_a, ds_a = newton(d_aff)
            dxb_a = sc.scale_x(dx_a)
            dsb_a = sc.scale_s(ds_a)
            ap = sc.step_to_boundary("x", dxb_a)
            ad = sc.step_to_boundary("s", dsb_a)
            a_aff = min(1.0, ap, ad)
            mu_aff = float(np.dot(x + a_aff * dx_a, s + a_aff * ds_a)) / max(dims.order, 1)
            sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3

            # corrector
            e = _identity_point(dims)
            corr = sc.jordan_product(dxb_a, dsb_a)
            d_comb = sc.solve_jordan(sigma * mu * e - lam_sq - corr)
            dx, dy, ds = newton(d_comb)
            dxb = sc.scale_x(dx)
            dsb = sc.scale_s(ds)
            ap = sc.step_to_boundary("x", dxb)
            ad = sc.step_to_boundary("s", dsb)
        except (np.linalg.LinAlgError, FloatingPointError):
            best.status = "numerical"
            return best
        alpha_p = min(1.0, opts.step_frac * ap)
        alpha_d = min(1.0, opts.step_frac * ad)
        if min(alpha_p, alpha_d) <= 1e-14:
            best.status = "numerical"
            return best
        x = x + alpha_p * dx
        y = y + alpha_d * dy
        s = s + alpha_d * ds

    rx = A.T @ x - b
    rs = A @ y + s - c
    gap = float(np.dot(x, s))
    pres = float(np.linalg.norm(rx)) / bnorm
    dres = float(np.linalg.norm(rs)) / cnorm
    relgap = gap / max(1.0, abs(float(np.dot(c, x))), abs(float(np.dot(b, y))))
    return ConicResult("max_iters", y, x, s, float(np.dot(b, y)),
                       opts.max_iters, pres, dres, relgap)
