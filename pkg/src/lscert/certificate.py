"""Certificates that a cyclic stepsize pattern contracts the objective gap.

A certificate is a multiplier pair (lambda, gamma) together with the gap cap
Delta and a slack eps. Membership in the certificate set is decided in exact
rational arithmetic; a passing certificate proves the eps-relaxed descent
guarantee for every normalized initial gap in [0, Delta].
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .exact_linalg import (
    InRangeFailure,
    PsdVerdict,
    RatMatrix,
    RationalParseError,
    dot,
    psd_check,
    rat_from_decimal,
    rat_to_str,
    solve_exact,
)
from .pep_builder import (
    STAR,
    StepsizePattern,
    assemble_Z,
    bordered,
    index_set,
    m_vec,
    M_mat,
    mat_pos,
    sum_a,
)


class CertificateError(ValueError):
    """Structural problem with a certificate (dimensions, ranges, file schema)."""


class PreconditionError(CertificateError):
    """An operation's stated precondition is violated."""


@dataclass(frozen=True)
class Infeasible:
    """No finite eps makes this multiplier pair a member of the certificate set."""
    reason: str


def _require_zero_diagonal(mat: RatMatrix, name: str) -> None:
    for i in range(mat.rows):
        if mat.entry(i, i) != 0:
            raise CertificateError(f"{name} must have a zero diagonal; entry ({i},{i}) is "
                                   f"{rat_to_str(mat.entry(i, i))}")


@dataclass(frozen=True)
class Certificate:
    pattern: StepsizePattern
    Delta: Fraction
    epsilon: Fraction
    lam: RatMatrix
    gam: RatMatrix

    def __post_init__(self):
        dim = self.pattern.t + 2
        for name, mat in (("lambda", self.lam), ("gamma", self.gam)):
            if mat.rows != dim or mat.cols != dim:
                raise CertificateError(
                    f"{name} must be {dim}x{dim} for t={self.pattern.t}, "
                    f"got {mat.rows}x{mat.cols}")
            _require_zero_diagonal(mat, name)
        if not (0 < self.Delta <= Fraction(1, 2)):
            raise CertificateError(f"Delta={rat_to_str(self.Delta)} outside (0, 1/2]")
        if self.epsilon < 0:
            raise CertificateError(f"epsilon={rat_to_str(self.epsilon)} must be nonnegative")

    @property
    def t(self) -> int:
        return self.pattern.t


@dataclass(frozen=True)
class EqualityVerdict:
    ok: bool
    residual: tuple[Fraction, ...]  # exact LHS - RHS, reported as a vector


@dataclass(frozen=True)
class NonnegVerdict:
    ok: bool
    violations: tuple[tuple[str, str, Fraction], ...]  # (i, j, offending value)


@dataclass(frozen=True)
class PsdConditionVerdict:
    ok: bool
    verdict: PsdVerdict


@dataclass(frozen=True)
class MembershipReport:
    """Exact verdicts for every condition defining the certificate set."""
    eq_lambda: EqualityVerdict
    eq_gamma: EqualityVerdict
    m_lambda_zero: EqualityVerdict
    lambda_nonneg: NonnegVerdict
    lambda_plus_delta_gamma_nonneg: NonnegVerdict
    psd_at_zero: PsdConditionVerdict
    psd_at_delta: PsdConditionVerdict

    @property
    def overall(self) -> bool:
        return (self.eq_lambda.ok and self.eq_gamma.ok and self.m_lambda_zero.ok
                and self.lambda_nonneg.ok and self.lambda_plus_delta_gamma_nonneg.ok
                and self.psd_at_zero.ok and self.psd_at_delta.ok)

    def condition_flags(self) -> dict[str, bool]:
        return {
            "eq_lambda": self.eq_lambda.ok,
            "eq_gamma": self.eq_gamma.ok,
            "m_lambda_zero": self.m_lambda_zero.ok,
            "lambda_nonneg": self.lambda_nonneg.ok,
            "lambda_plus_delta_gamma_nonneg": self.lambda_plus_delta_gamma_nonneg.ok,
            "psd_at_zero": self.psd_at_zero.ok,
            "psd_at_delta": self.psd_at_delta.ok,
        }

    def failed_conditions(self) -> list[str]:
        return [k for k, v in self.condition_flags().items() if not v]


def _label(idx) -> str:
    return "*" if idx == STAR else str(idx)


def delta_cap(pattern: StepsizePattern) -> Fraction:
    """Largest Delta the verifier accepts: the fixed multiplier on the initial
    gap, 1 - 2 sum(h) delta, must stay nonnegative on [0, Delta]."""
    return min(Fraction(1, 2), 1 / (2 * pattern.sum_h))


def _check_delta_precondition(cert: Certificate, allow_large_delta: bool) -> None:
    cap = 1 / (2 * cert.pattern.sum_h)
    if cert.Delta > cap and not allow_large_delta:
        raise PreconditionError(
            f"Delta={rat_to_str(cert.Delta)} exceeds 1/(2*sum(h))={rat_to_str(cap)}; "
            "pass allow_large_delta=True to experiment beyond the supported range")


def _rhs_lambda(t: int) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * (t + 1)
    out[t] += 1   # a_{*,t}
    out[0] -= 1   # -a_{*,0}
    return tuple(out)


def _rhs_gamma(pattern: StepsizePattern) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * (pattern.t + 1)
    out[0] = 2 * pattern.sum_h
    return tuple(out)


def _equality_verdict(lhs: Sequence[Fraction], rhs: Sequence[Fraction]) -> EqualityVerdict:
    residual = tuple(a - b for a, b in zip(lhs, rhs))
    return EqualityVerdict(all(v == 0 for v in residual), residual)


def _nonneg_verdict(mat: RatMatrix, t: int) -> NonnegVerdict:
    bad = []
    for i in index_set(t):
        for j in index_set(t):
            if i == j:
                continue
            v = mat.entry(mat_pos(i, t), mat_pos(j, t))
            if v < 0:
                bad.append((_label(i), _label(j), v))
    return NonnegVerdict(not bad, tuple(bad))


def psd_blocks(cert: Certificate) -> tuple[RatMatrix, RatMatrix]:
    """The two bordered matrices whose positive semidefiniteness is required."""
    h = cert.pattern
    corner = sum((hi + cert.epsilon for hi in h.h), Fraction(0))
    mg = m_vec(h, cert.gam)
    M0 = M_mat(h, cert.lam)
    MD = M_mat(h, cert.lam + cert.gam.scale(cert.Delta))
    return bordered(corner, mg, M0), bordered(corner, mg, MD)


def check_membership(cert: Certificate, *, allow_large_delta: bool = False) -> MembershipReport:
    """Decide membership of (lambda, gamma) in the certificate set, exactly.

    overall=True proves the pattern is epsilon-straightforward with
    parameter Delta: the worst-case gap after one pattern application is at
    most delta - sum(h_i - eps) * delta^2 for every normalized initial gap
    delta in [0, Delta].
    """
    _check_delta_precondition(cert, allow_large_delta)
    h = cert.pattern
    t = h.t
    eq_l = _equality_verdict(sum_a(h, cert.lam), _rhs_lambda(t))
    eq_g = _equality_verdict(sum_a(h, cert.gam), _rhs_gamma(h))
    m_l = _equality_verdict(m_vec(h, cert.lam), (Fraction(0),) * (t + 1))
    nn_l = _nonneg_verdict(cert.lam, t)
    nn_ld = _nonneg_verdict(cert.lam + cert.gam.scale(cert.Delta), t)
    X0, XD = psd_blocks(cert)
    p0 = psd_check(X0)
    pD = psd_check(XD)
    return MembershipReport(
        eq_lambda=eq_l,
        eq_gamma=eq_g,
        m_lambda_zero=m_l,
        lambda_nonneg=nn_l,
        lambda_plus_delta_gamma_nonneg=nn_ld,
        psd_at_zero=PsdConditionVerdict(p0.is_psd, p0),
        psd_at_delta=PsdConditionVerdict(pD.is_psd, pD),
    )


def check_pointwise(cert: Certificate, delta: Fraction) -> bool:
    """Verify lambda + delta*gamma lies in the single-gap dual feasibility set.

    This cross-checks the interval certificate at one gap level by assembling
    the full dual slack matrix directly.
    """
    if not (0 <= delta <= cert.Delta):
        raise PreconditionError(
            f"delta={rat_to_str(delta)} outside [0, Delta={rat_to_str(cert.Delta)}]")
    h = cert.pattern
    lam_d = cert.lam + cert.gam.scale(delta)
    # multiplier equality at this gap level
    rhs = list(_rhs_lambda(h.t))
    rhs[0] = -(1 - 2 * h.sum_h * delta)
    rhs[h.t] = Fraction(1)
    if sum_a(h, lam_d) != tuple(rhs):
        return False
    if not _nonneg_verdict(lam_d, h.t).ok:
        return False
    Z = assemble_Z(h, cert.epsilon, lam_d, delta)
    return psd_check(Z).is_psd


def minimal_epsilon(
    pattern: StepsizePattern,
    Delta: Fraction,
    lam: RatMatrix,
    gam: RatMatrix,
    *,
    check_preconditions: bool = True,
) -> Fraction | Infeasible:
    """Smallest eps for which (lambda, gamma) certifies the pattern at this Delta.

    Schur complement of the corner in the two bordered blocks:
        eps_min = max(m' M0^+ m, m' MD^+ m) / t - avg(h),
    valid whenever m lies in the range of both trailing blocks and both are
    PSD; otherwise no finite eps works and Infeasible is returned.
    """
    if check_preconditions:
        probe = Certificate(pattern, Delta, Fraction(0), lam, gam)
        rep = check_membership(probe)
        failures = [c for c in rep.failed_conditions() if not c.startswith("psd")]
        if failures:
            raise PreconditionError(
                "minimal_epsilon requires the equality and nonnegativity conditions; "
                "failing: " + ", ".join(failures))
    h = pattern
    m = m_vec(h, gam)
    values = []
    for name, M in (("trailing block at 0", M_mat(h, lam)),
                    ("trailing block at Delta", M_mat(h, lam + gam.scale(Delta)))):
        if not psd_check(M).is_psd:
            return Infeasible(f"{name} is not positive semidefinite")
        x = solve_exact(M, m)
        if isinstance(x, InRangeFailure):
            return Infeasible(f"m(gamma) is outside the range of the {name}")
        values.append(dot(m, x))
    return max(values) / h.t - h.avg_h


@dataclass(frozen=True)
class GuaranteeStatement:
    """Everything needed to quote the certified rate: gap shrinks per pattern
    application by at least sum(h_i - eps)/LD^2 times the squared gap."""
    pattern: StepsizePattern
    avg_minus_eps: Fraction
    Delta: Fraction
    provenance: str  # hash of the certificate this was derived from

    @property
    def rate_coefficient(self) -> Fraction:
        return self.avg_minus_eps


def certificate_digest(cert: Certificate) -> str:
    return hashlib.sha256(
        json.dumps(_cert_to_obj(cert), sort_keys=True).encode()).hexdigest()


def guarantee_of(cert: Certificate, report: MembershipReport) -> GuaranteeStatement:
    if not report.overall:
        raise PreconditionError(
            "refusing to state a guarantee for an unverified certificate; failing "
            "conditions: " + ", ".join(report.failed_conditions()))
    return GuaranteeStatement(
        pattern=cert.pattern,
        avg_minus_eps=cert.pattern.avg_h - cert.epsilon,
        Delta=cert.Delta,
        provenance=certificate_digest(cert),
    )


# ---------------------------------------------------------------------------
# serialization
#
# Schema: { "t": int, "h": [rational-string...], "delta": rational-string,
#           "epsilon": rational-string, "lambda": [[rational-string...]...],
#           "gamma": [[...]...] }
# rational-string is "p/q" or a decimal literal; matrices use the
# (*, 0, ..., t) row/column order.
# ---------------------------------------------------------------------------

def _cert_to_obj(cert: Certificate) -> dict:
    return {
        "t": cert.t,
        "h": [rat_to_str(v) for v in cert.pattern.h],
        "delta": rat_to_str(cert.Delta),
        "epsilon": rat_to_str(cert.epsilon),
        "lambda": [[rat_to_str(v) for v in cert.lam.row(i)] for i in range(cert.lam.rows)],
        "gamma": [[rat_to_str(v) for v in cert.gam.row(i)] for i in range(cert.gam.rows)],
    }


def _parse_rat(obj, where: str) -> Fraction:
    if not isinstance(obj, str):
        raise CertificateError(f"{where}: expected a rational string, got {obj!r}")
    try:
        return rat_from_decimal(obj)
    except RationalParseError as e:
        raise CertificateError(f"{where}: {e}") from None


def _parse_matrix(obj, dim: int, where: str) -> RatMatrix:
    if not isinstance(obj, list) or len(obj) != dim:
        got = len(obj) if isinstance(obj, list) else type(obj).__name__
        raise CertificateError(f"{where}: expected {dim} rows, got {got}")
    rows = []
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != dim:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise CertificateError(f"{where}[{i}]: expected {dim} entries, got {got}")
        rows.append([_parse_rat(v, f"{where}[{i}][{j}]") for j, v in enumerate(row)])
    return RatMatrix.from_rows(rows)


def certificate_from_obj(obj: dict, where: str = "certificate") -> Certificate:
    for key in ("t", "h", "delta", "epsilon", "lambda", "gamma"):
        if key not in obj:
            raise CertificateError(f"{where}: missing key {key!r}")
    t = obj["t"]
    if not isinstance(t, int) or t < 1:
        raise CertificateError(f"{where}.t: expected a positive integer, got {t!r}")
    hs = obj["h"]
    if not isinstance(hs, list) or len(hs) != t:
        raise CertificateError(f"{where}.h: expected {t} stepsizes, got "
                               f"{len(hs) if isinstance(hs, list) else hs!r}")
    pattern = StepsizePattern(tuple(_parse_rat(v, f"{where}.h[{i}]") for i, v in enumerate(hs)))
    try:
        return Certificate(
            pattern=pattern,
            Delta=_parse_rat(obj["delta"], f"{where}.delta"),
            epsilon=_parse_rat(obj["epsilon"], f"{where}.epsilon"),
            lam=_parse_matrix(obj["lambda"], t + 2, f"{where}.lambda"),
            gam=_parse_matrix(obj["gamma"], t + 2, f"{where}.gamma"),
        )
    except CertificateError:
        raise
    except ValueError as e:
        raise CertificateError(f"{where}: {e}") from None


def load_certificate(path: str | Path) -> Certificate:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise CertificateError(f"{path}: not valid JSON ({e})") from None
    if not isinstance(obj, dict):
        raise CertificateError(f"{path}: expected a JSON object at top level")
    return certificate_from_obj(obj, where=str(path))


def save_certificate(cert: Certificate, path: str | Path) -> None:
    Path(path).write_text(json.dumps(_cert_to_obj(cert), indent=1) + "\n")
