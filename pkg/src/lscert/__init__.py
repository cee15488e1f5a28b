"""Certificates, rate guarantees, and experiments for long-step gradient descent."""

from .exact_linalg import (
    RatMatrix,
    Rational,
    PsdVerdict,
    InRangeFailure,
    psd_check,
    rat_from_decimal,
    rat_to_str,
    rref,
    solve_exact,
)
from .pep_builder import (
    STAR,
    StepsizePattern,
    ZBlocks,
    assemble_Z,
    block_split,
    build_basis,
    build_pep_data,
)
from .certificate import (
    Certificate,
    GuaranteeStatement,
    Infeasible,
    MembershipReport,
    check_membership,
    check_pointwise,
    guarantee_of,
    load_certificate,
    minimal_epsilon,
    save_certificate,
)
from .rates import GrowthSpec, ProblemScale, RateGuarantee, bound_at, compute_sbar, holder_bound
from .gd_lab import SmoothProblem, TrajectoryRecord, gen_least_squares, one_d_worstcase, run_gd
from .sdp_search import FloatCertificate, SolveOptions, evaluate_primal, generate, round_to_exact, solve_approx

__version__ = "0.1.0"
