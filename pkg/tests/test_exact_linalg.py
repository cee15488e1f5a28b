import random
from fractions import Fraction

import numpy as np
import pytest

from lscert.exact_linalg import (
    InRangeFailure,
    RatMatrix,
    RationalParseError,
    psd_check,
    quad_form,
    rat_from_decimal,
    rat_to_str,
    rref,
    solve_exact,
)


class TestParsing:
    def test_exact_decimal(self):
        assert rat_from_decimal("1.5") == Fraction(3, 2)

    def test_table_entry(self):
        assert rat_from_decimal("29.7") == Fraction(297, 10)

    def test_big_fraction_literal(self):
        q = rat_from_decimal("5370688140802311/2305843009213693952")
        assert q == Fraction(5370688140802311, 2305843009213693952)

    def test_signs(self):
        assert rat_from_decimal("-2.2") == Fraction(-11, 5)
        assert rat_from_decimal("+3/4") == Fraction(3, 4)

    def test_never_a_float(self):
        # 2.2 as a binary float is NOT 11/5
        assert rat_from_decimal("2.2") == Fraction(11, 5) != Fraction(2.2)

    @pytest.mark.parametrize("bad", ["", "1.2.3", "1/0", "1e3", "0x10", "3/-4", "a/b"])
    def test_malformed(self, bad):
        with pytest.raises(RationalParseError) as ei:
            rat_from_decimal(bad)
        assert repr(bad) in str(ei.value) or bad in str(ei.value)

    def test_round_trip_text(self):
        assert rat_to_str(Fraction(-7, 3)) == "-7/3"
        assert rat_to_str(Fraction(4)) == "4"


class TestPsdCheck:
    def test_identity(self):
        v = psd_check(RatMatrix.identity(3))
        assert v.is_psd and v.witness is None

    def test_hand_indefinite(self):
        M = RatMatrix.from_rows([[1, 2], [2, 1]])
        v = psd_check(M)
        assert not v.is_psd
        assert v.witness.value < 0
        assert quad_form(M, v.witness.vector) == v.witness.value
        # the canonical witness here is (1, -1) up to scaling
        assert quad_form(M, (Fraction(1), Fraction(-1))) == Fraction(-2)

    def test_zero_matrix(self):
        assert psd_check(RatMatrix.zeros(4)).is_psd

    def test_rank_deficient_psd(self):
        M = RatMatrix.from_rows([[1, 1], [1, 1]])
        v = psd_check(M)
        assert v.is_psd
        assert v.factorization.recompose() == M

    def test_zero_diagonal_nonzero_row(self):
        M = RatMatrix.from_rows([[0, 1], [1, 0]])
        v = psd_check(M)
        assert not v.is_psd
        assert v.witness.value < 0

    def test_negative_diagonal_after_elimination(self):
        M = RatMatrix.from_rows([[1, 2], [2, 1]])
        v = psd_check(M)
        assert v.witness.value == quad_form(M, v.witness.vector) < 0

    def test_requires_symmetry(self):
        with pytest.raises(ValueError):
            psd_check(RatMatrix.from_rows([[1, 2], [0, 1]]))

    def test_recomposition_round_trip(self):
        rng = random.Random(7)
        for _ in range(20):
            n = rng.randrange(1, 6)
            H = [[Fraction(rng.randrange(-3, 4)) for _ in range(n)] for _ in range(n)]
            Hm = RatMatrix.from_rows(H)
            M = Hm.transpose() @ Hm  # PSD by construction
            v = psd_check(M)
            assert v.is_psd
            assert v.factorization.recompose() == M
            d = v.factorization.diag
            assert all(x >= 0 for x in d)

    def test_fuzz_against_float_eigenvalues(self):
        rng = random.Random(20240817)
        checked = 0
        while checked < 25:
            n = 10
            sym = [[Fraction(rng.randrange(-20, 21), rng.randrange(1, 8)) for _ in range(n)]
                   for _ in range(n)]
            for i in range(n):
                for j in range(i):
                    sym[i][j] = sym[j][i]
            M = RatMatrix.from_rows(sym)
            eigs = np.linalg.eigvalsh(np.array([[float(x) for x in row] for row in sym]))
            if min(abs(e) for e in eigs) < 1e-6:
                continue  # spectrum too close to zero to trust float signs
            checked += 1
            assert psd_check(M).is_psd == bool(eigs.min() > 0)


class TestSolveExact:
    def test_identity(self):
        x = solve_exact(RatMatrix.identity(2), (Fraction(1), Fraction(2)))
        assert x == (Fraction(1), Fraction(2))

    def test_zero_zero(self):
        x = solve_exact(RatMatrix.zeros(3), (Fraction(0),) * 3)
        assert x == (Fraction(0),) * 3

    def test_zero_matrix_infeasible(self):
        out = solve_exact(RatMatrix.zeros(1), (Fraction(1),))
        assert isinstance(out, InRangeFailure)

    def test_singular_consistent(self):
        M = RatMatrix.from_rows([[1, 1], [1, 1]])
        b = (Fraction(2), Fraction(2))
        x = solve_exact(M, b)
        assert M.matvec(x) == b

    def test_singular_inconsistent(self):
        M = RatMatrix.from_rows([[1, 1], [1, 1]])
        assert isinstance(solve_exact(M, (Fraction(1), Fraction(0))), InRangeFailure)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            solve_exact(RatMatrix.identity(2), (Fraction(1),))

    def test_random_solutions_are_exact(self):
        rng = random.Random(3)
        for _ in range(15):
            n = rng.randrange(1, 6)
            H = RatMatrix.from_rows(
                [[Fraction(rng.randrange(-4, 5)) for _ in range(n)] for _ in range(n)])
            M = H.transpose() @ H
            z = tuple(Fraction(rng.randrange(-3, 4)) for _ in range(n))
            b = M.matvec(z)
            x = solve_exact(M, b)
            assert not isinstance(x, InRangeFailure)
            assert M.matvec(x) == b


class TestRref:
    def test_identity(self):
        R, piv = rref(RatMatrix.identity(3))
        assert R == RatMatrix.identity(3)
        assert piv == (0, 1, 2)

    def test_rank_one(self):
        R, piv = rref(RatMatrix.from_rows([[1, 1], [2, 2]]))
        assert R == RatMatrix.from_rows([[1, 1], [0, 0]])
        assert piv == (0,)

    def test_zero(self):
        R, piv = rref(RatMatrix.zeros(2, 3))
        assert R == RatMatrix.zeros(2, 3)
        assert piv == ()

    def test_pivots_strictly_increasing(self):
        rng = random.Random(11)
        for _ in range(20):
            m, n = rng.randrange(1, 5), rng.randrange(1, 6)
            A = RatMatrix.from_rows(
                [[Fraction(rng.randrange(-3, 4)) for _ in range(n)] for _ in range(m)])
            _, piv = rref(A)
            assert list(piv) == sorted(set(piv))


def test_fractions_always_reduced():
    # every operation stores reduced fractions with positive denominators
    M = RatMatrix.from_rows([["2/4", "0.50"], ["-6/8", "1.25"]])
    for i in range(2):
        for j in range(2):
            q = M.entry(i, j)
            assert q.denominator > 0
            from math import gcd
            assert gcd(abs(q.numerator), q.denominator) == 1
