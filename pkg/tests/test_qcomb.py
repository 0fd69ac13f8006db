"""Coefficient-family identities, exercised exactly over the stated grid.

The recurrence / symmetry / inversion suite runs every identity for
1 <= L <= LMAX with A, B ranging over [-L-2, L+2], at scale 2, so the
half-integer-exponent shifts q^(L-A) etc. stay in x-units.
"""

import pytest
from fractions import Fraction

from qrr.qpoly import QPolynomial
from qrr.qcomb import (QMonomial, gauss, qfac, tauzero, tone, trb,
                       trinomial, tsmall0, tsmall1, tzero, ufun, vfun)

LMAX = 12
S = 2          # ambient scale for the grid suite
M = 2          # x-units per power of q at scale 2


def qp(e_abs: int) -> QPolynomial:
    """q^e_abs as a scale-2 monomial (e_abs counted in plain q units)."""
    return QPolynomial({e_abs * M: 1}, S)


def sh(p: QPolynomial, qexp: int) -> QPolynomial:
    """p * q^qexp at scale 2; qexp may be negative."""
    return p.shift(qexp * M)


def A_range(L):
    return range(-L - 2, L + 3)


class TestQFactorial:
    def test_empty_product(self):
        assert qfac(QMonomial(1, Fraction(1)), 1, 0) == QPolynomial.one()

    def test_expansion(self):
        got = qfac(QMonomial(1, Fraction(1)), 1, 3)
        assert got == QPolynomial({0: 1, 1: -1, 2: -1, 4: 1, 5: 1, 6: -1})

    def test_negative_argument(self):
        got = qfac(QMonomial(-1, Fraction(1)), 2, 2)
        assert got == QPolynomial({0: 1, 1: 1, 3: 1, 4: 1})

    def test_negative_n_rejected(self):
        with pytest.raises(ValueError):
            qfac(QMonomial(1, Fraction(1)), 1, -1)


class TestGauss:
    def test_4_choose_2(self):
        assert gauss(4, 2) == QPolynomial({0: 1, 1: 1, 2: 2, 3: 1, 4: 1})

    def test_out_of_range_zero(self):
        assert gauss(3, 5).is_zero()
        assert gauss(3, -1).is_zero()

    def test_b_zero(self):
        for a in range(0, 8):
            assert gauss(a, 0) == QPolynomial.one()

    def test_degree_formula(self):
        for a in range(1, 10):
            for b in range(0, a + 1):
                assert gauss(a, b).degree() == b * (a - b)

    def test_symmetry(self):
        for a in range(1, LMAX + 1):
            for b in range(-2, a + 3):
                assert gauss(a, b) == gauss(a, a - b)

    def test_pascal_q_analogs(self):
        for a in range(1, LMAX + 1):
            for b in range(0, a + 1):
                g = gauss(a, b, 1, S)
                assert g == gauss(a - 1, b, 1, S) + sh(gauss(a - 1, b - 1, 1, S), a - b)
                assert g == gauss(a - 1, b - 1, 1, S) + sh(gauss(a - 1, b, 1, S), b)

    def test_inversion(self):
        # [A,B]_{1/q} = q^(B(B-A)) [A,B]_q, via exponent negation
        for a in range(1, LMAX + 1):
            for b in range(0, a + 1):
                g = gauss(a, b, 1, S)
                assert g.invert_q() == sh(g, b * (b - a))

    def test_base_and_scale(self):
        g = gauss(4, 2, 2)           # base q^2, scale 1
        assert g == QPolynomial({0: 1, 2: 1, 4: 2, 6: 1, 8: 1})
        h = gauss(4, 2, Fraction(1, 2), 2)   # base sqrt(q), scale 2
        assert h.terms == {0: 1, 1: 1, 2: 2, 3: 1, 4: 1} and h.scale == 2


class TestTrinomialValues:
    def test_trb_L0(self):
        assert trb(0, 3, 0) == QPolynomial.one()
        assert trb(0, 3, 1).is_zero()
        assert trb(0, 3, -2).is_zero()

    def test_trb_2_1_1(self):
        assert trb(2, 1, 1) == QPolynomial({0: 1, 1: 1})

    def test_tzero_hand_values(self):
        assert tzero(1, 0) == QPolynomial({1: 1})
        assert tzero(1, 1) == QPolynomial.one()

    def test_tone_hand_value(self):
        assert tone(1, 0) == QPolynomial.one()

    def test_ufun_hand_values(self):
        assert ufun(1, 0) == QPolynomial({0: 1, 1: 1})
        assert ufun(0, 0) == QPolynomial.one()
        for L in range(0, 6):
            assert ufun(L, L + 1).is_zero() or L == 0  # A > L kills both pieces
        assert ufun(3, 4).is_zero()

    def test_vfun_hand_values(self):
        assert vfun(1, 1) == QPolynomial.one()
        assert vfun(2, 1) == QPolynomial({0: 1, 2: 1})

    def test_vfun_L0_rejected(self):
        with pytest.raises(ValueError):
            vfun(0, 0)

    def test_negative_L_rejected(self):
        with pytest.raises(ValueError):
            tzero(-1, 0)

    def test_q_to_1_collapse(self):
        for L in range(0, 11):
            for A in range(-L - 1, L + 2):
                for B in (-1, 0, 2):
                    assert trb(L, B, A).eval_at_one() == trinomial(L, A)


class TestTrinomialRecurrences:
    """The Pascal-analog recurrences, checked exactly on the grid."""

    def test_ET1(self):
        for L in range(1, LMAX + 1):
            for A in A_range(L):
                lhs = tone(L, A, 1, S)
                rhs = (tone(L - 1, A, 1, S)
                       + sh(tzero(L - 1, A + 1, 1, S), L + A)
                       + sh(tzero(L - 1, A - 1, 1, S), L - A))
                assert lhs == rhs, (L, A)

    def test_ET0(self):
        for L in range(1, LMAX + 1):
            for A in A_range(L):
                lhs = tzero(L, A, 1, S)
                rhs = (tzero(L - 1, A - 1, 1, S)
                       + sh(tone(L - 1, A, 1, S), L + A)
                       + sh(tzero(L - 1, A + 1, 1, S), 2 * L + 2 * A))
                assert lhs == rhs, (L, A)

    def test_ETrb1(self):
        for L in range(1, LMAX + 1):
            for A in A_range(L):
                lhs = trb(L, A - 1, A, 1, S)
                rhs = (sh(trb(L - 1, A - 1, A, 1, S), L - 1)
                       + sh(trb(L - 1, A + 1, A + 1, 1, S), A)
                       + trb(L - 1, A - 1, A - 1, 1, S))
                assert lhs == rhs, (L, A)

    def test_ETrb0(self):
        for L in range(1, LMAX + 1):
            for A in A_range(L):
                lhs = trb(L, A, A, 1, S)
                rhs = (sh(trb(L - 1, A - 1, A - 1, 1, S), L - A)
                       + sh(trb(L - 1, A - 1, A, 1, S), L - A - 1)
                       + trb(L - 1, A + 1, A + 1, 1, S))
                assert lhs == rhs, (L, A)

    def test_ETrb28(self):
        for L in range(1, LMAX + 1):
            for A in A_range(L):
                for B in A_range(L):
                    lhs = trb(L, B, A, 1, S)
                    rhs = (trb(L - 1, B, A, 1, S)
                           + sh(trb(L - 1, B, A + 1, 1, S), L - A - 1 + B)
                           + sh(trb(L - 1, B - 1, A - 1, 1, S), L - A))
                    assert lhs == rhs, (L, B, A)

    def test_ETrb29(self):
        for L in range(1, LMAX + 1):
            for A in A_range(L):
                for B in A_range(L):
                    lhs = trb(L, B, A, 1, S)
                    rhs = (trb(L - 1, B, A, 1, S)
                           + sh(trb(L - 1, B - 2, A - 1, 1, S), L - A)
                           + sh(trb(L - 1, B + 1, A + 1, 1, S), L + B))
                    assert lhs == rhs, (L, B, A)

    def test_E0_tautology(self):
        for L in range(1, LMAX + 1):
            for A in A_range(L):
                z = (tone(L, A, 1, S) - sh(tzero(L, A, 1, S), L - A)
                     - tone(L, A + 1, 1, S) + sh(tzero(L, A + 1, 1, S), L + A + 1))
                assert z.is_zero(), (L, A)

    def test_ETrb00_tautology(self):
        for L in range(1, LMAX + 1):
            for A in A_range(L):
                z = (trb(L, A, A, 1, S) + sh(trb(L, A, A + 1, 1, S), L)
                     - trb(L, A + 1, A + 1, 1, S) - sh(trb(L, A - 1, A, 1, S), L - A))
                assert z.is_zero(), (L, A)

    def test_U1(self):
        for L in range(1, LMAX + 1):
            for A in A_range(L):
                lhs = ufun(L, A, 1, S)
                rhs = (ufun(L - 1, A, 1, S) + sh(ufun(L - 1, A, 1, S), 2 * L - 1)
                       + sh(tone(L - 1, A - 1, 1, S), L - A)
                       + sh(tone(L - 1, A + 2, 1, S), L + A + 1))
                assert lhs == rhs, (L, A)

    def test_U0(self):
        for L in range(2, LMAX + 1):
            for A in A_range(L):
                lhs = ufun(L, A, 1, S)
                u1 = ufun(L - 1, A, 1, S)
                rhs = (u1 + sh(u1, 1) + sh(u1, 2 * L - 1)
                       - sh(ufun(L - 2, A, 1, S), 1)
                       + sh(tzero(L - 2, A - 2, 1, S), 2 * L - 2 * A)
                       + sh(tzero(L - 2, A + 3, 1, S), 2 * L + 2 * A + 2))
                assert lhs == rhs, (L, A)

    def test_V0(self):
        for L in range(2, LMAX + 1):
            for A in A_range(L):
                lhs = vfun(L, A, 1, S)
                v1 = vfun(L - 1, A, 1, S)
                rhs = (v1 + sh(v1, 2 * L - 2)
                       + sh(tzero(L - 2, A - 2, 1, S), L - A)
                       + sh(tzero(L - 2, A + 1, 1, S), L + A - 1))
                assert lhs == rhs, (L, A)


class TestTrinomialSymmetries:
    def test_T0sym_T1sym(self):
        for L in range(0, LMAX + 1):
            for A in A_range(L):
                assert tzero(L, A) == tzero(L, -A)
                assert tone(L, A) == tone(L, -A)

    def test_Trbsym(self):
        for L in range(0, LMAX + 1):
            for A in A_range(L):
                for B in A_range(L):
                    lhs = trb(L, B, -A, 1, S)
                    rhs = sh(trb(L, B + 2 * A, A, 1, S), A * (A + B))
                    assert lhs == rhs, (L, B, A)

    def test_Vsym(self):
        for L in range(1, LMAX + 1):
            for A in A_range(L):
                assert vfun(L + 1, A + 1, 1, S) == vfun(L + 1, -A, 1, S)


class TestTrinomialInterFamily:
    def test_tau0eq(self):
        for L in range(0, LMAX + 1):
            for A in A_range(L):
                assert trb(L, A, A) == tauzero(L, A)

    def test_T0inv(self):
        # T0(L,A;1/q) = q^(A^2-L^2) t0(L,A;q) = q^(A^2-L^2) tau0(L,A;q^2)
        for L in range(0, LMAX + 1):
            for A in A_range(L):
                lhs = tzero(L, A, 1, S).invert_q()
                assert lhs == sh(tsmall0(L, A, 1, S), A * A - L * L), (L, A)
                assert lhs == sh(tauzero(L, A, 2, S), A * A - L * L), (L, A)

    def test_T1inv(self):
        for L in range(0, LMAX + 1):
            for A in A_range(L):
                lhs = tone(L, A, 1, S).invert_q()
                assert lhs == sh(tsmall1(L, A, 1, S), A * A - L * L), (L, A)

    def test_tau0id(self):
        for L in range(0, LMAX + 1):
            for A in A_range(L):
                assert tauzero(L, A, 2, S) == trb(L, A, A, 2, S) == tsmall0(L, A, 1, S)

    def test_t1id(self):
        for L in range(0, LMAX + 1):
            for A in A_range(L):
                assert trb(L, A - 1, A, 2, S) == sh(tsmall1(L, A, 1, S), A - L), (L, A)
