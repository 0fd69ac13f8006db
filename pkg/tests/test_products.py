"""Products, classical identities, and the stabilization limit checks."""

from fractions import Fraction

import pytest

from qrr.products import (PochFactor, ProductComponent, ProductExpr,
                          bailey_check, eval_product_expr, fjtp_check,
                          heine_check, jtp_check, limit_check, poch_inf,
                          qbt_checks, quintuple_check, stabilization_depth)
from qrr.qpoly import QPolynomial, TruncatedSeries


def distinct_parts_count(n: int) -> int:
    """DP oracle: number of partitions of n into distinct parts."""
    ways = [1] + [0] * n
    for part in range(1, n + 1):
        for total in range(n, part - 1, -1):
            ways[total] += ways[total - part]
    return ways[n]


class TestPochInf:
    def test_distinct_parts_series(self):
        s = poch_inf(-1, 1, 1, 20)
        for m in range(0, 21):
            assert s.terms.get(m, 0) == distinct_parts_count(m), m

    def test_pentagonal_prefix(self):
        s = poch_inf(1, 1, 1, 3)
        assert s.terms == {0: 1, 1: -1, 2: -1}

    def test_trunc_zero(self):
        assert poch_inf(-1, 1, 1, 0).terms == {0: 1}

    def test_bad_start_rejected(self):
        with pytest.raises(ValueError):
            poch_inf(1, 0, 1, 5)


class TestProductExpr:
    def test_distinct_parts_product(self):
        e = ProductExpr((ProductComponent(num=(PochFactor(-1, 1, 1),)),))
        s = eval_product_expr(e, 6)
        assert s.terms == {0: 1, 1: 1, 2: 1, 3: 2, 4: 2, 5: 3, 6: 4}

    def test_empty_sum(self):
        assert eval_product_expr(ProductExpr(()), 5).is_zero()

    def test_mod4_quotient_equals_even_distinct(self):
        # (q, q^3, q^4; q^4) / (q; q) == prod (1 + q^(2j))
        lhs = ProductExpr((ProductComponent(
            num=(PochFactor(1, 1, 4), PochFactor(1, 3, 4), PochFactor(1, 4, 4)),
            den=(PochFactor(1, 1, 1),)),))
        rhs = ProductExpr((ProductComponent(num=(PochFactor(-1, 2, 2),)),))
        assert eval_product_expr(lhs, 8) == eval_product_expr(rhs, 8)

    def test_two_component_sum_with_shift(self):
        # (1/(q;q) - 1/(q;q)) == 0; and a shifted copy moves the series
        c = ProductComponent(den=(PochFactor(1, 1, 1),))
        zero = eval_product_expr(ProductExpr((c, ProductComponent(
            coeff=Fraction(-1), den=(PochFactor(1, 1, 1),)))), 10)
        assert zero.is_zero()
        shifted = eval_product_expr(ProductExpr((ProductComponent(
            qshift=Fraction(2), den=(PochFactor(1, 1, 1),)),)), 10)
        assert shifted.terms[2] == 1 and 0 not in shifted.terms


class TestClassical:
    def test_jtp(self):
        assert jtp_check(30, 5).passed

    def test_jtp_degenerate(self):
        assert jtp_check(0, 1).passed

    def test_fjtp_small(self):
        # n = 1: both sides 1 + zq + z^-1 q + q^2
        assert fjtp_check(0).passed
        assert fjtp_check(1).passed

    def test_fjtp_full(self):
        for n in range(2, 9):
            assert fjtp_check(n).passed, n

    def test_quintuple(self):
        assert quintuple_check(25, 4).passed
        assert quintuple_check(0, 1).passed

    def test_bailey(self):
        assert bailey_check(25, 4).passed
        assert bailey_check(0, 1).passed

    def test_acceptance_truncations(self):
        assert jtp_check(30, 5).passed
        assert quintuple_check(30, 5).passed
        assert bailey_check(30, 5).passed


class TestQBT:
    def test_all(self):
        reports = qbt_checks(20, 12)
        for r in reports:
            assert r.passed, r.to_text()

    def test_qbc1_j2_by_hand(self):
        # sum_k [2,k] (-1)^k q^C(k,2) t^k = (t;q)_2 = 1 - t - tq + t^2 q
        from qrr.qcomb import gauss
        terms = {}
        for k in range(3):
            g = gauss(2, k)
            for e, c in g.terms.items():
                terms[(k, e + k * (k - 1) // 2)] = terms.get((k, e), 0) + ((-1) ** k) * c
        assert terms == {(0, 0): 1, (1, 0): -1, (1, 1): -1, (2, 1): 1}


class TestHeine:
    def test_variant1_collapse(self):
        # c = b collapses the right side to (az;q)/(z;q): q-binomial theorem
        r = heine_check(1, (1, 1), (1, 2), (1, 2), (1, 1), 15)
        assert r.passed

    def test_variant1(self):
        assert heine_check(1, (1, 1), (1, 1), (1, 2), (1, 1), 15).passed

    def test_variant2(self):
        assert heine_check(2, (1, 1), (1, 1), (1, 2), (1, 1), 15).passed

    def test_variant3(self):
        assert heine_check(3, (1, 1), (1, 1), (1, 2), (1, 1), 15).passed

    def test_negative_parameters(self):
        assert heine_check(1, (-1, 1), (1, 1), (1, 2), (1, 1), 12).passed
        assert heine_check(3, (1, 2), (-1, 1), (1, 3), (1, 2), 12).passed

    def test_invalid_parameterization(self):
        with pytest.raises(ValueError):
            heine_check(1, (1, 1), (1, 1), (1, 0), (1, 1), 10)


def PE(*comps):
    return ProductExpr(tuple(comps))


def C(coeff=1, qshift=0, num=(), den=()):
    return ProductComponent(Fraction(coeff), Fraction(qshift),
                            tuple(PochFactor(*f) for f in num),
                            tuple(PochFactor(*f) for f in den))


class TestLimits:
    def test_stabilization_depth(self):
        p1 = QPolynomial({0: 1, 1: 2, 5: 1})
        p2 = QPolynomial({0: 1, 1: 2, 4: 3})
        assert stabilization_depth(p1, p2) == 3

    def test_gauss_limit(self):
        target = PE(C(den=[(1, 1, 1)]))
        assert limit_check("gauss", target, 12, 12).passed

    def test_tone_limit(self):
        target = PE(C(num=[(-1, 2, 2)], den=[(1, 2, 2)]))
        assert limit_check("T1", target, 14, 12, A=0).passed

    def test_ufun_limit(self):
        target = PE(C(num=[(-1, 1, 2)], den=[(1, 2, 2)]))
        assert limit_check("U", target, 14, 12, A=0).passed

    def test_vfun_limit(self):
        target = PE(C(num=[(-1, 2, 2)], den=[(1, 2, 2)]))
        assert limit_check("V", target, 14, 12, A=1).passed

    def test_tau0_limit(self):
        target = PE(C(den=[(1, 1, 1)]))
        assert limit_check("tau0", target, 14, 12, A=0).passed
        assert limit_check("trbAA", target, 14, 12, A=1).passed

    def test_trb_A1A_limit(self):
        # T(L, A-1, A) -> (1 + q^A)/(q;q)
        target = PE(C(den=[(1, 1, 1)]), C(qshift=2, den=[(1, 1, 1)]))
        assert limit_check("trbA1A", target, 14, 12, A=2).passed

    def test_t0_limit(self):
        target = PE(C(den=[(1, 2, 2)]))
        assert limit_check("t0", target, 14, 12, A=0).passed

    def test_t1_shifted_limit(self):
        # q^-L t1(L, A) -> (q^-A + q^A)/(q^2;q^2)
        target = PE(C(qshift=-1, den=[(1, 2, 2)]), C(qshift=1, den=[(1, 2, 2)]))
        assert limit_check("t1q", target, 16, 12, A=1).passed

    def test_T0_parity_limits(self):
        # ((-q;q^2) +- (q;q^2)) / (2 (q^2;q^2))
        even = PE(C(Fraction(1, 2), num=[(-1, 1, 2)], den=[(1, 2, 2)]),
                  C(Fraction(1, 2), num=[(1, 1, 2)], den=[(1, 2, 2)]))
        odd = PE(C(Fraction(1, 2), num=[(-1, 1, 2)], den=[(1, 2, 2)]),
                 C(Fraction(-1, 2), num=[(1, 1, 2)], den=[(1, 2, 2)]))
        assert limit_check("T0even", even, 14, 12, A=0).passed
        assert limit_check("T0odd", odd, 14, 12, A=0).passed

    def test_failure_is_reported_with_witness(self):
        wrong = PE(C(den=[(1, 2, 2)]))
        r = limit_check("gauss", wrong, 12, 12)
        assert not r.passed and r.witness is not None

    def test_insufficient_stabilization_fails(self):
        target = PE(C(den=[(1, 1, 1)]))
        r = limit_check("gauss", target, 3, 12)
        assert not r.passed and "stabilized_to" in r.witness
