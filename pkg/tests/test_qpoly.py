"""Kernel arithmetic: Laurent polynomials and truncated series."""

import pytest
from hypothesis import given, settings, strategies as st

from qrr.qpoly import BiSeries, QPolynomial, TruncatedSeries


def P(terms, scale=1):
    return QPolynomial(terms, scale)


small_polys = st.dictionaries(
    st.integers(min_value=-6, max_value=12),
    st.integers(min_value=-9, max_value=9),
    max_size=6,
).map(QPolynomial)


class TestPolyArith:
    def test_difference_of_squares(self):
        one_plus = P({0: 1, 1: 1})
        one_minus = P({0: 1, 1: -1})
        assert one_plus * one_minus == P({0: 1, 2: -1})

    def test_additive_identity(self):
        p = P({0: 2, 3: -1, 7: 5})
        assert p + QPolynomial.zero() == p

    def test_euler_cube(self):
        # (1-q)(1-q^2)(1-q^3) expanded by repeated multiplication
        p = QPolynomial.one()
        for i in (1, 2, 3):
            p = p * P({0: 1, i: -1})
        assert p == P({0: 1, 1: -1, 2: -1, 4: 1, 5: 1, 6: -1})

    def test_scale_mismatch_rejected(self):
        with pytest.raises(ValueError):
            P({0: 1}) + P({0: 1}, scale=2)

    @given(small_polys, small_polys, small_polys)
    @settings(max_examples=200)
    def test_ring_axioms(self, a, b, c):
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c

    @given(small_polys, small_polys)
    @settings(max_examples=100)
    def test_rescale_commutes_with_arithmetic(self, a, b):
        assert (a + b).rescale(3) == a.rescale(3) + b.rescale(3)
        assert (a * b).rescale(3) == a.rescale(3) * b.rescale(3)


class TestRescale:
    def test_basic(self):
        p = P({0: 1, 1: 1})  # 1 + x at scale 1
        r = p.rescale(2)
        assert r.scale == 2 and r.terms == {0: 1, 2: 1}

    def test_identity(self):
        p = P({0: 1, 1: 1})
        assert p.rescale(1) is p

    def test_scale2_to_4(self):
        p = P({1: 1, 3: 1}, scale=2)
        r = p.rescale(4)
        assert r.terms == {2: 1, 6: 1} and r.scale == 4

    def test_non_multiple_rejected(self):
        with pytest.raises(ValueError):
            P({0: 1}, scale=2).rescale(3)


class TestReciprocal:
    def test_reversal(self):
        assert P({0: 2, 1: 3, 3: 1}).reciprocal() == P({3: 2, 2: 3, 0: 1})

    def test_palindrome(self):
        p = P({0: 1, 2: 1})
        assert p.reciprocal() == p

    def test_paper_initial_value(self):
        # P_2 of the mod-6 entry: q^3 + q^2 + q + 1 is self-reciprocal
        p = P({0: 1, 1: 1, 2: 1, 3: 1})
        assert p.reciprocal() == p

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            QPolynomial.zero().reciprocal()

    @given(small_polys.filter(lambda p: p.terms and p.low() >= 0))
    @settings(max_examples=200)
    def test_involution(self, p):
        if p.terms and min(p.terms) == 0:
            assert p.reciprocal().reciprocal() == p


class TestEvalAtOne:
    def test_binomial_collapse(self):
        from qrr.qcomb import gauss
        assert gauss(4, 2).eval_at_one() == 6

    def test_zero(self):
        assert QPolynomial.zero().eval_at_one() == 0

    def test_product(self):
        p = QPolynomial.one()
        for i in (1, 2, 3):
            p = p * P({0: 1, i: 1})
        assert p.eval_at_one() == 8


class TestText:
    def test_render_ascending(self):
        assert P({2: -3, 0: 1}).render() == "1*q^(0/1) + -3*q^(2/1)"

    def test_zero(self):
        assert QPolynomial.zero().render() == "0"
        assert QPolynomial.parse("0").is_zero()

    @given(small_polys)
    @settings(max_examples=200)
    def test_round_trip(self, p):
        assert QPolynomial.parse(p.render()) == p

    def test_round_trip_scale2(self):
        p = P({-1: 2, 3: -5}, scale=2)
        assert QPolynomial.parse(p.render()) == p


class TestSeries:
    def test_geometric_inverse(self):
        one_minus_t = TruncatedSeries({0: 1, 1: -1}, 5)
        inv = one_minus_t.invert()
        assert inv.terms == {e: 1 for e in range(6)}

    def test_invert_round_trip(self):
        s = TruncatedSeries({0: 1, 1: -1}, 10)
        assert (s.invert() * s).terms == {0: 1}

    def test_invert_needs_unit(self):
        with pytest.raises(ValueError):
            TruncatedSeries({0: 2, 1: 1}, 5).invert()
        with pytest.raises(ValueError):
            TruncatedSeries({1: 1}, 5).invert()

    @given(st.dictionaries(st.integers(min_value=1, max_value=8),
                           st.integers(min_value=-4, max_value=4), max_size=5),
           st.sampled_from([1, -1]))
    @settings(max_examples=500)
    def test_invert_two_sided(self, tail, unit):
        s = TruncatedSeries({0: unit, **tail}, 12)
        inv = s.invert()
        assert (s * inv).terms == {0: 1}
        assert (inv * s).terms == {0: 1}

    def test_retruncate_min_on_mixed(self):
        a = TruncatedSeries({0: 1, 1: 1}, 10)
        b = TruncatedSeries({0: 1, 2: 1}, 4)
        assert (a * b).trunc == 4
        assert (a + b).trunc == 4


class TestBiSeries:
    def test_t_product_truncation(self):
        # (1 + t q) * (1 + t q) keeps t^2 q^2 under generous bounds
        s = BiSeries.one("t", 10, 5)
        s = s.mul_one_minus(1, 1, 1)
        s2 = s * s
        assert s2.coeff_v(2).terms == {2: 1}

    def test_geom_inverse_round_trip(self):
        s = BiSeries.one("t", 8, 6).mul_geom_inverse(1, 1, 0)  # 1/(1-t)
        back = s.mul_one_minus(-1, 1, 0)  # * (1-t)
        assert back == BiSeries.one("t", 8, 6)

    def test_subst_t_scaled(self):
        # f = t  ->  f(q, t q^2) = t q^2
        s = BiSeries("t", {1: {0: 1}}, 10, 4)
        assert s.subst_v_scaled(2).coeff_v(1).terms == {2: 1}
