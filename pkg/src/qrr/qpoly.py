"""Exact Laurent polynomials and truncated power series in q.

A QPolynomial lives in x = q^(1/scale): exponents are integers in x-units
(possibly negative), coefficients are arbitrary-precision Python ints.
The zero polynomial has an empty term map and no degree.

TruncatedSeries is the same sparse dict representation plus a truncation
bound: every retained exponent (<= trunc) is exact.  Bivariate series
(second variable t, truncated, or z, Laurent) are handled by BiSeries.
"""

from __future__ import annotations

from fractions import Fraction


def _trim(terms: dict) -> dict:
    return {e: c for e, c in terms.items() if c}


class QPolynomial:
    """Immutable sparse Laurent polynomial over the integers."""

    __slots__ = ("scale", "terms", "_hash")

    def __init__(self, terms: dict[int, int] | None = None, scale: int = 1):
        if scale < 1:
            raise ValueError("scale must be a positive integer")
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "terms", _trim(terms or {}))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):
        raise AttributeError("QPolynomial is immutable")

    # ----- constructors -------------------------------------------------

    @classmethod
    def zero(cls, scale: int = 1) -> "QPolynomial":
        return cls({}, scale)

    @classmethod
    def one(cls, scale: int = 1) -> "QPolynomial":
        return cls({0: 1}, scale)

    @classmethod
    def monomial(cls, coeff: int, exp: int, scale: int = 1) -> "QPolynomial":
        """coeff * x^exp at the given scale (exp in x-units)."""
        return cls({exp: coeff}, scale)

    @classmethod
    def q_power(cls, qexp: Fraction | int, scale: int = 1, coeff: int = 1) -> "QPolynomial":
        """coeff * q^qexp; qexp*scale must be an integer."""
        e = Fraction(qexp) * scale
        if e.denominator != 1:
            raise ValueError(f"exponent {qexp} not representable at scale {scale}")
        return cls({int(e): coeff}, scale)

    # ----- basic queries -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Max exponent in x-units. Undefined (raises) for the zero polynomial."""
        if not self.terms:
            raise ValueError("zero polynomial has no degree")
        return max(self.terms)

    def low(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no low exponent")
        return min(self.terms)

    def coeff(self, exp: int) -> int:
        return self.terms.get(exp, 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QPolynomial):
            return NotImplemented
        if self.scale == other.scale:
            return self.terms == other.terms
        # compare as functions of q
        s = lcm(self.scale, other.scale)
        return self.rescale(s).terms == other.rescale(s).terms

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.scale, tuple(sorted(self.terms.items()))))
            object.__setattr__(self, "_hash", h)
        return h

    def __bool__(self):
        return bool(self.terms)

    # ----- ring operations ------------------------------------------------

    def _check_scale(self, other: "QPolynomial"):
        if self.scale != other.scale:
            raise ValueError(
                f"scale mismatch {self.scale} vs {other.scale}: rescale first")

    def __add__(self, other: "QPolynomial") -> "QPolynomial":
        self._check_scale(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return QPolynomial(t, self.scale)

    def __sub__(self, other: "QPolynomial") -> "QPolynomial":
        self._check_scale(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) - c
        return QPolynomial(t, self.scale)

    def __neg__(self) -> "QPolynomial":
        return QPolynomial({e: -c for e, c in self.terms.items()}, self.scale)

    def __mul__(self, other) -> "QPolynomial":
        if isinstance(other, int):
            return QPolynomial({e: c * other for e, c in self.terms.items()}, self.scale)
        self._check_scale(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict[int, int] = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = ea + eb
                out[e] = out.get(e, 0) + ca * cb
        return QPolynomial(out, self.scale)

    __rmul__ = __mul__

    def shift(self, exp: int) -> "QPolynomial":
        """Multiply by x^exp (exp in x-units)."""
        if exp == 0:
            return self
        return QPolynomial({e + exp: c for e, c in self.terms.items()}, self.scale)

    # ----- structural operations -------------------------------------------

    def rescale(self, new_scale: int) -> "QPolynomial":
        """Re-express at a finer scale; new_scale must be a multiple of scale."""
        if new_scale == self.scale:
            return self
        if new_scale % self.scale:
            raise ValueError(f"new scale {new_scale} is not a multiple of {self.scale}")
        k = new_scale // self.scale
        return QPolynomial({e * k: c for e, c in self.terms.items()}, new_scale)

    def reciprocal(self) -> "QPolynomial":
        """q^deg * p(1/q): the coefficient list reversed.  Needs low(p) >= 0."""
        if not self.terms:
            raise ValueError("reciprocal of the zero polynomial is undefined")
        d = self.degree()
        if self.low() < 0:
            raise ValueError("reciprocal requires a genuine polynomial (low >= 0)")
        return QPolynomial({d - e: c for e, c in self.terms.items()}, self.scale)

    def invert_q(self) -> "QPolynomial":
        """Substitute q -> 1/q (exponent negation); result is Laurent."""
        return QPolynomial({-e: c for e, c in self.terms.items()}, self.scale)

    def qneg(self) -> "QPolynomial":
        """Substitute q -> -q.  Every exponent must be an integer power of q."""
        out = {}
        for e, c in self.terms.items():
            if e % self.scale:
                raise ValueError("q -> -q needs integer q-exponents")
            out[e] = -c if (e // self.scale) % 2 else c
        return QPolynomial(out, self.scale)

    def eval_at_one(self) -> int:
        """Sum of coefficients (the q -> 1 limit for polynomials with low >= 0)."""
        if self.terms and self.low() < 0:
            raise ValueError("eval_at_one requires low(p) >= 0")
        return sum(self.terms.values())

    def truncate(self, trunc: int) -> "TruncatedSeries":
        return TruncatedSeries({e: c for e, c in self.terms.items() if e <= trunc},
                               trunc, self.scale)

    # ----- text format ------------------------------------------------------

    def render(self) -> str:
        """Canonical text: ascending exponents, `c*q^(e/s)` with exact integers."""
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*q^({e}/{self.scale})"
                          for e, c in sorted(self.terms.items()))

    @classmethod
    def parse(cls, text: str, scale: int | None = None) -> "QPolynomial":
        """Parse the canonical rendering (inverse of render)."""
        text = text.strip()
        if text == "0":
            return cls.zero(scale or 1)
        terms: dict[int, int] = {}
        seen_scale = None
        for part in text.split("+"):
            part = part.strip()
            if not part:
                raise ValueError("empty term in polynomial text")
            coeff_s, _, rest = part.partition("*q^(")
            if not rest.endswith(")"):
                raise ValueError(f"malformed term {part!r}")
            e_s, _, s_s = rest[:-1].partition("/")
            c, e, s = int(coeff_s), int(e_s), int(s_s)
            if seen_scale is None:
                seen_scale = s
            elif seen_scale != s:
                raise ValueError("mixed scales in polynomial text")
            terms[e] = terms.get(e, 0) + c
        p = cls(terms, seen_scale or 1)
        if scale is not None and scale != p.scale:
            p = p.rescale(scale)
        return p

    def __repr__(self):
        return f"QPolynomial({self.render()!r})"


def lcm(a: int, b: int) -> int:
    from math import gcd
    return a // gcd(a, b) * b


# ---------------------------------------------------------------------------
# Truncated univariate series in q
# ---------------------------------------------------------------------------

class TruncatedSeries:
    """Sparse series in x = q^(1/scale), exact for all exponents <= trunc.

    Exponents may be negative (Laurent prefixes created by explicit shifts);
    the truncation bound caps the high end only.
    """

    __slots__ = ("terms", "trunc", "scale")

    def __init__(self, terms: dict[int, int] | None = None, trunc: int = 0, scale: int = 1):
        self.terms = {e: c for e, c in (terms or {}).items() if c and e <= trunc}
        self.trunc = trunc
        self.scale = scale

    @classmethod
    def one(cls, trunc: int, scale: int = 1) -> "TruncatedSeries":
        return cls({0: 1}, trunc, scale)

    @classmethod
    def zero(cls, trunc: int, scale: int = 1) -> "TruncatedSeries":
        return cls({}, trunc, scale)

    def coeff(self, exp: int) -> int:
        if exp > self.trunc:
            raise ValueError(f"exponent {exp} beyond truncation {self.trunc}")
        return self.terms.get(exp, 0)

    def is_zero(self) -> bool:
        return not self.terms

    def _join(self, other: "TruncatedSeries") -> int:
        if self.scale != other.scale:
            raise ValueError("scale mismatch between series")
        return min(self.trunc, other.trunc)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        t = self._join(other)
        return ({e: c for e, c in self.terms.items() if e <= t} ==
                {e: c for e, c in other.terms.items() if e <= t})

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        t = self._join(other)
        out = {e: c for e, c in self.terms.items() if e <= t}
        for e, c in other.terms.items():
            if e <= t:
                out[e] = out.get(e, 0) + c
        return TruncatedSeries(out, t, self.scale)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        t = self._join(other)
        out = {e: c for e, c in self.terms.items() if e <= t}
        for e, c in other.terms.items():
            if e <= t:
                out[e] = out.get(e, 0) - c
        return TruncatedSeries(out, t, self.scale)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries({e: -c for e, c in self.terms.items()}, self.trunc, self.scale)

    def __mul__(self, other) -> "TruncatedSeries":
        if isinstance(other, int):
            return TruncatedSeries({e: c * other for e, c in self.terms.items()},
                                   self.trunc, self.scale)
        t = self._join(other)
        lo_s = min(self.terms, default=0)
        lo_o = min(other.terms, default=0)
        out: dict[int, int] = {}
        for ea, ca in self.terms.items():
            if ea + lo_o > t:
                continue
            for eb, cb in other.terms.items():
                e = ea + eb
                if e <= t:
                    out[e] = out.get(e, 0) + ca * cb
        # a*b is exact to min(trunc) provided low parts cooperate; for Laurent
        # inputs the bound tightens by the (negative) low exponents.
        bound = t + min(lo_s, 0) + min(lo_o, 0)
        return TruncatedSeries(out, bound if bound < t else t, self.scale)

    __rmul__ = __mul__

    def shift(self, exp: int) -> "TruncatedSeries":
        return TruncatedSeries({e + exp: c for e, c in self.terms.items()},
                               self.trunc + exp, self.scale)

    def invert(self) -> "TruncatedSeries":
        """Multiplicative inverse; requires constant term +-1 and low == 0."""
        if self.terms.get(0) not in (1, -1) or min(self.terms, default=0) < 0:
            raise ValueError("series inversion requires unit constant term")
        c0 = self.terms[0]
        t = self.trunc
        inv: dict[int, int] = {0: c0}
        rest = sorted((e, c) for e, c in self.terms.items() if e > 0)
        for e in range(1, t + 1):
            acc = 0
            for ea, ca in rest:
                if ea > e:
                    break
                b = inv.get(e - ea, 0)
                if b:
                    acc += ca * b
            if acc:
                inv[e] = -c0 * acc
        return TruncatedSeries(inv, t, self.scale)

    def retruncate(self, trunc: int) -> "TruncatedSeries":
        if trunc > self.trunc:
            raise ValueError("cannot extend a truncated series")
        return TruncatedSeries({e: c for e, c in self.terms.items() if e <= trunc},
                               trunc, self.scale)

    def rescale(self, new_scale: int) -> "TruncatedSeries":
        if new_scale == self.scale:
            return self
        if new_scale % self.scale:
            raise ValueError("new scale must be a multiple of the old")
        k = new_scale // self.scale
        return TruncatedSeries({e * k: c for e, c in self.terms.items()},
                               self.trunc * k, new_scale)

    def qneg(self) -> "TruncatedSeries":
        out = {}
        for e, c in self.terms.items():
            if e % self.scale:
                raise ValueError("q -> -q needs integer q-exponents")
            out[e] = -c if (e // self.scale) % 2 else c
        return TruncatedSeries(out, self.trunc, self.scale)

    def prefix(self, upto: int) -> dict[int, int]:
        """Exact coefficients for exponents <= upto (x-units)."""
        if upto > self.trunc:
            raise ValueError("prefix beyond truncation")
        return {e: c for e, c in self.terms.items() if e <= upto}

    def render(self, upto: int | None = None) -> str:
        t = self.trunc if upto is None else upto
        body = " + ".join(f"{c}*q^({e}/{self.scale})"
                          for e, c in sorted(self.terms.items()) if e <= t)
        return (body or "0") + f" + O(q^({t + 1}/{self.scale}))"

    def __repr__(self):
        return f"TruncatedSeries({self.render()})"


def poly_to_series(p: QPolynomial, trunc: int) -> TruncatedSeries:
    return p.truncate(trunc)


# ---------------------------------------------------------------------------
# Bivariate series: q truncated, second variable t (truncated) or z (Laurent)
# ---------------------------------------------------------------------------

class BiSeries:
    """Series in (q, v) where v is 't' (truncated) or 'z' (exact Laurent).

    Stored as {v-exponent: {q-exponent: coeff}}; q-exponents in x-units.
    """

    __slots__ = ("var", "data", "trunc_q", "trunc_v", "scale")

    def __init__(self, var: str, data=None, trunc_q: int = 0,
                 trunc_v: int | None = None, scale: int = 1):
        if var not in ("t", "z"):
            raise ValueError("second variable must be 't' or 'z'")
        if var == "t" and trunc_v is None:
            raise ValueError("t-series need a t-truncation")
        self.var = var
        self.trunc_q = trunc_q
        self.trunc_v = trunc_v
        self.scale = scale
        self.data = {}
        for ev, qs in (data or {}).items():
            if trunc_v is not None and ev > trunc_v:
                continue
            qq = {e: c for e, c in qs.items() if c and e <= trunc_q}
            if qq:
                self.data[ev] = qq

    @classmethod
    def one(cls, var: str, trunc_q: int, trunc_v: int | None = None,
            scale: int = 1) -> "BiSeries":
        return cls(var, {0: {0: 1}}, trunc_q, trunc_v, scale)

    def coeff_v(self, ev: int) -> QPolynomial:
        """Coefficient of v^ev as a polynomial in q (exact to trunc_q)."""
        return QPolynomial(dict(self.data.get(ev, {})), self.scale)

    def _join(self, other: "BiSeries"):
        if self.var != other.var or self.scale != other.scale:
            raise ValueError("incompatible bivariate series")
        tq = min(self.trunc_q, other.trunc_q)
        if self.trunc_v is None:
            tv = other.trunc_v
        elif other.trunc_v is None:
            tv = self.trunc_v
        else:
            tv = min(self.trunc_v, other.trunc_v)
        return tq, tv

    def __add__(self, other: "BiSeries") -> "BiSeries":
        tq, tv = self._join(other)
        out: dict[int, dict[int, int]] = {}
        for src in (self.data, other.data):
            for ev, qs in src.items():
                row = out.setdefault(ev, {})
                for e, c in qs.items():
                    row[e] = row.get(e, 0) + c
        return BiSeries(self.var, out, tq, tv, self.scale)

    def __sub__(self, other: "BiSeries") -> "BiSeries":
        return self + (-1) * other

    def __mul__(self, other) -> "BiSeries":
        if isinstance(other, int):
            return BiSeries(self.var,
                            {ev: {e: c * other for e, c in qs.items()}
                             for ev, qs in self.data.items()},
                            self.trunc_q, self.trunc_v, self.scale)
        tq, tv = self._join(other)
        out: dict[int, dict[int, int]] = {}
        for ev1, qs1 in self.data.items():
            for ev2, qs2 in other.data.items():
                ev = ev1 + ev2
                if tv is not None and ev > tv:
                    continue
                row = out.setdefault(ev, {})
                for e1, c1 in qs1.items():
                    if e1 > tq:
                        continue
                    for e2, c2 in qs2.items():
                        e = e1 + e2
                        if e <= tq:
                            row[e] = row.get(e, 0) + c1 * c2
        return BiSeries(self.var, out, tq, tv, self.scale)

    __rmul__ = __mul__

    def mul_monomial(self, coeff: int, ev: int, eq: int) -> "BiSeries":
        """Multiply by coeff * v^ev * x^eq."""
        out = {}
        for ev0, qs in self.data.items():
            out[ev0 + ev] = {e + eq: c * coeff for e, c in qs.items()}
        return BiSeries(self.var, out, self.trunc_q, self.trunc_v, self.scale)

    def mul_one_minus(self, coeff: int, ev: int, eq: int) -> "BiSeries":
        """Multiply by (1 + coeff * v^ev * x^eq), exactly."""
        return self + self.mul_monomial(coeff, ev, eq)

    def mul_geom_inverse(self, coeff: int, ev: int, eq: int) -> "BiSeries":
        """Multiply by 1/(1 - coeff * v^ev * x^eq) via the geometric series.

        Requires ev > 0, or ev == 0 and eq > 0, so the factor is a unit.
        """
        if ev < 0 or (ev == 0 and eq <= 0):
            raise ValueError("factor is not a unit for geometric inversion")
        geom: dict[int, dict[int, int]] = {}
        r = 0
        while (self.trunc_v is None or r * ev <= self.trunc_v) and r * eq <= self.trunc_q:
            if ev == 0 and r * eq > self.trunc_q:
                break
            geom.setdefault(r * ev, {})[r * eq] = coeff ** r
            r += 1
            if ev == 0 and eq == 0:
                raise ValueError("non-unit factor")
            if ev > 0 and self.trunc_v is not None and r * ev > self.trunc_v:
                break
            if ev == 0 and r * eq > self.trunc_q:
                break
        g = BiSeries(self.var, geom, self.trunc_q, self.trunc_v, self.scale)
        return self * g

    def subst_v_scaled(self, q_step: int) -> "BiSeries":
        """Substitute v -> v * x^q_step (used for f(q, t q^g))."""
        out = {}
        for ev, qs in self.data.items():
            out[ev] = {e + ev * q_step: c for e, c in qs.items() if e + ev * q_step <= self.trunc_q}
        return BiSeries(self.var, out, self.trunc_q, self.trunc_v, self.scale)

    def v_exponents(self):
        return sorted(self.data)

    def is_zero(self) -> bool:
        return not self.data

    def __eq__(self, other) -> bool:
        if not isinstance(other, BiSeries):
            return NotImplemented
        tq, tv = self._join(other)

        def norm(s):
            return {ev: {e: c for e, c in qs.items() if e <= tq}
                    for ev, qs in s.data.items()
                    if (tv is None or ev <= tv) and any(e <= tq for e in qs)}
        return norm(self) == norm(other)

    def __repr__(self):
        rows = ", ".join(f"{self.var}^{ev}: {QPolynomial(dict(qs), self.scale).render()}"
                         for ev, qs in sorted(self.data.items())[:4])
        return f"BiSeries({rows}, ...)"
