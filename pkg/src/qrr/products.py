"""Truncated infinite products and the classical series-product checks:
Jacobi triple product (with its finite form), quintuple product, Bailey's
two-product identity, the q-binomial theorem and corollaries, Heine's
transformations at monomial parameters, and stabilization-based limit
checks for the coefficient family.

A limit statement lim_L member(L) = target is replaced by a measured,
finite test: compute member(L) and member(L+1), find the largest degree D
at which they agree, and require D >= depth together with prefix equality
against the target series.  D is measured, never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import qcomb
from .qpoly import BiSeries, QPolynomial, TruncatedSeries
from .report import VerificationReport, fail, ok


# ---------------------------------------------------------------------------
# Pochhammer products
# ---------------------------------------------------------------------------

def poch_inf(sign: int, a, k, trunc: int, scale: int = 1) -> TruncatedSeries:
    """(sign q^a; q^k)_infinity truncated: factors beyond trunc are 1."""
    a, k = Fraction(a), Fraction(k)
    if a <= 0 or k <= 0:
        raise ValueError("poch_inf needs start a > 0 and step k > 0")
    ax, kx = a * scale, k * scale
    if ax.denominator != 1 or kx.denominator != 1:
        raise ValueError(f"exponents {a}, {k} not representable at scale {scale}")
    s = TruncatedSeries.one(trunc, scale)
    e = int(ax)
    while e <= trunc:
        s = s + TruncatedSeries({ee + e: -sign * c for ee, c in s.terms.items()},
                                trunc, scale)
        e += int(kx)
    return s


def poch_finite(sign: int, a, k, n: int, trunc: int, scale: int = 1) -> TruncatedSeries:
    """(sign q^a; q^k)_n as a truncated series (n >= 0)."""
    p = qcomb.qfac(qcomb.QMonomial(sign, Fraction(a)), Fraction(k), n, scale)
    return p.truncate(trunc)


@dataclass(frozen=True)
class PochFactor:
    sign: int
    a: Fraction
    k: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "k", Fraction(self.k))
        if self.sign not in (1, -1):
            raise ValueError("sign must be +-1")
        if self.a <= 0 or self.k <= 0:
            raise ValueError("factors need a > 0, k > 0")


@dataclass(frozen=True)
class ProductComponent:
    coeff: Fraction = Fraction(1)
    qshift: Fraction = Fraction(0)
    num: tuple[PochFactor, ...] = ()
    den: tuple[PochFactor, ...] = ()


@dataclass(frozen=True)
class ProductExpr:
    """A signed sum of Pochhammer quotients (the right sides of the corpus)."""
    components: tuple[ProductComponent, ...] = ()

    def eval(self, trunc: int, scale: int = 1) -> TruncatedSeries:
        return eval_product_expr(self, trunc, scale)


def eval_product_expr(expr: ProductExpr, trunc: int, scale: int = 1) -> TruncatedSeries:
    total_terms: dict[int, Fraction] = {}
    for comp in expr.components:
        shift = comp.qshift * scale
        if shift.denominator != 1:
            raise ValueError(f"shift {comp.qshift} not representable at scale {scale}")
        shift = int(shift)
        work = trunc + max(0, -shift)
        s = TruncatedSeries.one(work, scale)
        for f in comp.num:
            s = s * poch_inf(f.sign, f.a, f.k, work, scale)
        for f in comp.den:
            s = s * poch_inf(f.sign, f.a, f.k, work, scale).invert()
        for e, c in s.terms.items():
            e2 = e + shift
            if e2 <= trunc:
                total_terms[e2] = total_terms.get(e2, Fraction(0)) + comp.coeff * c
    out: dict[int, int] = {}
    for e, c in total_terms.items():
        if c:
            if c.denominator != 1:
                raise ValueError(f"non-integer coefficient {c} at exponent {e}")
            out[e] = int(c)
    return TruncatedSeries(out, trunc, scale)


# ---------------------------------------------------------------------------
# bivariate (z, q) products for the bilateral identities
# ---------------------------------------------------------------------------

def _zq_product(factors, trunc_q: int, scale: int = 1) -> BiSeries:
    """Product of (1 + coeff z^zd q^e; q^k)-type factors, truncated in q.

    factors: iterable of (coeff, zd, e, k): multiply (1 + coeff z^zd q^(e+mk))
    over m >= 0 while e+mk <= trunc; a factor with e == 0 contributes once.
    """
    s = BiSeries.one("z", trunc_q, None, scale)
    for coeff, zd, e, k in factors:
        m = 0
        while True:
            ee = e + m * k
            if ee > trunc_q:
                break
            s = s.mul_one_minus(coeff, zd, ee)
            m += 1
            if k == 0:
                break
    return s


def _bilateral_theta(weight, trunc_q: int, scale: int = 1) -> BiSeries:
    """sum over j in Z of coeff(j) z^(zd(j)) q^(e(j)), truncated in q.

    weight(j) -> (coeff, zd, e); e must grow without bound as |j| grows.
    """
    data: dict[int, dict[int, int]] = {}
    j = 0
    while True:
        entries = [weight(j)] if j == 0 else [weight(j), weight(-j)]
        if all(e > trunc_q for _, _, e in entries):
            break
        for coeff, zd, e in entries:
            if 0 <= e <= trunc_q:
                row = data.setdefault(zd, {})
                row[e] = row.get(e, 0) + coeff
        j += 1
    return BiSeries("z", data, trunc_q, None, scale)


def _compare_zq(ident: str, kind: str, lhs: BiSeries, rhs: BiSeries,
                trunc_q: int, z_window: int, **params) -> VerificationReport:
    for zd in range(-z_window, z_window + 1):
        a = lhs.coeff_v(zd)
        b = rhs.coeff_v(zd)
        if a != b:
            d = a - b
            e = min(d.terms)
            return fail(ident, kind,
                        {"z_exp": zd, "q_exp": e,
                         "lhs": a.coeff(e), "rhs": b.coeff(e)},
                        trunc=trunc_q, window=z_window, **params)
    return ok(ident, kind, trunc=trunc_q, window=z_window, **params)


def jtp_check(trunc_q: int, z_window: int = 5) -> VerificationReport:
    """sum z^j q^(j^2)  vs  prod (1+z q^(2j-1)) (1+1/z q^(2j-1)) (1-q^(2j))."""
    lhs = _bilateral_theta(lambda j: (1, j, j * j), trunc_q)
    rhs = _zq_product([(1, 1, 1, 2), (1, -1, 1, 2), (-1, 0, 2, 2)], trunc_q)
    return _compare_zq("jtp", "classical", lhs, rhs, trunc_q, z_window)


def fjtp_check(n: int, z_window: int | None = None) -> VerificationReport:
    """Finite triple product: both sides are polynomials, compared exactly."""
    trunc = 3 * n * n + 2 * n + 1
    if z_window is None:
        z_window = n
    data: dict[int, dict[int, int]] = {}
    for j in range(-n, n + 1):
        g = qcomb.gauss(2 * n, n + j, 2)
        row = data.setdefault(j, {})
        for e, c in g.terms.items():
            row[e + j * j] = row.get(e + j * j, 0) + c
    lhs = BiSeries("z", data, trunc, None, 1)
    rhs = BiSeries.one("z", trunc, None, 1)
    for i in range(n):
        rhs = rhs.mul_one_minus(1, -1, 2 * i + 1)
        rhs = rhs.mul_one_minus(1, 1, 2 * i + 1)
    return _compare_zq(f"fjtp[{n}]", "classical", lhs, rhs, trunc, z_window, n=n)


def quintuple_check(trunc_q: int, z_window: int = 5) -> VerificationReport:
    """(z^3 q, z^-3 q^2, q^3; q^3) + z (z^-3 q, z^3 q^2, q^3; q^3)
       = (-1/z q, -z, q; q) (z^-2 q, z^2 q; q^2)."""
    a = _zq_product([(-1, 3, 1, 3), (-1, -3, 2, 3), (-1, 0, 3, 3)], trunc_q)
    b = _zq_product([(-1, -3, 1, 3), (-1, 3, 2, 3), (-1, 0, 3, 3)], trunc_q)
    lhs = a + b.mul_monomial(1, 1, 0)
    rhs = _zq_product([(1, -1, 1, 1), (1, 1, 0, 1), (-1, 0, 1, 1),
                       (-1, -2, 1, 2), (-1, 2, 1, 2)], trunc_q)
    return _compare_zq("quintuple", "classical", lhs, rhs, trunc_q, z_window)


def bailey_check(trunc_q: int, z_window: int = 5) -> VerificationReport:
    """(-z^2 q, -z^-2 q^3, q^4; q^4) + z (-z^2 q^3, -z^-2 q, q^4; q^4)
       = (-z, -z^-1 q, q; q)."""
    a = _zq_product([(1, 2, 1, 4), (1, -2, 3, 4), (-1, 0, 4, 4)], trunc_q)
    b = _zq_product([(1, 2, 3, 4), (1, -2, 1, 4), (-1, 0, 4, 4)], trunc_q)
    lhs = a + b.mul_monomial(1, 1, 0)
    rhs = _zq_product([(1, 1, 0, 1), (1, -1, 1, 1), (-1, 0, 1, 1)], trunc_q)
    return _compare_zq("bailey", "classical", lhs, rhs, trunc_q, z_window)


# ---------------------------------------------------------------------------
# q-binomial theorem and corollaries
# ---------------------------------------------------------------------------

def qbt_checks(trunc: int = 20, jmax: int = 12) -> list[VerificationReport]:
    """Exact bivariate checks of the two corollaries for j <= jmax, plus
    monomial specializations of the theorem and the multisum simplifier."""
    reports = []

    # corollary 1: sum_k [j,k] (-1)^k q^C(k,2) t^k = (t;q)_j, exact in (t,q)
    bad = None
    for j in range(0, jmax + 1):
        tq = j * (j - 1) // 2 + 1
        lhs = BiSeries("t", {}, tq, j, 1)
        for k in range(0, j + 1):
            g = qcomb.gauss(j, k)
            w = k * (k - 1) // 2
            term = BiSeries("t", {k: {e + w: ((-1) ** k) * c for e, c in g.terms.items()}},
                            tq, j, 1)
            lhs = lhs + term
        rhs = BiSeries.one("t", tq, j, 1)
        for i in range(j):
            rhs = rhs.mul_one_minus(-1, 1, i)
        if lhs != rhs:
            bad = j
            break
    reports.append(ok("qbc1", "classical", jmax=jmax) if bad is None
                   else fail("qbc1", "classical", {"j": bad}, jmax=jmax))

    # corollary 2: coefficient of t^k in 1/(t;q)_j equals [j+k-1, k]
    bad = None
    for j in range(1, jmax + 1):
        for k in range(0, jmax + 1):
            # exact t-coefficient by the inversion recurrence
            want = qcomb.gauss(j + k - 1, k)
            got = _tcoeff_inv_poch(j, k)
            if want != got:
                bad = (j, k)
                break
        if bad:
            break
    reports.append(ok("qbc2", "classical", jmax=jmax) if bad is None
                   else fail("qbc2", "classical", {"j_k": bad}, jmax=jmax))

    # the theorem at t = +-q^u, a = +-q^r
    for t_sign, t_exp in [(1, 1), (1, 2), (-1, 1), (-1, 3), (1, 4)]:
        for a_sign, a_exp in [(1, 1), (-1, 1), (1, 2)]:
            r = _qbinthm_at(a_sign, a_exp, t_sign, t_exp, trunc)
            reports.append(r)

    # the multisum simplifier: sum_k q^(rk^2+sk)/(q^2r;q^2r)_k = (-q^(r+s); q^2r)
    for rr in (1, 2):
        for ss in (0, 1, 2):
            lhs = TruncatedSeries.zero(trunc)
            k = 0
            while rr * k * k + ss * k <= trunc:
                den = poch_finite(1, 2 * rr, 2 * rr, k, trunc)
                term = den.invert().shift(rr * k * k + ss * k).retruncate(trunc)
                lhs = lhs + term
                k += 1
            rhs = poch_inf(-1, rr + ss, 2 * rr, trunc)
            if lhs == rhs:
                reports.append(ok(f"qbc3[r={rr},s={ss}]", "classical", trunc=trunc))
            else:
                d = lhs - rhs
                e = min(d.terms)
                reports.append(fail(f"qbc3[r={rr},s={ss}]", "classical",
                                    {"q_exp": e}, trunc=trunc))
    return reports


def _tcoeff_inv_poch(j: int, k: int) -> QPolynomial:
    """Exact coefficient of t^k in 1/(t;q)_j (a polynomial in q)."""
    # (t;q)_j = sum a_i t^i with polynomial a_i; invert by the recurrence
    a = [QPolynomial.one()]
    for i in range(j):
        new = [QPolynomial.zero()] * (len(a) + 1)
        for d, c in enumerate(a):
            new[d] = new[d] + c
            new[d + 1] = new[d + 1] - c.shift(i)
        a = new
    b = [QPolynomial.one()]
    for d in range(1, k + 1):
        acc = QPolynomial.zero()
        for i in range(1, min(d, len(a) - 1) + 1):
            acc = acc + a[i] * b[d - i]
        b.append(-acc)
    return b[k]


def _qbinthm_at(a_sign, a_exp, t_sign, t_exp, trunc) -> VerificationReport:
    ident = f"qbinthm[a={'-' if a_sign < 0 else ''}q^{a_exp},t={'-' if t_sign < 0 else ''}q^{t_exp}]"
    lhs = TruncatedSeries.zero(trunc)
    k = 0
    while k * t_exp <= trunc:
        num = poch_finite(a_sign, a_exp, 1, k, trunc)
        den = poch_finite(1, 1, 1, k, trunc)
        term = (num * den.invert()).shift(k * t_exp).retruncate(trunc)
        if t_sign < 0 and k % 2:
            term = -term
        lhs = lhs + term
        k += 1
    # (at;q)/(t;q) with at = a_sign*t_sign q^(a_exp+t_exp)
    rhs = (poch_inf(a_sign * t_sign, a_exp + t_exp, 1, trunc)
           * poch_inf(t_sign, t_exp, 1, trunc).invert())
    if lhs == rhs:
        return ok(ident, "classical", trunc=trunc)
    d = lhs - rhs
    e = min(d.terms)
    return fail(ident, "classical", {"q_exp": e}, trunc=trunc)


# ---------------------------------------------------------------------------
# Heine's transformations at monomial parameters
# ---------------------------------------------------------------------------

def _phi_series(a, b, c, z, trunc: int) -> TruncatedSeries:
    """sum_j (a;q)_j (b;q)_j / ((c;q)_j (q;q)_j) z^j with monomial params.

    Parameters are (sign, q_exponent) pairs.  A numerator parameter equal
    to 1 (sign +1, exponent 0) collapses the series to its j = 0 term.
    """
    (sa, ea), (sb, eb), (sc, ec), (sz, ez) = a, b, c, z
    if ez <= 0:
        raise ValueError("z must have positive q-exponent")
    if (sc, ec) == (1, 0):
        raise ValueError("c = 1 makes the denominator vanish")
    if (sa, ea) == (1, 0) or (sb, eb) == (1, 0):
        return TruncatedSeries.one(trunc)       # (1;q)_j = 0 for j >= 1
    out = TruncatedSeries.zero(trunc)
    j = 0
    while j * ez <= trunc:
        num = poch_finite(sa, ea, 1, j, trunc) * poch_finite(sb, eb, 1, j, trunc)
        den = poch_finite(sc, ec, 1, j, trunc) * poch_finite(1, 1, 1, j, trunc)
        term = num * den.invert()
        term = term.shift(j * ez).retruncate(trunc)
        if sz < 0 and j % 2:
            term = -term
        out = out + term
        j += 1
    return out


def _inf_quot(num_params, den_params, trunc: int) -> TruncatedSeries:
    s = TruncatedSeries.one(trunc)
    for sign, e in num_params:
        s = s * poch_inf(sign, e, 1, trunc)
    for sign, e in den_params:
        s = s * poch_inf(sign, e, 1, trunc).invert()
    return s


def heine_check(variant: int, a, b, c, z, trunc: int = 15) -> VerificationReport:
    """Verify Heine transformation `variant` in {1,2,3} at monomial
    parameters; each parameter is (sign, q_exponent)."""
    ident = f"heine{variant}[a={a},b={b},c={c},z={z}]"
    (sa, ea), (sb, eb), (sc, ec), (sz, ez) = a, b, c, z

    def mono(*params):
        # product/quotient of signed monomials: (sign, exp, invert_flag)
        s, e = 1, 0
        for sign, exp, inv in params:
            s *= sign
            e += -exp if inv else exp
        return (s, e)

    lhs = _phi_series(a, b, c, z, trunc)
    if variant == 1:
        # (b, az; q)/(c, z; q) * phi(c/b, z; az; b)
        az = mono((sa, ea, 0), (sz, ez, 0))
        cb = mono((sc, ec, 0), (sb, eb, 1))
        pre = _inf_quot([(sb, eb), az], [(sc, ec), (sz, ez)], trunc)
        rhs = pre * _phi_series(cb, (sz, ez), az, (sb, eb), trunc)
    elif variant == 2:
        # (c/b, bz; q)/(c, z; q) * phi(abz/c, b; bz; c/b)
        cb = mono((sc, ec, 0), (sb, eb, 1))
        bz = mono((sb, eb, 0), (sz, ez, 0))
        abzc = mono((sa, ea, 0), (sb, eb, 0), (sz, ez, 0), (sc, ec, 1))
        pre = _inf_quot([cb, bz], [(sc, ec), (sz, ez)], trunc)
        rhs = pre * _phi_series(abzc, (sb, eb), bz, cb, trunc)
    elif variant == 3:
        # (abz/c; q)/(z; q) * phi(c/a, c/b; c; abz/c)
        abzc = mono((sa, ea, 0), (sb, eb, 0), (sz, ez, 0), (sc, ec, 1))
        ca = mono((sc, ec, 0), (sa, ea, 1))
        cb = mono((sc, ec, 0), (sb, eb, 1))
        pre = _inf_quot([abzc], [(sz, ez)], trunc)
        rhs = pre * _phi_series(ca, cb, (sc, ec), abzc, trunc)
    else:
        raise ValueError("variant must be 1, 2 or 3")
    if lhs == rhs:
        return ok(ident, "classical", trunc=trunc)
    d = lhs - rhs
    e = min(d.terms)
    return fail(ident, "classical", {"q_exp": e, "lhs": lhs.terms.get(e, 0),
                                     "rhs": rhs.terms.get(e, 0)}, trunc=trunc)


# ---------------------------------------------------------------------------
# stabilization-based limit checks
# ---------------------------------------------------------------------------

def stabilization_depth(p1: QPolynomial, p2: QPolynomial) -> int:
    """Largest degree D (x-units) with p1 and p2 equal on all exponents <= D."""
    diff = p1 - p2
    if diff.is_zero():
        return min(p1.degree() if p1.terms else 0, p2.degree() if p2.terms else 0)
    return min(diff.terms) - 1


LIMIT_MEMBERS = {
    # selector -> (member(L, A, scale) at scale, parity step)
    "gauss": lambda L, A, s: qcomb.gauss(2 * L + 1, L + 1, 1, s),
    "T1": lambda L, A, s: qcomb.tone(L, A, 1, s),
    "U": lambda L, A, s: qcomb.ufun(L, A, 1, s),
    "V": lambda L, A, s: qcomb.vfun(L, A, 1, s),
    "tau0": lambda L, A, s: qcomb.tauzero(L, A, 1, s),
    "trbAA": lambda L, A, s: qcomb.trb(L, A, A, 1, s),
    "trbA1A": lambda L, A, s: qcomb.trb(L, A - 1, A, 1, s),
    "t0": lambda L, A, s: qcomb.tsmall0(L, A, 1, s),
    "t1q": lambda L, A, s: qcomb.tsmall1(L, A, 1, s).shift(-L * s),
    "T0even": lambda L, A, s: qcomb.tzero(L if (L - A) % 2 == 0 else L + 1, A, 1, s),
    "T0odd": lambda L, A, s: qcomb.tzero(L if (L - A) % 2 == 1 else L + 1, A, 1, s),
}

LIMIT_STEP = {"T0even": 2, "T0odd": 2}


def limit_check(kind: str, target: ProductExpr, L: int, depth: int,
                A: int = 0, scale: int = 1) -> VerificationReport:
    """Measured-stabilization check of lim member(L) == target."""
    member = LIMIT_MEMBERS[kind]
    step = LIMIT_STEP.get(kind, 1)
    p1 = member(L, A, scale)
    p2 = member(L + step, A, scale)
    dx = stabilization_depth(p1, p2)
    ident = f"limit[{kind},A={A}]"
    if dx < depth * scale:
        return fail(ident, "limit", {"stabilized_to": dx, "needed": depth * scale},
                    L=L, depth=depth)
    tgt = eval_product_expr(target, depth * scale, scale)
    lo = min(min(p1.terms, default=0), 0)
    got = {e: c for e, c in p1.terms.items() if e <= depth * scale}
    want = {e: c for e, c in tgt.terms.items() if e >= lo}
    if got == want:
        return ok(ident, "limit", L=L, depth=depth, stabilized_to=dx)
    delta = {e: got.get(e, 0) - want.get(e, 0) for e in set(got) | set(want)}
    bad = min(e for e, c in delta.items() if c)
    return fail(ident, "limit", {"q_exp": bad, "got": got.get(bad, 0),
                                 "want": want.get(bad, 0)}, L=L, depth=depth)
