"""Evaluation and verification over the corpus.

Computes P_n(q) from fermionic, bosonic and recurrence representations,
runs the two-variable finitization construction on a SeriesShape, derives
and validates the first-order nonhomogeneous q-difference equation,
computes reciprocal duals, and checks series-vs-product, limit, and
relation statements.

Bilateral ranges are derived symbolically from the vanishing constraints
of each term's coefficient function, never by scanning until zero.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, floor

from . import qcomb
from .corpus import (BosonicSpec, Corpus, DualLink, Factor, FermionicSpec,
                     IdentitySpec, PhiSeries, RecurrenceSpec, RelationSpec,
                     SeriesShape, Term)
from .exprs import Floor, Poly
from .products import eval_product_expr, poch_finite, stabilization_depth
from .qpoly import BiSeries, QPolynomial, TruncatedSeries
from .report import VerificationReport, fail, ok, skipped


# ---------------------------------------------------------------------------
# term evaluation helpers
# ---------------------------------------------------------------------------

def _eval_arg(arg, env) -> int:
    return arg.eval_int(env)


def _eval_factor(f: Factor, env, scale: int) -> QPolynomial:
    args = [_eval_arg(a, env) for a in f.args]
    if f.kind == "gauss":
        if args[1] == 0:
            # empty-product boundary reading [A, 0] = 1 for every A; the
            # multisum displays rely on it at their index floors
            return QPolynomial.one(scale)
        return qcomb.gauss(args[0], args[1], f.base, scale)
    if f.kind == "gaussz":
        return qcomb.gauss(args[0], args[1], f.base, scale)
    if f.kind == "trb":
        return qcomb.trb(args[0], args[1], args[2], f.base, scale)
    if f.kind == "T0":
        return qcomb.tzero(args[0], args[1], f.base, scale)
    if f.kind == "T1":
        return qcomb.tone(args[0], args[1], f.base, scale)
    if f.kind == "tau0":
        return qcomb.tauzero(args[0], args[1], f.base, scale)
    if f.kind == "t0":
        return qcomb.tsmall0(args[0], args[1], f.base, scale)
    if f.kind == "t1":
        return qcomb.tsmall1(args[0], args[1], f.base, scale)
    if f.kind == "U":
        return qcomb.ufun(args[0], args[1], f.base, scale)
    if f.kind == "V":
        return qcomb.vfun(args[0], args[1], f.base, scale)
    raise ValueError(f.kind)


def _eval_term_at(term: Term, env, scale: int) -> QPolynomial:
    """Value of one summand term at a full variable assignment."""
    qe = term.qexp.eval(env) * scale
    if qe.denominator != 1:
        raise ValueError(f"q-exponent {term.qexp.render()} fractional at scale {scale}")
    acc = QPolynomial({int(qe): 1}, scale)
    if term.sign.eval_int(env) % 2:
        acc = -acc
    for f in term.factors:
        p = _eval_factor(f, env, scale)
        if p.is_zero():
            return QPolynomial.zero(scale)
        acc = acc * p
    return acc


# ---------------------------------------------------------------------------
# fermionic evaluation (nested bounded enumeration)
# ---------------------------------------------------------------------------

def _poly_body(e) -> Poly:
    return e.body if isinstance(e, Floor) else e


def _var_coeff(p: Poly, v: str) -> Fraction:
    c = Fraction(0)
    for m, co in p.terms.items():
        if dict(m).get(v, 0) == 1 and len(m) == 1:
            c += co
    return c


def _stop_pairs(term: Term, vars_: tuple[str, ...]):
    """Per variable: the (depth, bottom) pairs usable as sound stop rules.

    A pair kills the whole remaining loop of variable v at the current
    partial assignment when, with later variables at their lower bounds,
    depth = top - bot < 0 while bot >= 1: the gauss factor is then zero on
    the entire subtree and stays zero for larger v, because depth never
    increases (its v/later coefficients are <= 0) and bot never decreases
    (its v/later coefficients are >= 0).  A bare bot with negative v
    coefficient is also sound: bot < 0 kills the factor outright.
    """
    per_var = []
    for i, v in enumerate(vars_):
        later = vars_[i:]
        pairs = []
        for fac in term.factors:
            if fac.kind not in ("gauss", "gaussz"):
                continue
            top, bot = _poly_body(fac.args[0]), _poly_body(fac.args[1])
            depth = top - bot
            if (fac.kind == "gaussz"
                    and all(_var_coeff(depth, w) <= 0 for w in later)):
                # strict factor: depth < 0 alone forces zero, persistently
                pairs.append((depth, None))
            if (all(_var_coeff(depth, w) <= 0 for w in later)
                    and all(_var_coeff(bot, w) >= 0 for w in later)):
                pairs.append((depth, bot))
            if (_var_coeff(bot, v) < 0
                    and all(_var_coeff(bot, w) <= 0 for w in later[1:])):
                pairs.append((bot, None))
        per_var.append(pairs)
    return per_var


def eval_fermionic(spec: FermionicSpec, n: int, scale: int = 1) -> QPolynomial:
    """Exact finite multisum; ranges derived from gauss vanishing."""
    if n < 0:
        raise ValueError("n must be >= 0")
    total = QPolynomial.zero(scale)
    for term in spec.terms:
        total = total + _sum_term(term, spec, n, scale)
    if spec.lead is not None:
        total = total + spec.lead.rescale(scale)
    return total


def _sum_term(term: Term, spec: FermionicSpec, n: int,
              scale: int) -> QPolynomial:
    vars_, lowers = spec.vars, spec.lower
    stop_pairs = _stop_pairs(term, vars_)
    cap = 4 * n + 60
    env = {"n": n}
    acc = [QPolynomial.zero(scale)]

    def should_stop(i: int) -> bool:
        e = dict(env)
        for w, lo in zip(vars_[i + 1:], lowers[i + 1:]):
            e[w] = lo
        for depth, bot in stop_pairs[i]:
            if bot is None:
                if depth.eval(e) < 0:
                    return True
            elif depth.eval(e) < 0 and bot.eval(e) >= 1:
                return True
        return False

    def rec(i: int):
        if i == len(vars_):
            acc[0] = acc[0] + _eval_term_at(term, env, scale)
            return
        v = vars_[i]
        x = lowers[i]
        while True:
            if x > cap:
                raise ValueError(
                    f"variable {v} exceeded the enumeration cap: entry data "
                    f"does not bound it")
            env[v] = x
            if should_stop(i):
                del env[v]
                return
            rec(i + 1)
            x += 1

    rec(0)
    return acc[0]


# ---------------------------------------------------------------------------
# bosonic evaluation (bilateral, symbolic range)
# ---------------------------------------------------------------------------

def _ge_constraint(ea, eb) -> Poly:
    """Return an affine P with P >= 0  <=>  ea >= eb (integer values)."""
    fa, fb = isinstance(ea, Floor), isinstance(eb, Floor)
    if fa and fb:
        raise ValueError("cannot compare two floor forms")
    if not fa and not fb:
        return ea - eb
    if fb:     # plain >= floor(x, d)  <=>  x <= d*ea + d - 1
        return ea * Poly.const(eb.div) + Poly.const(eb.div - 1) - eb.body
    # floor(x, d) >= plain  <=>  x >= d * eb
    return ea.body - eb * Poly.const(ea.div)


_ZERO = Poly.const(0)
_ONE = Poly.const(1)


def _term_constraints(term: Term) -> list[Poly]:
    """Affine >= 0 constraints outside of which the term vanishes (or its
    coefficient functions can not be evaluated)."""
    cons: list[Poly] = []
    for f in term.factors:
        if f.kind == "gauss":
            top, bot = f.args
            cons.append(_ge_constraint(bot, _ZERO))
            cons.append(_ge_constraint(top, bot))
        elif f.kind == "trb":
            L, _, A = f.args
            cons.append(_ge_constraint(L, _ZERO))
            cons.append(_ge_constraint(L, A))
            cons.append(_ge_constraint(_add(L, A), _ZERO))
        elif f.kind in ("T0", "T1", "tau0", "t0", "t1"):
            L, A = f.args
            cons.append(_ge_constraint(L, _ZERO))
            cons.append(_ge_constraint(L, A))
            cons.append(_ge_constraint(_add(L, A), _ZERO))
        elif f.kind == "U":
            L, A = f.args
            cons.append(_ge_constraint(L, _ZERO))
            cons.append(_ge_constraint(L, A))
            cons.append(_ge_constraint(_add(L, A), Poly.const(-1)))
        elif f.kind == "V":
            L, A = f.args
            cons.append(_ge_constraint(L, _ONE))
            cons.append(_ge_constraint(L, A))
            cons.append(_ge_constraint(_add(L, A), _ONE))
        else:
            raise ValueError(f"{f.kind} not allowed in bosonic terms")
    return cons


def _add(a, b):
    """Sum of two index forms when at most one is a floor (floor + poly)."""
    if isinstance(a, Floor) and isinstance(b, Floor):
        raise ValueError("cannot add two floors")
    if isinstance(a, Floor):
        # fl(x,d) + p  ==  fl(x + d*p, d)
        return Floor(a.body + b * Poly.const(a.div), a.div)
    if isinstance(b, Floor):
        return Floor(b.body + a * Poly.const(b.div), b.div)
    return a + b


def _j_range(term: Term, var: str, env) -> tuple[int, int] | None:
    lo, hi = None, None
    for con in _term_constraints(term):
        e0 = dict(env)
        e0[var] = 0
        c0 = con.eval(e0)
        e0[var] = 1
        c1 = con.eval(e0) - c0
        if c1 == 0:
            if c0 < 0:
                return None
        elif c1 > 0:
            b = ceil(-c0 / c1)
            lo = b if lo is None else max(lo, b)
        else:
            b = floor(-c0 / c1)
            hi = b if hi is None else min(hi, b)
    if lo is None or hi is None:
        raise ValueError(f"bilateral variable {var} is unbounded")
    if lo > hi:
        return None
    return lo, hi


def eval_bosonic(spec: BosonicSpec, n: int, scale: int = 1) -> QPolynomial:
    """Bilateral sum; the branch is selected by n mod modulus."""
    if n < 0:
        raise ValueError("n must be >= 0")
    for branch in spec.branches:
        if n % branch.modulus == branch.residue:
            env = {"n": n}
            if branch.modulus == 2:
                env["m"] = (n - branch.residue) // 2
            total = QPolynomial.zero(scale)
            for term in branch.terms:
                rng = _j_range(term, branch.var, env)
                if rng is None:
                    continue
                for j in range(rng[0], rng[1] + 1):
                    env[branch.var] = j
                    total = total + _eval_term_at(term, env, scale)
                del env[branch.var]
            return total
    raise ValueError(f"no branch applies to n = {n}")


# ---------------------------------------------------------------------------
# recurrence evaluation
# ---------------------------------------------------------------------------

def _coeff_value(coeff: tuple[tuple[int, Poly], ...], env,
                 scale: int) -> QPolynomial:
    """Instantiate a recurrence coefficient (sum of a * q^(lin in n))."""
    out: dict[int, int] = {}
    for a, qexp in coeff:
        e = qexp.eval(env) * scale
        if e.denominator != 1:
            raise ValueError("fractional recurrence exponent")
        out[int(e)] = out.get(int(e), 0) + a
    return QPolynomial(out, scale)


class Evaluator:
    """Corpus-wide evaluation with memoized sequence values."""

    def __init__(self, corpus: Corpus):
        self.corpus = corpus
        self._seq: dict[tuple[str, str, int], QPolynomial] = {}

    # -- single representations ------------------------------------------

    def rec_value(self, spec: IdentitySpec, n: int) -> QPolynomial:
        rec = spec.recurrence
        key = (spec.ident, "rec", n)
        hit = self._seq.get(key)
        if hit is not None:
            return hit
        if n < 0:
            raise ValueError("n must be >= 0")
        if n < rec.start:
            if n >= len(rec.initials):
                raise ValueError(f"{spec.ident}: no initial value for n={n}")
            val = rec.initials[n]
        else:
            val = QPolynomial.zero(spec.scale)
            for i, coeff in enumerate(rec.coeffs, start=1):
                c = _coeff_value(coeff, {"n": n}, spec.scale)
                if not c.is_zero():
                    val = val + c * self.rec_value(spec, n - i)
        self._seq[key] = val
        return val

    def rep_value(self, spec: IdentitySpec, rep: str, n: int) -> QPolynomial:
        key = (spec.ident, rep, n)
        hit = self._seq.get(key)
        if hit is not None:
            return hit
        if rep == "fermionic":
            val = eval_fermionic(spec.fermionic, n, spec.scale)
        elif rep.startswith("bosonic."):
            label = rep.split(".", 1)[1]
            bos = next(b for b in spec.bosonic if b.label == label)
            val = eval_bosonic(bos, n, spec.scale)
        elif rep == "recurrence":
            val = self.rec_value(spec, n)
        elif rep == "finprod":
            val = QPolynomial.one(spec.scale)
            for s, a, k, l in spec.finprod.factors:
                val = val * qcomb.qfac(qcomb.QMonomial(s, Fraction(a)),
                                       Fraction(k), n + l, spec.scale)
        elif rep == "dual":
            val = self.dual_value(spec.dual_of, n)
        else:
            raise ValueError(f"unknown representation {rep}")
        self._seq[key] = val
        return val

    def value(self, spec: IdentitySpec, n: int) -> QPolynomial:
        """Preferred evaluation: recurrence, else fermionic, else bosonic."""
        for rep in ("recurrence", "fermionic"):
            if rep in spec.representations():
                return self.rep_value(spec, rep, n)
        reps = spec.representations()
        if not reps:
            raise ValueError(f"{spec.ident} has no evaluable representation")
        return self.rep_value(spec, reps[0], n)

    def dual_value(self, link: DualLink, n: int) -> QPolynomial:
        src = self.corpus.lookup(link.source)
        m = link.source_index.eval_int({"n": n})
        if m < 0:
            raise ValueError("dual link maps below 0")
        p = self.value(src, m)
        if p.is_zero():
            raise ValueError("reciprocal of zero sequence value")
        r = p.reciprocal()
        if link.qshift is not None:
            e = link.qshift.eval({"n": n}) * src.scale
            r = r.shift(int(e))
        return r

    # -- verification ------------------------------------------------------

    def verify_threeway(self, spec: IdentitySpec, nmax: int = 12) -> VerificationReport:
        reps = spec.representations()
        if len(reps) < 2:
            return skipped(spec.ident, "threeway", "single representation")
        base = min(reps, key=spec.rep_floor)
        for n in range(0, nmax + 1):
            if n < spec.rep_floor(base):
                continue
            want = self.rep_value(spec, base, n)
            for rep in reps:
                if rep == base or n < spec.rep_floor(rep):
                    continue
                got = self.rep_value(spec, rep, n)
                if got != want:
                    d = got - want
                    e = min(d.terms)
                    return fail(spec.ident, "threeway",
                                {"n": n, "pair": f"{base} vs {rep}",
                                 "q_exp": f"{e}/{spec.scale}",
                                 "lhs": want.coeff(e), "rhs": got.coeff(e)},
                                nmax=nmax)
        return ok(spec.ident, "threeway", nmax=nmax, reps=len(reps))

    def slater_series(self, spec: IdentitySpec, trunc: int) -> TruncatedSeries:
        return eval_phi_series(spec.series, trunc, spec.scale)

    def verify_slater(self, spec: IdentitySpec, trunc: int = 40) -> VerificationReport:
        if spec.series is None or spec.product is None:
            return skipped(spec.ident, "slater", "no display to verify")
        t = trunc * spec.scale
        lhs = self.slater_series(spec, t)
        rhs = eval_product_expr(spec.product, t, spec.scale)
        if lhs == rhs:
            return ok(spec.ident, "slater", trunc=trunc)
        d = lhs - rhs
        e = min(d.terms)
        return fail(spec.ident, "slater",
                    {"q_exp": f"{e}/{spec.scale}", "series": lhs.terms.get(e, 0),
                     "product": rhs.terms.get(e, 0)}, trunc=trunc)

    def verify_limit(self, spec: IdentitySpec, depth: int = 12) -> VerificationReport:
        if spec.slater is None:
            return skipped(spec.ident, "limit", "no product link")
        target_entry = self.corpus.lookup(spec.slater)
        if target_entry.product is None:
            return skipped(spec.ident, "limit", f"{spec.slater} has no product")
        dx = depth * spec.scale
        tgt = eval_product_expr(target_entry.product, depth * target_entry.scale,
                                target_entry.scale)
        if spec.scale != target_entry.scale:
            tgt = tgt.rescale(spec.scale)
        if spec.limit_transform == "qneg":
            tgt = tgt.qneg()
        want = dict(tgt.terms)
        d = -1
        # measured stabilization over three consecutive members; the start
        # index grows until the prefix settles (rates differ per family)
        for N in (depth + 2, 2 * depth + 4, 3 * depth + 8, 4 * depth + 12):
            p1 = self.value(spec, N)
            p2 = self.value(spec, N + 1)
            p3 = self.value(spec, N + 2)
            d = min(stabilization_depth(p1, p2), stabilization_depth(p2, p3))
            if d < dx:
                continue
            if spec.limit_mult:
                s = p1.truncate(dx)
                from .products import poch_inf
                for f in spec.limit_mult:
                    s = s * poch_inf(f.sign, f.a, f.k, dx, spec.scale)
                got = dict(s.terms)
            else:
                got = {e: c for e, c in p1.terms.items() if e <= dx}
            if got == want:
                return ok(spec.ident, "limit", depth=depth, at_n=N,
                          stabilized_to=d)
            bad = min(e for e in set(got) | set(want)
                      if got.get(e, 0) != want.get(e, 0))
            return fail(spec.ident, "limit",
                        {"q_exp": f"{bad}/{spec.scale}", "got": got.get(bad, 0),
                         "want": want.get(bad, 0), "at_n": N}, depth=depth)
        return fail(spec.ident, "limit",
                    {"stabilized_to": d, "needed": dx}, depth=depth)

    def verify_duallink(self, link: DualLink, nmax: int = 10) -> VerificationReport:
        ident = f"{link.source}~{link.target}"
        tgt = self.corpus.lookup(link.target)
        for n in range(0, nmax + 1):
            try:
                want = self.dual_value(link, n)
            except ValueError:
                continue
            got = self.value(tgt, n)
            if got.scale != want.scale:
                s = max(got.scale, want.scale)
                got, want = got.rescale(s), want.rescale(s)
            if got != want:
                d = got - want
                e = min(d.terms)
                return fail(ident, "dual", {"n": n, "q_exp": e}, nmax=nmax)
        return ok(ident, "dual", nmax=nmax)

    def verify_relation(self, rel: RelationSpec, trunc: int = 40) -> VerificationReport:
        if rel.kind == "qsubst":
            src = self.corpus.lookup(rel.source)
            tgt = self.corpus.lookup(rel.target)
            t = trunc * src.scale
            s = self.slater_series(src, t)
            if rel.transform == "qneg":
                s = s.qneg()
            else:
                return skipped(rel.ident, "relation", f"transform {rel.transform}")
            w = self.slater_series(tgt, t)
            if s == w:
                return ok(rel.ident, "relation", kind=rel.kind, trunc=trunc)
            d = s - w
            e = min(d.terms)
            return fail(rel.ident, "relation", {"q_exp": e}, kind=rel.kind)
        if rel.kind == "series":
            scale = 1
            for t in rel.terms:
                scale = _lcm(scale, self.corpus.lookup(t.ident).scale)
                scale = _lcm(scale, t.qexp.eval({}).denominator)
            shift_min = min(int(t.qexp.eval({}) * scale) for t in rel.terms)
            t_x = trunc * scale
            total = TruncatedSeries.zero(t_x, scale)
            for t in rel.terms:
                e = self.corpus.lookup(t.ident)
                qs = int(t.qexp.eval({}) * scale)
                s = self.slater_series(e, t_x + max(0, -shift_min)).rescale(scale) \
                    if e.scale != scale else \
                    self.slater_series(e, t_x + max(0, -shift_min))
                s = s.shift(qs).retruncate(t_x) * t.coeff
                total = total + s
            if total.is_zero():
                return ok(rel.ident, "relation", kind="series", trunc=trunc)
            e = min(total.terms)
            return fail(rel.ident, "relation", {"q_exp": f"{e}/{scale}"},
                        kind="series")
        # sequence relation
        scale = 1
        for t in rel.terms:
            scale = _lcm(scale, self.corpus.lookup(t.ident).scale)
        stop = rel.stop if rel.stop is not None else 12
        for n in range(rel.start, stop + 1):
            total = QPolynomial.zero(scale)
            for t in rel.terms:
                e = self.corpus.lookup(t.ident)
                v = self.value(e, n + t.nshift)
                if e.scale != scale:
                    v = v.rescale(scale)
                qe = t.qexp.eval({"n": n}) * scale
                if qe.denominator != 1:
                    raise ValueError(f"{rel.ident}: fractional shift")
                total = total + v.shift(int(qe)) * t.coeff
            if not total.is_zero():
                e = min(total.terms)
                return fail(rel.ident, "relation",
                            {"n": n, "q_exp": f"{e}/{scale}"}, kind="sequence")
        return ok(rel.ident, "relation", kind="sequence",
                  range=f"{rel.start}..{stop}")


def _lcm(a: int, b: int) -> int:
    from math import gcd
    return a // gcd(a, b) * b


# ---------------------------------------------------------------------------
# phi-series evaluation (slater entries)
# ---------------------------------------------------------------------------

def eval_phi_series(series: PhiSeries, trunc: int, scale: int = 1) -> TruncatedSeries:
    """Evaluate the series side of a series-product entry to x-trunc."""
    total = TruncatedSeries.zero(trunc, scale)
    if series.lead is not None:
        total = total + series.lead.rescale(scale).truncate(trunc)

    def min_exp(n: int) -> Fraction:
        return (series.b * n * n + series.c * n + series.u) * scale

    def term(n: int) -> TruncatedSeries:
        e = min_exp(n)
        if e.denominator != 1:
            raise ValueError(f"series exponent fractional at n={n}")
        s = TruncatedSeries.one(trunc, scale)
        for sg, a, k, l in series.num:
            if n + l < 0:
                raise ValueError(f"negative factorial subscript at n={n}")
            s = s * poch_finite(sg, a, k, n + l, trunc, scale)
        if series.m:
            s = s * poch_finite(1, series.m, series.m, n, trunc, scale).invert()
        for sg, a, k, l in series.den:
            if n + l < 0:
                raise ValueError(f"negative factorial subscript at n={n}")
            s = s * poch_finite(sg, a, k, n + l, trunc, scale).invert()
        s = s.shift(int(e)).retruncate(trunc)
        if series.coef != 1:
            s = s * series.coef
        if series.a and n % 2:
            s = -s
        return s

    if series.bilateral:
        if series.num or series.den or series.m != 1:
            raise ValueError("bilateral series must be a pure theta sum")
        n = 0
        while True:
            lo_p, lo_m = min_exp(n), min_exp(-n)
            if lo_p > trunc and lo_m > trunc and n > 0:
                break
            for nn, e in ((n, lo_p), (-n, lo_m)) if n else ((0, lo_p),):
                if 0 <= e <= trunc:
                    sgn = -1 if (series.a and nn % 2) else 1
                    total = total + TruncatedSeries({int(e): sgn}, trunc, scale)
            n += 1
        return total

    n = series.start
    while min_exp(n) <= trunc:
        total = total + term(n)
        n += 1
    return total


# ---------------------------------------------------------------------------
# the finitization construction
# ---------------------------------------------------------------------------

def _shape_exponents(shape: SeriesShape, scale: int):
    bx = shape.b * scale
    cx = shape.c * scale
    if bx.denominator != 1 or cx.denominator != 1:
        raise ValueError(f"shape exponents need a finer scale than {scale}")
    return int(bx), int(cx)


def _mul_poch_t(f: BiSeries, sign: int, t_step: int, q_start, q_step,
                count: int, scale: int, invert: bool) -> BiSeries:
    """Multiply f by (sign t^t_step q^q_start; q^q_step)_count (or divide)."""
    qs = int(Fraction(q_start) * scale)
    qk = int(Fraction(q_step) * scale)
    if count >= 0:
        for i in range(count):
            if invert:
                f = f.mul_geom_inverse(sign, t_step, qs + qk * i)
            else:
                f = f.mul_one_minus(-sign, t_step, qs + qk * i)
    else:
        # (x; Q)_{-r} = prod_{i=1..r} 1/(1 - x Q^-i)
        for i in range(1, -count + 1):
            if invert:
                f = f.mul_one_minus(-sign, t_step, qs - qk * i)
            else:
                f = f.mul_geom_inverse(sign, t_step, qs - qk * i)
    return f


def finitize(shape: SeriesShape, n_max: int, q_trunc: int,
             scale: int = 1) -> list[QPolynomial]:
    """Build f(q, t) and read off P_0 .. P_{n_max}.

    Raises if any extracted polynomial touches the q-truncation boundary.
    """
    f = _finitize_series(shape, n_max, q_trunc, scale)
    out = []
    for n in range(n_max + 1):
        p = f.coeff_v(n)
        if p.terms and p.degree() >= q_trunc:
            raise ValueError(f"q_trunc too small: P_{n} touches the boundary")
        out.append(p)
    return out


class QDiffEquation:
    """f = R1 + R2 * f(q, t q^g) with factored rational R1, R2.

    Factors are stored as (sign, t_step, q_exp) triples for (1 - sign t^a q^e);
    the R2 prefactor is (coeff, t_step, q_exp).
    """

    def __init__(self, shape: SeriesShape, scale: int = 1):
        self.shape = shape
        self.scale = scale
        self.g = shape.g
        bx, cx = _shape_exponents(shape, scale)
        T = shape.t_exponent()
        g = self.g
        self.r1_num = [(d, int(k) // g, e, k, l) for d, e, k, l in shape.num]
        self.r1_den = [(d, int(k) // g, e, k, l) for d, e, k, l in shape.den]
        self.r2_pref = ((-1) ** shape.a, T, bx + cx)
        self.r2_num = [(d, int(k) // g, int(Fraction(e) * scale)) for d, e, k, l in shape.num]
        self.r2_den = [(d, int(k) // g, int(Fraction(e) * scale)) for d, e, k, l in shape.den]

    def render(self) -> str:
        def fac(sign, a, e):
            s = "-" if sign > 0 else "+"
            qp = f"q^{Fraction(e, self.scale)}" if e else ""
            tp = f"t^{a}" if a > 1 else "t"
            return f"(1 {s} {tp}{qp})"
        num = "".join(fac(d, a, e) for d, a, e in self.r2_num) or "1"
        den = "(1 - t)" + "".join(fac(d, a, e) for d, a, e in self.r2_den)
        c, tp, qe = self.r2_pref
        pref = f"{'-' if c < 0 else ''}t^{tp} q^{Fraction(qe, self.scale)}"
        return f"f = R1 + {pref} {num}/{den} * f(q, t q^{self.g})"

    def residual(self, t_trunc: int = 10, q_trunc: int = 60) -> BiSeries:
        """D2*D1*f - D2*N1 - D1*N2*f(q, t q^g), which must vanish."""
        shape, scale = self.shape, self.scale
        f = _finitize_series(shape, t_trunc, q_trunc, scale)
        fg = f.subst_v_scaled(self.g * scale)
        one = BiSeries.one("t", q_trunc, t_trunc, scale)

        # D1 = (1-t) * prod den (x;Q)_lambda ; N1 = prod num (x;Q)_l
        N1 = one
        for d, a, e, k, l in self.r1_num:
            N1 = _mul_poch_t(N1, d, a, e, k, l, scale, invert=False)
        D1 = one.mul_one_minus(-1, 1, 0)
        for d, a, e, k, l in self.r1_den:
            D1 = _mul_poch_t(D1, d, a, e, k, l, scale, invert=False)

        c, T, qe = self.r2_pref
        N2 = one.mul_monomial(c, T, qe)
        for d, a, e in self.r2_num:
            N2 = N2.mul_one_minus(-d, a, e)
        D2 = one.mul_one_minus(-1, 1, 0)
        for d, a, e in self.r2_den:
            D2 = D2.mul_one_minus(-d, a, e)

        return D2 * D1 * f - D2 * N1 - D1 * N2 * fg


def _finitize_series(shape: SeriesShape, t_trunc: int, q_trunc: int,
                     scale: int) -> BiSeries:
    bx, cx = _shape_exponents(shape, scale)
    T = shape.t_exponent()
    g = shape.g
    f = BiSeries("t", {}, q_trunc, t_trunc, scale)
    j = 0
    while T * j <= t_trunc and (j < 2 or bx * j * j + cx * j <= q_trunc):
        term = BiSeries("t", {T * j: {bx * j * j + cx * j: (-1) ** (shape.a * j)}},
                        q_trunc, t_trunc, scale)
        for d, e, k, l in shape.num:
            term = _mul_poch_t(term, d, int(k) // g, e, k, j + l, scale, invert=False)
        mx = int(Fraction(shape.m) * scale)
        for i in range(j + 1):
            term = term.mul_geom_inverse(1, 1, mx * i)
        for d, e, k, l in shape.den:
            term = _mul_poch_t(term, d, int(k) // g, e, k, j + l, scale, invert=True)
        f = f + term
        j += 1
    return f


def derive_qdiff(shape: SeriesShape, scale: int = 1,
                 t_trunc: int = 10, q_trunc: int = 60) -> QDiffEquation:
    """Emit the first-order nonhomogeneous q-difference equation and
    validate it by substituting the truncated f-series."""
    eq = QDiffEquation(shape, scale)
    res = eq.residual(t_trunc, q_trunc)
    if not res.is_zero():
        raise AssertionError("q-difference residual nonzero: contract violated")
    return eq


def fermionic_from_shape(shape: SeriesShape) -> FermionicSpec:
    """Mechanical expansion of f(q,t): numerator factors via the finite
    q-binomial corollary, denominators via the geometric one; the t-power
    substitution eliminates the main index."""
    g = shape.g
    T = shape.t_exponent()
    n = Poly.var("n")
    j = Poly.var("j")
    sign = Poly.var("j") * Poly.const(shape.a)
    qexp = Poly.const(shape.b) * j * j + Poly.const(shape.c) * j
    factors = []
    t_used = j * Poly.const(T)
    for idx, (d, e, k, l) in enumerate(shape.num, start=1):
        v = Poly.var(f"v{idx}")
        # (d t^(k/g) q^e; q^k)_(j+l) = sum_v [j+l, v]_(q^k) (-d)^v q^(kC(v,2)+ev) t^(kv/g)
        factors.append(Factor("gauss", (j + Poly.const(l), v), Fraction(k)))
        qexp = qexp + Poly.const(Fraction(k, 2)) * v * v \
            + Poly.const(Fraction(e) - Fraction(k, 2)) * v
        sign = sign + (v if d > 0 else Poly())
        t_used = t_used + v * Poly.const(int(k) // g)
    for idx, (d, e, k, l) in enumerate(shape.den, start=1):
        w = Poly.var(f"w{idx}")
        # 1/(d t^(k/g) q^e; q^k)_(j+l) = sum_w [j+l+w-1, w]_(q^k) d^w q^(ew) t^(kw/g)
        factors.append(Factor("gauss", (j + Poly.const(l - 1) + w, w), Fraction(k)))
        qexp = qexp + Poly.const(Fraction(e)) * w
        sign = sign + (w if d < 0 else Poly())
        t_used = t_used + w * Poly.const(int(k) // g)
    # main: 1/(t; q^m)_(j+1) = sum_u [j+u, u]_(q^m) t^u with u = n - t_used
    u = n - t_used
    factors.append(Factor("gauss", (j + u, u), Fraction(shape.m)))
    vars_ = ["j"] + [f"v{i}" for i in range(1, len(shape.num) + 1)] \
        + [f"w{i}" for i in range(1, len(shape.den) + 1)]
    return FermionicSpec(tuple(vars_), tuple(0 for _ in vars_),
                         (Term(sign, qexp, tuple(factors)),))
