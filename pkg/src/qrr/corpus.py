"""Identity corpus: the text DSL, its parser, and the typed entry specs.

Format: line-oriented, indentation-free.  A file is a sequence of blocks,
each opened by one of

    [identity]    [relation]    [duallink]    [certificate]

followed by key = value lines; `#` starts a comment.  Exponent and index
forms are explicit polynomial strings over the declared variable names
(see exprs.py); indices may be whole-argument floors fl(expr, d) with
d in {1, 2}.

Summation grammar inside a representation value:

    fermionic:  sum[j, k>=1, ...]  TERM (+|-) TERM ...
    bosonic:    zsum[j] TERM (+|-) TERM ...          (j runs over all of Z)

    TERM := [sign[poly]] [q^[poly]] FACTOR*
    FACTOR := name[arg, arg, ...; base]   with name in the coefficient
              family (gauss, trb, T0, T1, tau0, t0, t1, U, V)

Every summation variable must be bounded: each needs a gauss factor
whose bottom or depth (top - bottom) decreases in that variable while
not increasing in any other summation variable.  The lint enforces this
and the scale declaration.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .exprs import ExprError, Floor, Poly, parse_index, parse_poly
from .products import PochFactor, ProductComponent, ProductExpr
from .qpoly import QPolynomial

# gauss carries the empty-product boundary reading [A, 0] = 1 for every A,
# which the multisum displays assume at their index floors; gaussz is the
# strict variant ([A, B] = 0 unless 0 <= B <= A) used where a display's
# trailing factor must vanish for the sum to truncate.
COEFF_KINDS = {"gauss": 2, "gaussz": 2, "trb": 3, "T0": 2, "T1": 2, "tau0": 2,
               "t0": 2, "t1": 2, "U": 2, "V": 2}


class CorpusError(ValueError):
    def __init__(self, msg: str, line: int | None = None, ident: str | None = None):
        where = []
        if ident:
            where.append(f"entry {ident}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{msg}" + (f" ({', '.join(where)})" if where else ""))
        self.line = line
        self.ident = ident


# ---------------------------------------------------------------------------
# typed pieces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Factor:
    """One coefficient-family factor inside a summand term."""
    kind: str                       # gauss | trb | T0 | ...
    args: tuple                     # Poly | Floor per argument
    base: Fraction                  # exponents are taken at q^base


@dataclass(frozen=True)
class Term:
    sign: Poly                      # meaning (-1)^sign
    qexp: Poly                      # exponent of q
    factors: tuple[Factor, ...]


@dataclass(frozen=True)
class FermionicSpec:
    vars: tuple[str, ...]
    lower: tuple[int, ...]          # per-variable lower bound (0 or 1)
    terms: tuple[Term, ...]
    lead: QPolynomial | None = None


@dataclass(frozen=True)
class BosonicBranch:
    modulus: int                    # 1 or 2
    residue: int                    # n = modulus * m + residue
    var: str                        # the bilateral variable
    terms: tuple[Term, ...]


@dataclass(frozen=True)
class BosonicSpec:
    label: str                      # "b", "t", "U", ... the display suffix
    branches: tuple[BosonicBranch, ...]
    nfrom: int = 0                  # smallest n at which the display applies


@dataclass(frozen=True)
class FinProdSpec:
    """Closed finite-product form of P_n (the -p displays)."""
    factors: tuple[tuple[int, Fraction, Fraction, int], ...]   # (s, a, k, l)
    nfrom: int = 0


@dataclass(frozen=True)
class RecurrenceSpec:
    start: int                      # validity threshold n0
    coeffs: tuple[tuple[tuple[int, Poly], ...], ...]   # c_i = sum of a*q^(lin in n)
    initials: tuple[QPolynomial, ...]

    @property
    def order(self) -> int:
        return len(self.coeffs)


@dataclass(frozen=True)
class PhiSeries:
    """The phi(q) sum descriptor for a series-product entry.

    sum over n >= start (or n in Z when bilateral) of
        coef * (-1)^(a n) q^(b n^2 + c n + u) *
        prod num (s q^a0; q^k)_{n+l} / [ prod den (s q^a0; q^k)_{n+l} ]
    plus the explicit polynomial `lead` covering skipped initial terms.
    """
    a: int = 0
    b: Fraction = Fraction(1)
    c: Fraction = Fraction(0)
    u: Fraction = Fraction(0)
    m: int = 1
    coef: int = 1
    lead: QPolynomial | None = None
    start: int = 0
    bilateral: bool = False
    num: tuple[tuple[int, Fraction, Fraction, int], ...] = ()   # (s, a, k, l)
    den: tuple[tuple[int, Fraction, Fraction, int], ...] = ()


@dataclass(frozen=True)
class SeriesShape:
    """Parameters accepted by the finitization construction."""
    a: int
    b: Fraction
    c: Fraction
    m: int
    num: tuple[tuple[int, Fraction, Fraction, int], ...] = ()
    den: tuple[tuple[int, Fraction, Fraction, int], ...] = ()
    t_mult: int | None = None       # override for the t-exponent per j

    @property
    def g(self) -> int:
        from math import gcd
        g = self.m
        for _, _, k, _ in self.num + self.den:
            g = gcd(g, int(k))
        return g

    def t_exponent(self) -> int:
        if self.t_mult is not None:
            return self.t_mult
        t = Fraction(2) * self.b / self.g
        if t.denominator != 1 or t <= 0:
            raise ValueError("2b/g must be a positive integer")
        return int(t)


@dataclass(frozen=True)
class DualLink:
    source: str
    target: str
    source_index: Poly              # source n as a poly in the target index n
    qshift: Poly | None = None      # optional extra monomial q^(...) on the reciprocal


@dataclass(frozen=True)
class RelationTerm:
    ident: str
    rep: str | None                 # representation selector or None for default
    coeff: int
    qexp: Poly                      # exponent of the monomial multiplier (may use n)
    nshift: int


@dataclass(frozen=True)
class RelationSpec:
    ident: str
    kind: str                       # sequence | series | qsubst
    terms: tuple[RelationTerm, ...] = ()
    start: int = 0
    stop: int | None = None
    target: str | None = None       # qsubst
    source: str | None = None
    transform: str | None = None    # qneg | qsquare


@dataclass(frozen=True)
class CertificateSpec:
    ident: str
    entry: str
    rep: str
    p: tuple[Poly, ...]             # p_0 .. p_r, polys in q and X (= q^n)
    numer: Poly                     # certificate numerator in q, X, Y
    denom: Poly
    symmetrize: bool = False
    n_lo: int = 2
    n_hi: int = 10
    jpad: int = 2


@dataclass(frozen=True)
class MultiCertificateSpec:
    ident: str
    summand: FermionicSpec | None   # inline two-index summand (vars j, r), or None
    entry: str | None
    p: tuple[Poly, ...]
    numer_j: Poly
    denom_j: Poly
    numer_r: Poly
    denom_r: Poly
    n_lo: int = 4
    n_hi: int = 8
    jpad: int = 2


@dataclass(frozen=True)
class IdentitySpec:
    ident: str
    kind: str                       # slater | finitization | dual | bressoud
    scale: int = 1
    slater: str | None = None       # product/limit link
    limit_transform: str | None = None
    same_as: str | None = None      # duplicate-entry link (display lives there)
    limit_mult: tuple = ()          # extra infinite products applied before the limit check
    note: str | None = None
    provenance: str = "verbatim"    # verbatim | repaired
    repair: str | None = None
    fermionic: FermionicSpec | None = None
    bosonic: tuple[BosonicSpec, ...] = ()
    recurrence: RecurrenceSpec | None = None
    finprod: FinProdSpec | None = None
    series: PhiSeries | None = None
    shape: SeriesShape | None = None
    product: ProductExpr | None = None
    dual_of: DualLink | None = None

    def representations(self) -> list[str]:
        reps = []
        if self.fermionic is not None:
            reps.append("fermionic")
        for b in self.bosonic:
            reps.append(f"bosonic.{b.label}")
        if self.recurrence is not None:
            reps.append("recurrence")
        if self.finprod is not None:
            reps.append("finprod")
        if self.dual_of is not None:
            reps.append("dual")
        return reps

    def rep_floor(self, rep: str) -> int:
        if rep.startswith("bosonic."):
            label = rep.split(".", 1)[1]
            return next(b.nfrom for b in self.bosonic if b.label == label)
        if rep == "finprod":
            return self.finprod.nfrom
        return 0


@dataclass
class Corpus:
    entries: dict[str, IdentitySpec] = field(default_factory=dict)
    relations: dict[str, RelationSpec] = field(default_factory=dict)
    duallinks: list[DualLink] = field(default_factory=list)
    certificates: dict[str, CertificateSpec | MultiCertificateSpec] = field(default_factory=dict)

    def lookup(self, ident: str) -> IdentitySpec:
        if ident not in self.entries:
            raise KeyError(f"unknown identity {ident!r}")
        return self.entries[ident]

    def list_entries(self, kind: str | None = None,
                     provenance: str | None = None) -> list[IdentitySpec]:
        out = [e for e in self.entries.values()
               if (kind is None or e.kind == kind)
               and (provenance is None or e.provenance == provenance)]
        return sorted(out, key=lambda e: _sort_key(e.ident))


def _sort_key(ident: str):
    return [int(p) if p.isdigit() else p
            for p in re.split(r"(\d+)", ident)]


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_FACTOR_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\[")


def _split_top(text: str, sep: str) -> list[str]:
    """Split on sep at bracket depth 0."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _parse_term(text: str, line: int) -> Term:
    """Parse one summand term."""
    text = text.strip()
    sign = Poly()
    qexp = Poly()
    factors: list[Factor] = []
    pos = 0
    while pos < len(text):
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        if text.startswith("sign[", pos):
            end = _match_bracket(text, pos + 4, line)
            sign = sign + parse_poly(text[pos + 5:end])
            pos = end + 1
        elif text.startswith("q^[", pos):
            end = _match_bracket(text, pos + 2, line)
            qexp = qexp + parse_poly(text[pos + 3:end])
            pos = end + 1
        else:
            m = _FACTOR_RE.match(text, pos)
            if not m:
                raise CorpusError(f"cannot parse term at {text[pos:pos+25]!r}", line)
            kind = m.group(1)
            if kind not in COEFF_KINDS:
                raise CorpusError(f"unknown coefficient function {kind!r}", line)
            end = _match_bracket(text, m.end() - 1, line)
            inner = text[m.end():end]
            if ";" in inner:
                arg_text, base_text = inner.rsplit(";", 1)
                base = Fraction(base_text.strip())
            else:
                arg_text, base = inner, Fraction(1)
            args = tuple(parse_index(a) for a in _split_top(arg_text, ","))
            if len(args) != COEFF_KINDS[kind]:
                raise CorpusError(
                    f"{kind} takes {COEFF_KINDS[kind]} arguments, got {len(args)}", line)
            factors.append(Factor(kind, args, base))
            pos = end + 1
    return Term(sign, qexp, tuple(factors))


def _match_bracket(text: str, open_pos: int, line: int) -> int:
    depth = 0
    for i in range(open_pos, len(text)):
        if text[i] == "[":
            depth += 1
        elif text[i] == "]":
            depth -= 1
            if depth == 0:
                return i
    raise CorpusError("unbalanced bracket", line)


def _parse_sum(value: str, line: int, bilateral: bool):
    """Parse `sum[vars] terms` / `zsum[var] terms`."""
    value = value.strip()
    head = "zsum[" if bilateral else "sum["
    if not value.startswith(head):
        raise CorpusError(f"expected {head}...]", line)
    end = _match_bracket(value, len(head) - 1, line)
    var_decls = [v.strip() for v in value[len(head):end].split(",")]
    vars_, lowers = [], []
    for decl in var_decls:
        if ">=" in decl:
            name, lo = decl.split(">=")
            vars_.append(name.strip())
            lowers.append(int(lo))
        else:
            vars_.append(decl)
            lowers.append(0)
    body = value[end + 1:].strip()
    terms: list[Term] = []
    for sgn, text in _split_signed(body, line):
        term = _parse_term(text, line)
        if sgn < 0:
            term = Term(term.sign + Poly.const(1), term.qexp, term.factors)
        terms.append(term)
    return vars_, lowers, terms


def _split_signed(text: str, line: int) -> list[tuple[int, str]]:
    """Split `t1 + t2 - t3` at depth 0 into signed chunks."""
    out: list[tuple[int, str]] = []
    depth = 0
    cur: list[str] = []
    sign = 1
    i = 0
    # guard: ^- exponents must not split terms
    prev_nonspace = ""
    while i < len(text):
        ch = text[i]
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if depth == 0 and ch in "+-" and prev_nonspace not in ("^", "", "+", "-"):
            out.append((sign, "".join(cur)))
            cur = []
            sign = 1 if ch == "+" else -1
        else:
            cur.append(ch)
        if not ch.isspace():
            prev_nonspace = ch
        i += 1
    out.append((sign, "".join(cur)))
    if not out or not out[0][1].strip():
        raise CorpusError("empty summand", line)
    return [(s, t) for s, t in out if t.strip()]


def parse_qmono_sum(text: str, line: int = 0) -> tuple[tuple[int, Poly], ...]:
    """Recurrence-coefficient syntax: sum of  [int] [* q^[linear in n]]  terms,
    e.g. `1 + q^[2] - 2*q^[2*n - 1]`."""
    out = []
    for sgn, chunk in _split_signed(text, line):
        chunk = chunk.strip()
        coeff, qexp = sgn, Poly()
        if "q^[" in chunk:
            head, _, rest = chunk.partition("q^[")
            head = head.strip().rstrip("*").strip()
            if head:
                coeff *= int(head)
            end = _match_bracket("[" + rest, 0, line)
            body = rest[:end - 1]
            if rest[end:].strip():
                raise CorpusError(f"trailing input in coefficient {chunk!r}", line)
            qexp = parse_poly(body)
        else:
            coeff *= int(chunk)
        out.append((coeff, qexp))
    return tuple(out)


def _parse_display_poly(text: str, scale: int, line: int) -> QPolynomial:
    """Polynomial literal over q (display style: q^3 + 2*q^2 + 1)."""
    p = parse_poly(text)
    terms: dict[int, int] = {}
    for m, c in p.terms.items():
        if c.denominator != 1:
            raise CorpusError(f"non-integer coefficient in polynomial {text!r}", line)
        if not m:
            terms[0] = terms.get(0, 0) + int(c)
        elif len(m) == 1 and m[0][0] == "q":
            e = m[0][1] * scale
            terms[e] = terms.get(e, 0) + int(c)
        else:
            raise CorpusError(f"not a polynomial in q: {text!r}", line)
    return QPolynomial(terms, scale)


def _parse_factor_list(value: str, line: int):
    """`s,a,k,l ; s,a,k,l ; ...` quadruples."""
    out = []
    for chunk in value.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) != 4:
            raise CorpusError(f"factor needs s,a,k,l: {chunk!r}", line)
        s = int(parts[0])
        a, k = Fraction(parts[1]), Fraction(parts[2])
        l = int(parts[3])
        if s not in (1, -1) or a <= 0 or k <= 0:
            raise CorpusError(f"bad factor {chunk!r} (need s=+-1, a>0, k>0)", line)
        out.append((s, a, k, l))
    return tuple(out)


def _parse_poch_triples(value: str, line: int):
    out = []
    for chunk in value.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) != 3:
            raise CorpusError(f"product factor needs s,a,k: {chunk!r}", line)
        out.append(PochFactor(int(parts[0]), Fraction(parts[1]), Fraction(parts[2])))
    return tuple(out)


class _BlockParser:
    """Parses one [identity] block's key/value pairs into an IdentitySpec."""

    def __init__(self, kv: dict[str, tuple[str, int]], line: int):
        self.kv = kv
        self.line = line

    def get(self, key: str, default=None):
        if key in self.kv:
            return self.kv[key][0]
        return default

    def build(self) -> IdentitySpec:
        kv = self.kv
        ident = self.get("id")
        if not ident:
            raise CorpusError("entry lacks id", self.line)
        kind = self.get("kind")
        if kind not in ("slater", "finitization", "dual", "bressoud", "relation"):
            raise CorpusError(f"bad kind {kind!r}", self.line, ident)
        scale = int(self.get("scale", "1"))
        provenance = self.get("provenance", "verbatim")
        if provenance not in ("verbatim", "repaired"):
            raise CorpusError(f"bad provenance {provenance!r}", self.line, ident)
        repair = self.get("repair")
        if provenance == "repaired" and not repair:
            raise CorpusError("repaired entries must carry a repair note",
                              self.line, ident)

        fermionic = None
        if "fermionic" in kv:
            val, line = kv["fermionic"]
            vars_, lowers, terms = _parse_sum(val, line, bilateral=False)
            lead = None
            if "fermionic.lead" in kv:
                lv, ll = kv["fermionic.lead"]
                lead = _parse_display_poly(lv, scale, ll)
            fermionic = FermionicSpec(tuple(vars_), tuple(lowers), tuple(terms), lead)

        bos: dict[str, dict] = {}
        floors: dict[str, int] = {}
        for key, (val, line) in kv.items():
            if not key.startswith("bosonic."):
                continue
            parts = key.split(".")
            if len(parts) == 3 and parts[2] == "from":
                floors[parts[1]] = int(val)
                continue
            if len(parts) == 2:
                label, branch = parts[1], None
            elif len(parts) == 3 and parts[2] in ("even", "odd"):
                label, branch = parts[1], parts[2]
            else:
                raise CorpusError(f"bad bosonic key {key!r}", line, ident)
            vars_, lowers, terms = _parse_sum(val, line, bilateral=True)
            if len(vars_) != 1:
                raise CorpusError("bosonic sums are bilateral in one variable",
                                  line, ident)
            if any(lowers):
                raise CorpusError("bilateral sums have no lower bounds", line, ident)
            if branch is None:
                br = BosonicBranch(1, 0, vars_[0], tuple(terms))
            else:
                br = BosonicBranch(2, 0 if branch == "even" else 1, vars_[0], tuple(terms))
            bos.setdefault(label, {})[branch] = br
        bosonic = []
        for label in sorted(bos):
            branches = bos[label]
            nfrom = floors.get(label, 0)
            if None in branches:
                if len(branches) != 1:
                    raise CorpusError("cannot mix plain and parity branches",
                                      self.line, ident)
                bosonic.append(BosonicSpec(label, (branches[None],), nfrom))
            else:
                if set(branches) != {"even", "odd"}:
                    raise CorpusError(f"bosonic.{label} needs both parities",
                                      self.line, ident)
                bosonic.append(BosonicSpec(label, (branches["even"], branches["odd"]),
                                           nfrom))
        for label in floors:
            if label not in bos:
                raise CorpusError(f"floor for unknown bosonic.{label}",
                                  self.line, ident)

        recurrence = None
        if "rec.from" in kv:
            start = int(kv["rec.from"][0])
            coeffs = []
            i = 1
            while f"rec.c{i}" in kv:
                val, cline = kv[f"rec.c{i}"]
                coeffs.append(parse_qmono_sum(val, cline))
                i += 1
            if not coeffs:
                raise CorpusError("recurrence without coefficients", self.line, ident)
            init_val, init_line = kv.get("initials", (None, self.line))
            if init_val is None:
                raise CorpusError("recurrence without initials", self.line, ident)
            initials = tuple(_parse_display_poly(t.strip(), scale, init_line)
                             for t in init_val.split(";"))
            if len(initials) < len(coeffs) or len(initials) < start:
                raise CorpusError(
                    f"need >= max(order={len(coeffs)}, n0={start}) initials, "
                    f"got {len(initials)}", init_line, ident)
            recurrence = RecurrenceSpec(start, tuple(coeffs), initials)

        finprod = None
        if "finprod" in kv:
            finprod = FinProdSpec(
                _parse_factor_list(kv["finprod"][0], kv["finprod"][1]),
                int(self.get("finprod.from", "0")))

        series = None
        if "series.b" in kv:
            series = PhiSeries(
                a=int(self.get("series.sign", "0")),
                b=Fraction(self.get("series.b")),
                c=Fraction(self.get("series.c", "0")),
                u=Fraction(self.get("series.u", "0")),
                m=int(self.get("series.m", "1")),
                coef=int(self.get("series.coef", "1")),
                lead=(_parse_display_poly(kv["series.lead"][0], scale,
                                          kv["series.lead"][1])
                      if "series.lead" in kv else None),
                start=int(self.get("series.start", "0")),
                bilateral=self.get("series.bilateral", "false") == "true",
                num=_parse_factor_list(self.get("series.num", ""), self.line),
                den=_parse_factor_list(self.get("series.den", ""), self.line),
            )

        shape = None
        if "shape.b" in kv:
            shape = SeriesShape(
                a=int(self.get("shape.sign", "0")),
                b=Fraction(self.get("shape.b")),
                c=Fraction(self.get("shape.c", "0")),
                m=int(self.get("shape.m", "1")),
                num=_parse_factor_list(self.get("shape.num", ""), self.line),
                den=_parse_factor_list(self.get("shape.den", ""), self.line),
                t_mult=(int(self.get("shape.tmult")) if "shape.tmult" in kv else None),
            )
        elif series is not None and not series.bilateral and series.start == 0 \
                and series.coef == 1 and series.lead is None and series.u == 0 \
                and series.m >= 1 and series.b > 0 \
                and self.get("shape", "auto") != "none":
            shape = SeriesShape(series.a, series.b, series.c, series.m,
                                series.num, series.den)

        product = None
        comp_ids = sorted({key.split(".")[1] for key in kv
                           if key.startswith("product.")})
        if comp_ids:
            comps = []
            for cid in comp_ids:
                coef = Fraction(self.get(f"product.{cid}.coef", "1"))
                shift = Fraction(self.get(f"product.{cid}.shift", "0"))
                num = _parse_poch_triples(self.get(f"product.{cid}.num", ""), self.line)
                den = _parse_poch_triples(self.get(f"product.{cid}.den", ""), self.line)
                comps.append(ProductComponent(coef, shift, num, den))
            product = ProductExpr(tuple(comps))

        dual_of = None
        if "dual_of" in kv:
            val, line = kv["dual_of"]
            parts = [p.strip() for p in val.split(";")]
            src = parts[0]
            idx = parse_poly(parts[1]) if len(parts) > 1 else Poly.var("n")
            qs = parse_poly(parts[2]) if len(parts) > 2 else None
            dual_of = DualLink(src, ident, idx, qs)

        spec = IdentitySpec(
            ident=ident, kind=kind, scale=scale,
            slater=self.get("slater"),
            limit_transform=self.get("limit_transform"),
            same_as=self.get("same_as"),
            limit_mult=_parse_poch_triples(self.get("limit_mult", ""), self.line),
            note=self.get("note"), provenance=provenance, repair=repair,
            fermionic=fermionic, bosonic=tuple(bosonic), recurrence=recurrence,
            finprod=finprod, series=series, shape=shape, product=product,
            dual_of=dual_of,
        )
        lint_entry(spec, self.line)
        return spec


def parse_corpus_text(text: str, path: str = "<string>") -> Corpus:
    corpus = Corpus()
    block_kind = None
    kv: dict[str, tuple[str, int]] = {}
    block_line = 0

    def flush():
        nonlocal block_kind, kv
        if block_kind is None:
            return
        if block_kind == "identity":
            spec = _BlockParser(kv, block_line).build()
            if spec.ident in corpus.entries:
                raise CorpusError(f"duplicate id {spec.ident}", block_line)
            corpus.entries[spec.ident] = spec
        elif block_kind == "relation":
            rel = _build_relation(kv, block_line)
            corpus.relations[rel.ident] = rel
        elif block_kind == "duallink":
            corpus.duallinks.append(_build_duallink(kv, block_line))
        elif block_kind == "certificate":
            cert = _build_certificate(kv, block_line)
            corpus.certificates[cert.ident] = cert
        else:
            raise CorpusError(f"unknown block type [{block_kind}]", block_line)
        block_kind, kv = None, {}

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line.startswith("["):
            flush()
            block_kind = line.strip().strip("[]")
            block_line = lineno
            continue
        if "=" not in line:
            raise CorpusError(f"expected key = value, got {line!r}", lineno)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if block_kind is None:
            raise CorpusError("key outside block", lineno)
        if key in kv:
            raise CorpusError(f"duplicate key {key}", lineno)
        kv[key] = (value, lineno)
    flush()
    return corpus


def _build_relation(kv, line) -> RelationSpec:
    get = lambda k, d=None: kv[k][0] if k in kv else d
    ident = get("id")
    kind = get("kind")
    if kind not in ("sequence", "series", "qsubst"):
        raise CorpusError(f"bad relation kind {kind!r}", line, ident)
    if kind == "qsubst":
        return RelationSpec(ident, kind, target=get("target"), source=get("source"),
                            transform=get("transform"))
    terms = []
    for chunk in get("terms", "").split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        head, _, rest = chunk.partition(":")
        ids = head.strip()
        rep = None
        if "/" in ids:
            ids, rep = ids.split("/")
        parts = [p.strip() for p in rest.split(",")]
        coeff = int(parts[0])
        qexp = parse_poly(parts[1]) if len(parts) > 1 and parts[1] else Poly()
        nshift = int(parts[2]) if len(parts) > 2 else 0
        terms.append(RelationTerm(ids.strip(), rep, coeff, qexp, nshift))
    rng = get("range", "0..12")
    lo, hi = rng.split("..")
    return RelationSpec(ident, kind, tuple(terms), int(lo), int(hi))


def _build_duallink(kv, line) -> DualLink:
    get = lambda k, d=None: kv[k][0] if k in kv else d
    src, tgt = get("source"), get("target")
    if not src or not tgt:
        raise CorpusError("duallink needs source and target", line)
    idx = parse_poly(get("source_index", "n"))
    qs = parse_poly(get("qshift")) if get("qshift") else None
    return DualLink(src, tgt, idx, qs)


def _build_certificate(kv, line):
    get = lambda k, d=None: kv[k][0] if k in kv else d
    ident = get("id")
    lo, hi = (get("n_range", "2..10")).split("..")
    ps = []
    i = 0
    while f"p{i}" in kv:
        ps.append(parse_poly(kv[f"p{i}"][0]))
        i += 1
    if not ps:
        raise CorpusError("certificate without recurrence coefficients p0..", line, ident)
    if get("kind") == "multisum":
        summand = None
        if "summand" in kv:
            val, sline = kv["summand"]
            vars_, lowers, terms = _parse_sum(val, sline, bilateral=False)
            summand = FermionicSpec(tuple(vars_), tuple(lowers), tuple(terms))
        return MultiCertificateSpec(
            ident=ident, summand=summand, entry=get("entry"),
            p=tuple(ps),
            numer_j=parse_poly(get("numer_j", "0")),
            denom_j=parse_poly(get("denom_j", "1")),
            numer_r=parse_poly(get("numer_r", "0")),
            denom_r=parse_poly(get("denom_r", "1")),
            n_lo=int(lo), n_hi=int(hi), jpad=int(get("jpad", "2")))
    return CertificateSpec(
        ident=ident, entry=get("entry"), rep=get("rep", "b"),
        p=tuple(ps),
        numer=parse_poly(get("numer", "0")),
        denom=parse_poly(get("denom", "1")),
        symmetrize=get("symmetrize", "false") == "true",
        n_lo=int(lo), n_hi=int(hi), jpad=int(get("jpad", "2")))


# ---------------------------------------------------------------------------
# lint
# ---------------------------------------------------------------------------

def _integer_valued(p: Poly, scale: int) -> bool:
    """Is scale*p integer-valued on the integer lattice?  Degree <= 2 per
    variable, so values on a {0,1,2}-grid decide it."""
    from itertools import product as iproduct
    vs = sorted(p.variables())
    for point in iproduct((0, 1, 2), repeat=len(vs)):
        v = p.eval(dict(zip(vs, point))) * scale
        if v.denominator != 1:
            return False
    return True


def lint_entry(spec: IdentitySpec, line: int):
    ident = spec.ident
    # every index form only over known variables; floors have d in {1,2}
    # (Floor.__init__ enforces d); boundedness of fermionic variables:
    if spec.fermionic is not None:
        _lint_bounded(spec.fermionic, ident, line)
    # scale: declared scale must make all exponents and bases integral
    reps: list[Term] = []
    if spec.fermionic:
        reps += list(spec.fermionic.terms)
    for b in spec.bosonic:
        for br in b.branches:
            reps += list(br.terms)
    for t in reps:
        if not _integer_valued(t.qexp, spec.scale):
            raise CorpusError(
                f"q-exponent {t.qexp.render()} fractional at scale {spec.scale}",
                line, ident)
        for f in t.factors:
            if (Fraction(f.base) * spec.scale).denominator != 1:
                raise CorpusError(
                    f"base {f.base} not representable at scale {spec.scale}",
                    line, ident)
    if spec.series is not None:
        sp = spec.series
        probe = (Poly.const(sp.b) * Poly.var("n") * Poly.var("n")
                 + Poly.const(sp.c) * Poly.var("n") + Poly.const(sp.u))
        if not _integer_valued(probe, spec.scale):
            raise CorpusError("series exponents fractional at declared scale",
                              line, ident)
    # verifiability: at least two representations unless a pure-link stub
    if spec.kind in ("finitization", "dual", "bressoud"):
        if len(spec.representations()) < 2:
            raise CorpusError("unverifiable: single representation", line, ident)
    if spec.kind == "slater":
        if spec.series is None and spec.product is None and spec.same_as is None:
            raise CorpusError("slater entries need series/product or a same_as link",
                              line, ident)


def _lint_bounded(f: FermionicSpec, ident: str, line: int):
    """Each variable needs a decreasing gauss functional, in declared
    order: later variables must not increase it (the engine enumerates
    left to right, and additionally enforces a hard runtime cap)."""
    for term in f.terms:
        for i, v in enumerate(f.vars):
            later = f.vars[i + 1:]
            if not _has_bound(term, v, later):
                raise CorpusError(f"variable {v} unbounded in a fermionic term",
                                  line, ident)


def _poly_body(e) -> Poly:
    return e.body if isinstance(e, Floor) else e


def _var_coeff(p: Poly, v: str) -> Fraction:
    c = Fraction(0)
    for m, co in p.terms.items():
        d = dict(m)
        if d.get(v, 0) == 1 and len(d) == 1:
            c += co
    return c


def _has_bound(term: Term, v: str, later) -> bool:
    for fac in term.factors:
        if fac.kind not in ("gauss", "gaussz"):
            continue
        top, bot = (_poly_body(fac.args[0]), _poly_body(fac.args[1]))
        depth = top - bot
        if (fac.kind == "gaussz"
                and _var_coeff(depth, v) < 0
                and all(_var_coeff(depth, w) <= 0 for w in later)):
            return True
        if (_var_coeff(depth, v) < 0
                and all(_var_coeff(depth, w) <= 0 for w in later)
                and _var_coeff(bot, v) >= 0
                and all(_var_coeff(bot, w) >= 0 for w in later)):
            return True
        if (_var_coeff(bot, v) < 0
                and all(_var_coeff(bot, w) <= 0 for w in later)):
            return True
    return False


# ---------------------------------------------------------------------------
# rendering (round-trip support) and file loading
# ---------------------------------------------------------------------------

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
CORPUS_FILES = ("slater.qrr", "finitizations.qrr", "duals.qrr",
                "bressoud.qrr", "relations.qrr", "certificates.qrr")


def corpus_dir() -> str:
    return os.environ.get("QRR_CORPUS_DIR", DATA_DIR)


def load_corpus(directory: str | None = None) -> Corpus:
    directory = directory or corpus_dir()
    merged = Corpus()
    for name in CORPUS_FILES:
        path = os.path.join(directory, name)
        if not os.path.exists(path):
            continue
        with open(path, encoding="utf-8") as fh:
            part = parse_corpus_text(fh.read(), path)
        overlap = set(part.entries) & set(merged.entries)
        if overlap:
            raise CorpusError(f"duplicate ids across files: {sorted(overlap)}")
        merged.entries.update(part.entries)
        merged.relations.update(part.relations)
        merged.duallinks.extend(part.duallinks)
        merged.certificates.update(part.certificates)
    _check_links(merged)
    return merged


def _check_links(corpus: Corpus):
    for rel in corpus.relations.values():
        ids = ([t.ident for t in rel.terms]
               + [x for x in (rel.target, rel.source) if x])
        for ident in ids:
            if ident not in corpus.entries:
                raise CorpusError(f"relation {rel.ident} references unknown {ident}")
        for t in rel.terms:
            if rel.kind == "sequence" and rel.start + t.nshift < 0:
                raise CorpusError(f"relation {rel.ident}: shift drives index below 0")
    for link in corpus.duallinks:
        for ident in (link.source, link.target):
            if ident not in corpus.entries:
                raise CorpusError(f"dual link references unknown {ident}")
    for spec in corpus.entries.values():
        if spec.dual_of and spec.dual_of.source not in corpus.entries:
            raise CorpusError(f"{spec.ident}: dual source {spec.dual_of.source} unknown")
        if spec.slater and spec.slater not in corpus.entries:
            raise CorpusError(f"{spec.ident}: slater link {spec.slater} unknown")
    for cert in corpus.certificates.values():
        if getattr(cert, "entry", None) and cert.entry not in corpus.entries:
            raise CorpusError(f"certificate {cert.ident}: unknown entry {cert.entry}")
