"""Tiny expression grammar shared by the corpus files and the certificate
payloads.

Expressions are polynomials over named variables with rational
coefficients: integers, variables, + - * ^, parentheses, and rational
literals written p/2.  Division is only permitted between integer
literals.  Floor forms are written fl(expr, d) and floor toward minus
infinity; they may appear only where the corpus grammar expects an index.
"""

from __future__ import annotations

from fractions import Fraction

from .qpoly import QPolynomial

Monomial = tuple[tuple[str, int], ...]   # sorted ((var, power), ...)


class Poly:
    """Multivariate polynomial with Fraction coefficients (powers may be
    negative, so strictly a Laurent polynomial)."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Monomial, Fraction] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): Fraction(c)})

    @classmethod
    def var(cls, name: str) -> "Poly":
        return cls({((name, 1),): Fraction(1)})

    def __add__(self, other: "Poly") -> "Poly":
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return Poly(t)

    def __sub__(self, other: "Poly") -> "Poly":
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) - c
        return Poly(t)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                pows: dict[str, int] = dict(m1)
                for v, p in m2:
                    pows[v] = pows.get(v, 0) + p
                m = tuple(sorted((v, p) for v, p in pows.items() if p))
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            if len(self.terms) == 1:
                m, c = next(iter(self.terms.items()))
                if c in (1, -1):
                    mm = tuple(sorted((v, p * n) for v, p in m))
                    return Poly({mm: Fraction(c ** (n % 2))})
            raise ValueError("negative powers only for unit monomials")
        r = Poly.const(1)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> set[str]:
        return {v for m in self.terms for v, _ in m}

    def eval(self, env: dict[str, Fraction | int]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            val = c
            for v, p in m:
                if v not in env:
                    raise KeyError(f"unbound variable {v!r}")
                val *= Fraction(env[v]) ** p
            total += val
        return total

    def eval_int(self, env) -> int:
        v = self.eval(env)
        if v.denominator != 1:
            raise ValueError(f"expression value {v} is not an integer")
        return int(v)

    def eval_monomials(self, env: dict[str, int], scale: int) -> QPolynomial:
        """Evaluate with each variable bound to the q-monomial x^env[var];
        coefficients must be integers."""
        out: dict[int, int] = {}
        for m, c in self.terms.items():
            if c.denominator != 1:
                raise ValueError("monomial evaluation needs integer coefficients")
            e = 0
            for v, p in m:
                e += env[v] * p
            out[e] = out.get(e, 0) + int(c)
        return QPolynomial(out, scale)

    def degree_in(self, var: str) -> int:
        d = 0
        for m in self.terms:
            for v, p in m:
                if v == var:
                    d = max(d, p)
        return d

    def coeff_of(self, var: str, power: int) -> "Poly":
        """Coefficient of var^power, as a Poly in the remaining variables."""
        out = {}
        for m, c in self.terms.items():
            pows = dict(m)
            if pows.get(var, 0) == power:
                mm = tuple(sorted((v, p) for v, p in pows.items() if v != var))
                out[mm] = out.get(mm, 0) + c
        return Poly(out)

    def subst(self, var: str, value: "Poly") -> "Poly":
        out = Poly()
        for m, c in self.terms.items():
            term = Poly({tuple((v, p) for v, p in m if v != var): c})
            p = dict(m).get(var, 0)
            if p:
                term = term * (value ** p)
            out = out + term
        return out

    def render(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for m, c in sorted(self.terms.items()):
            parts = [] if c == 1 and m else [str(c)]
            for v, p in m:
                parts.append(v if p == 1 else f"{v}^{p}")
            bits.append("*".join(parts) or str(c))
        return " + ".join(bits)

    def __repr__(self):
        return f"Poly({self.render()})"


class Floor:
    """floor(body / d) with floor toward minus infinity; d in {1, 2}."""

    __slots__ = ("body", "div")

    def __init__(self, body: Poly, div: int):
        if div not in (1, 2):
            raise ValueError(f"floor divisor must be 1 or 2, got {div}")
        self.body = body
        self.div = div

    def eval_int(self, env) -> int:
        v = self.body.eval(env)
        scaled = v / self.div
        return scaled.numerator // scaled.denominator   # floor toward -inf

    def variables(self):
        return self.body.variables()

    def render(self):
        return f"fl({self.body.render()}, {self.div})"

    def __eq__(self, other):
        return (isinstance(other, Floor) and self.div == other.div
                and self.body == other.body)

    def __repr__(self):
        return self.render()


class ExprError(ValueError):
    pass


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise ExprError(f"{msg} at column {self.pos + 1} in {self.text!r}")

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def parse(self):
        e = self.expr()
        if self.peek():
            self.error("trailing input")
        return e

    def expr(self):
        neg = False
        if self.peek() == "-":
            self.pos += 1
            neg = True
        elif self.peek() == "+":
            self.pos += 1
        e = self.term()
        if neg:
            e = -e
        while self.peek() in ("+", "-"):
            op = self.peek()
            self.pos += 1
            t = self.term()
            e = e + t if op == "+" else e - t
        return e

    def term(self):
        e = self.power()
        while self.peek() == "*":
            self.pos += 1
            e = e * self.power()
        return e

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            neg = self.peek() == "-"
            if neg:
                self.pos += 1
            n = self.integer()
            return base ** (-n if neg else n)
        return base

    def integer(self) -> int:
        c = self.peek()
        if not c.isdigit():
            self.error("expected integer")
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        return int(self.text[start:self.pos])

    def atom(self):
        c = self.peek()
        if c == "(":
            self.pos += 1
            e = self.expr()
            self.expect(")")
            return e
        if c.isdigit():
            n = self.integer()
            if self.peek() == "/":
                self.pos += 1
                d = self.integer()
                return Poly.const(Fraction(n, d))
            return Poly.const(n)
        if c.isalpha() or c == "_":
            start = self.pos
            while self.pos < len(self.text) and (self.text[self.pos].isalnum()
                                                 or self.text[self.pos] == "_"):
                self.pos += 1
            name = self.text[start:self.pos]
            if name == "fl":
                self.error("floor is only allowed as a whole index argument")
            return Poly.var(name)
        self.error("unexpected character")


def parse_poly(text: str) -> Poly:
    return _Parser(text).parse()


def parse_index(text: str) -> Poly | Floor:
    """Parse an index argument: a polynomial, or a top-level fl(poly, d)."""
    stripped = text.strip()
    if stripped.startswith("fl(") and stripped.endswith(")"):
        inner = stripped[3:-1]
        depth = 0
        for i, ch in enumerate(inner):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth < 0:
                    break   # the fl( wrapper closed early: not a whole-arg floor
            elif ch == "," and depth == 0:
                body = parse_poly(inner[:i])
                div_txt = inner[i + 1:].strip()
                if not div_txt.isdigit():
                    raise ExprError(f"floor divisor must be an integer literal in {text!r}")
                return Floor(body, int(div_txt))
    return parse_poly(text)


def eval_index(e: Poly | Floor, env) -> int:
    return e.eval_int(env)
