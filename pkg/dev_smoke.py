"""Dev scratch: validate engine against worked examples (not shipped)."""
import sys
sys.path.insert(0, "src")

from fractions import Fraction
from qrr.corpus import parse_corpus_text, SeriesShape
from qrr.engine import (Evaluator, derive_qdiff, eval_fermionic, eval_bosonic,
                        finitize, fermionic_from_shape)
from qrr.qpoly import QPolynomial

TEXT = """
[identity]
id = A.18
kind = slater
series.b = 1
series.m = 1
product.1.den = 1,1,5 ; 1,4,5

[identity]
id = A.2
kind = slater
series.b = 1/2
series.c = 1/2
series.m = 1
scale = 2
product.1.num = -1,1,1

[identity]
id = A.81
kind = slater
series.b = 1/2
series.c = 1/2
series.m = 1
series.den = 1,1,2,0
scale = 2
product.1.num = 1,1,7 ; 1,6,7 ; 1,7,7 ; 1,5,14 ; 1,9,14 ; -1,1,1
product.1.den = 1,1,1

[identity]
id = F3.2
kind = finitization
slater = A.2
fermionic = sum[j] q^[j^2 + j] gauss[n, j; 2]
bosonic.b = zsum[j] sign[j] q^[2*j^2 + j] gauss[2*n + 1, n + 2*j + 1; 1]
bosonic.t = zsum[k] q^[12*k^2 + 2*k] T1[n + 1, 6*k + 1; 1] - q^[12*k^2 + 10*k + 2] T1[n + 1, 6*k + 3; 1]
rec.from = 1
rec.c1 = 1 + q^[2*n]
initials = 1

[identity]
id = F3.18
kind = finitization
slater = A.18
fermionic = sum[j] q^[j^2] gauss[n - j, j; 1]
bosonic.b = zsum[j] sign[j] q^[5/2*j^2 + 1/2*j] gauss[n, fl(n + 5*j + 1, 2); 1]
bosonic.t = zsum[k] q^[10*k^2 + k] trb[n, 5*k, 5*k; 1] - q^[10*k^2 + 9*k + 2] trb[n, 5*k + 2, 5*k + 2; 1]
rec.from = 2
rec.c1 = 1
rec.c2 = q^[n - 1]
initials = 1 ; 1

[identity]
id = F3.14
kind = finitization
slater = A.14
fermionic = sum[j] q^[j^2 + j] gauss[n - j, j; 1]
bosonic.b = zsum[j] sign[j] q^[5/2*j^2 + 3/2*j] gauss[n + 1, fl(n + 5*j + 3, 2); 1]
bosonic.t = zsum[k] q^[10*k^2 + 3*k] trb[n + 1, 5*k + 1, 5*k + 1; 1] - q^[10*k^2 + 7*k + 1] trb[n + 1, 5*k + 2, 5*k + 2; 1]
rec.from = 2
rec.c1 = 1
rec.c2 = q^[n]
initials = 1 ; 1

[identity]
id = A.14
kind = slater
series.b = 1
series.c = 1
series.m = 1
product.1.den = 1,2,5 ; 1,3,5
"""

corpus = parse_corpus_text(TEXT)
ev = Evaluator(corpus)

print("== three-way ==")
for ident in ("F3.2", "F3.18", "F3.14"):
    r = ev.verify_threeway(corpus.lookup(ident), 12)
    print(r.to_text())

print("== slater ==")
for ident in ("A.18", "A.2", "A.81", "A.14"):
    r = ev.verify_slater(corpus.lookup(ident), 40)
    print(r.to_text())

print("== limits ==")
for ident in ("F3.2", "F3.18", "F3.14"):
    r = ev.verify_limit(corpus.lookup(ident), 12)
    print(r.to_text())

print("== finitize Euler (F3.2 shape) ==")
shape = corpus.lookup("A.2").shape
# Euler shape per the worked example: a=0,b=1,c=1,m=2 at scale 1
shape_e = SeriesShape(0, Fraction(1), Fraction(1), 2)
ps = finitize(shape_e, 4, 60)
want = ["1*q^(0/1)",
        "1*q^(0/1) + 1*q^(2/1)",
        "1*q^(0/1) + 1*q^(2/1) + 1*q^(4/1) + 1*q^(6/1)",
        None, None]
for n, p in enumerate(ps):
    print(n, p.render())

print("== derive_qdiff Euler ==")
eq = derive_qdiff(shape_e, 1, 8, 40)
print(eq.render())

print("== fermionic_from_shape Euler ==")
fs = fermionic_from_shape(shape_e)
for n in range(8):
    a = eval_fermionic(fs, n, 1)
    b = finitize(shape_e, n, 200)[n]
    assert a == b, (n, a.render(), b.render())
print("round-trip ok")

print("== A.81 shape ==")
shape81 = corpus.lookup("A.81").shape
print(shape81)
ps81 = finitize(shape81, 4, 60, scale=2)
for n, p in enumerate(ps81):
    print(n, p.render())

eq81 = derive_qdiff(shape81, 2, 8, 60)
print(eq81.render())
fs81 = fermionic_from_shape(shape81)
print("vars:", fs81.vars)
for n in range(8):
    a = eval_fermionic(fs81, n, 2)
    b = finitize(shape81, n, 300, scale=2)[n]
    assert a == b, (n, a.render(), b.render())
print("round-trip ok")
