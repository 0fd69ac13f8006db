"""Dev probe: factor series/products into prod (1-q^n)^(-e_n) form (not shipped)."""
import sys
sys.path.insert(0, "src")

from qrr.corpus import load_corpus
from qrr.engine import Evaluator, eval_phi_series
from qrr.products import eval_product_expr
from qrr.qpoly import TruncatedSeries

corpus = load_corpus()
ev = Evaluator(corpus)
N = 40


def peel(series: TruncatedSeries):
    """Exponents e_n with series = prod (1-q^n)^(-e_n), if coefficients allow."""
    g = TruncatedSeries(dict(series.terms), series.trunc, series.scale)
    out = {}
    step = series.scale
    for n in range(1, g.trunc // step + 1):
        e = g.terms.get(n * step, 0)
        if e:
            out[n] = e
            # multiply by (1 - q^n)^e (e may be negative -> divide)
            base = TruncatedSeries({0: 1, n * step: -1}, g.trunc, g.scale)
            if e > 0:
                for _ in range(e):
                    g = g * base
            else:
                inv = base.invert()
                for _ in range(-e):
                    g = g * inv
    return out


for ident in sys.argv[1:]:
    spec = corpus.lookup(ident)
    t = N * spec.scale
    print(f"== {ident} ==")
    if spec.series is not None:
        s = eval_phi_series(spec.series, t, spec.scale)
        print("series:", dict(sorted(s.terms.items()))) if False else None
        print("series peel:", peel(s))
    if spec.product is not None:
        p = eval_product_expr(spec.product, t, spec.scale)
        print("prod   peel:", peel(p))
