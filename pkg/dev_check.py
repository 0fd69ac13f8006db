"""Dev driver: verify corpus entries, printing only failures (not shipped)."""
import sys
sys.path.insert(0, "src")
import time

from qrr.corpus import load_corpus
from qrr.engine import Evaluator

corpus = load_corpus()
ev = Evaluator(corpus)

what = sys.argv[1] if len(sys.argv) > 1 else "slater"
only = sys.argv[2:] or None

t0 = time.time()
npass = nfail = nskip = 0
if what in ("slater", "all"):
    for spec in corpus.list_entries(kind="slater"):
        if only and spec.ident not in only:
            continue
        r = ev.verify_slater(spec, 40)
        if r.status == "fail":
            nfail += 1
            print(r.to_text())
        elif r.status == "skipped":
            nskip += 1
        else:
            npass += 1
if what in ("threeway", "all"):
    for kind in ("finitization", "bressoud", "dual"):
        for spec in corpus.list_entries(kind=kind):
            if only and spec.ident not in only:
                continue
            r = ev.verify_threeway(spec, 12)
            if r.status == "fail":
                nfail += 1
                print(r.to_text())
            elif r.status == "skipped":
                nskip += 1
            else:
                npass += 1
if what in ("limit", "all"):
    for kind in ("finitization", "bressoud", "dual"):
        for spec in corpus.list_entries(kind=kind):
            if only and spec.ident not in only:
                continue
            r = ev.verify_limit(spec, 12)
            if r.status == "fail":
                nfail += 1
                print(r.to_text())
            elif r.status == "skipped":
                nskip += 1
            else:
                npass += 1
if what in ("relation", "all"):
    for rel in corpus.relations.values():
        r = ev.verify_relation(rel)
        if r.status == "fail":
            nfail += 1
            print(r.to_text())
        elif r.status == "skipped":
            nskip += 1
        else:
            npass += 1
print(f"[{what}] pass={npass} fail={nfail} skip={nskip}  ({time.time()-t0:.1f}s)")
