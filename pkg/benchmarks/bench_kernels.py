"""Time the compiled kernels against the numpy fallback on U3(q) workloads.

    python benchmarks/bench_kernels.py --q 4 --repeat 3

Outputs are compared for equality before any timing is reported.
"""

import argparse
import json
import time

import numpy as np

from ucov import kernels
from ucov.group import GroupTable


def _best(fn, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def workloads(t: GroupTable, n: int, seed: int):
    rng = np.random.default_rng(seed)
    a = t.mats[rng.integers(0, t.order, n)]
    b = t.mats[rng.integers(0, t.order, n)]
    pts = t.plane.coords.astype(np.uint8)
    pl = t.plane
    G = t.big
    t3 = np.flatnonzero(t.etype == 3)[: n // 4]
    big_m = t.emb[t.mats[t3]]
    verts = t.imag_keys_for(t3[:1])[0] if t3.size else None

    def classify(mod):
        return mod.classify_batch(
            a, t.add, t.mult, t.neg, t.inv_t, t.roots_table, pl.lookup, pl.line_first_absolute, pl.absolute.astype(np.uint8)
        )

    jobs = {
        "mat_mul": lambda m: m.mat_mul(a, b, t.add, t.mult),
        "mat_apply": lambda m: m.mat_apply(a[: n // 8], pts, t.add, t.mult),
        "canon": lambda m: m.canon(a, t.scalars, t.mult, t.Q),
        "classify_batch": classify,
    }
    if verts is not None:
        M = G.order
        vecs = np.stack([verts // (M * M), (verts // M) % M, verts % M], axis=1)
        jobs["apply_big"] = lambda m: m.apply_big(big_m, vecs, G.exp, G.log, G.zech)
    return jobs


def _same(x, y):
    if isinstance(x, tuple):
        return all(_same(u, v) for u, v in zip(x, y))
    return np.array_equal(np.asarray(x), np.asarray(y))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=int, default=4)
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    py = kernels.backend("numpy")
    try:
        cy = kernels.backend("cython")
    except ImportError:
        raise SystemExit("compiled extension not built; run pip install -e . --no-build-isolation")
    t = GroupTable.build(args.q)
    rows = []
    for name, job in workloads(t, args.n, args.seed).items():
        tp, op = _best(lambda: job(py), args.repeat)
        tc, oc = _best(lambda: job(cy), args.repeat)
        if not _same(op, oc):
            raise SystemExit(f"{name}: backends disagree")
        rows.append({"kernel": name, "numpy_s": round(tp, 4), "cython_s": round(tc, 4), "speedup": round(tp / tc, 1)})
    if args.json:
        print(json.dumps({"q": args.q, "n": args.n, "rows": rows}, indent=2))
        return
    print(f"U3({args.q}), {args.n} sampled elements, best of {args.repeat}")
    print(f"{'kernel':<16}{'numpy s':>10}{'cython s':>10}{'speedup':>9}")
    for r in rows:
        print(f"{r['kernel']:<16}{r['numpy_s']:>10.4f}{r['cython_s']:>10.4f}{r['speedup']:>8.1f}x")


if __name__ == "__main__":
    main()
