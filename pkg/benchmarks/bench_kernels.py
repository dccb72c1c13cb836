"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--docs N] [--terms N] [--queries N]

Both backends run on the same synthetic index; the script also checks that
their outputs are bit-identical.
"""

import argparse
import time
from collections import Counter

import numpy as np

from ontosearch import kernels
from ontosearch.index import index_from_term_counts


def synthetic_index(n_docs, n_terms, seed):
    rng = np.random.default_rng(seed)
    # Zipf-ish term popularity so some postings lists are long
    popularity = 1.0 / np.arange(1, n_terms + 1)
    popularity /= popularity.sum()
    docs = []
    for d in range(n_docs):
        size = int(rng.integers(20, 120))
        terms = rng.choice(n_terms, size=size, p=popularity)
        docs.append((f"d{d:06d}", Counter(f"kw:t{t}" for t in terms)))
    return index_from_term_counts(docs)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def bench(impl, idx, queries, repeat):
    w = np.zeros_like(idx.post_w)
    norms = np.zeros(idx.n_docs)
    acc = np.zeros(idx.n_docs)

    def score_all():
        for q_ords, q_w in queries:
            acc[:] = 0.0
            impl.accumulate(idx.indptr, idx.post_docs, w, q_ords, q_w, acc)

    t_weights = best_of(lambda: impl.term_weights(idx.indptr, idx.post_tf, idx.df, idx.n_docs, w),
                        repeat)
    t_norms = best_of(lambda: impl.doc_norms(idx.indptr, idx.post_docs, w, norms), repeat)
    t_search = best_of(score_all, repeat)
    return {"term_weights": t_weights, "doc_norms": t_norms, "accumulate": t_search}, \
        (w.tobytes(), norms.tobytes(), acc.tobytes())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--docs", type=int, default=5000)
    ap.add_argument("--terms", type=int, default=20000)
    ap.add_argument("--queries", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    idx = synthetic_index(args.docs, args.terms, args.seed)
    rng = np.random.default_rng(args.seed + 1)
    queries = []
    for _ in range(args.queries):
        q = np.unique(rng.integers(0, idx.n_terms, size=int(rng.integers(2, 10)))).astype(np.int64)
        queries.append((q, rng.random(len(q)) + 0.5))
    print(f"index: {idx.n_docs} docs, {idx.n_terms} terms, {len(idx.post_docs)} postings; "
          f"{args.queries} queries; best of {args.repeat}")

    results = {}
    outputs = {}
    for impl in kernels.available:
        results[impl.BACKEND], outputs[impl.BACKEND] = bench(impl, idx, queries, args.repeat)
    if kernels.compiled_backend is None:
        print("compiled kernels not built; showing the Python fallback only")

    names = list(results)
    print(f"{'kernel':<14}" + "".join(f"{n + ' (s)':>16}" for n in names)
          + ("   speedup" if len(names) == 2 else ""))
    for kernel in ("term_weights", "doc_norms", "accumulate"):
        row = f"{kernel:<14}" + "".join(f"{results[n][kernel]:>16.5f}" for n in names)
        if len(names) == 2:
            row += f"{results[names[1]][kernel] / results[names[0]][kernel]:>9.1f}x"
        print(row)
    if len(names) == 2:
        same = outputs[names[0]] == outputs[names[1]]
        print("outputs bit-identical:", "yes" if same else "NO")
        return 0 if same else 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
