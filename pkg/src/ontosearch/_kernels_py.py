"""Pure-Python versions of the index kernels, used when the extension is unavailable."""

from __future__ import annotations

import math

BACKEND = "python"


def term_weights(indptr, post_tf, df, n_docs, out):
    ptr = indptr.tolist()
    tfs = post_tf.tolist()
    dfs = df.tolist()
    log = math.log
    for t in range(len(ptr) - 1):
        idf = log(1.0 + n_docs / dfs[t])
        for p in range(ptr[t], ptr[t + 1]):
            out[p] = (1.0 + log(tfs[p])) * idf


def doc_norms(indptr, post_docs, post_w, out):
    ptr = indptr.tolist()
    docs = post_docs.tolist()
    ws = post_w.tolist()
    acc = [0.0] * len(out)
    for t in range(len(ptr) - 1):
        for p in range(ptr[t], ptr[t + 1]):
            w = ws[p]
            acc[docs[p]] += w * w
    out[:] = [math.sqrt(x) for x in acc]


def accumulate(indptr, post_docs, post_w, q_ords, q_w, out):
    # only the query's postings are converted; the whole arrays can be large
    acc = out.tolist()
    for t, qw in zip(q_ords.tolist(), q_w.tolist()):
        lo, hi = int(indptr[t]), int(indptr[t + 1])
        for d, w in zip(post_docs[lo:hi].tolist(), post_w[lo:hi].tolist()):
            acc[d] += qw * w
    out[:] = acc
