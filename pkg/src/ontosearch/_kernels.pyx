# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for index weighting and cosine scoring.

Every loop accumulates in the same order as ``_kernels_py`` so that both
backends produce bit-identical floats.
"""

from libc.math cimport log, sqrt

BACKEND = "cython"


def term_weights(const long long[:] indptr, const int[:] post_tf, const long long[:] df,
                 long long n_docs, double[:] out):
    cdef Py_ssize_t t, p
    cdef double idf
    for t in range(indptr.shape[0] - 1):
        idf = log(1.0 + <double>n_docs / <double>df[t])
        for p in range(indptr[t], indptr[t + 1]):
            out[p] = (1.0 + log(<double>post_tf[p])) * idf


def doc_norms(const long long[:] indptr, const int[:] post_docs, const double[:] post_w,
              double[:] out):
    cdef Py_ssize_t t, p, d
    cdef double w
    for d in range(out.shape[0]):
        out[d] = 0.0
    for t in range(indptr.shape[0] - 1):
        for p in range(indptr[t], indptr[t + 1]):
            w = post_w[p]
            out[post_docs[p]] += w * w
    for d in range(out.shape[0]):
        out[d] = sqrt(out[d])


def accumulate(const long long[:] indptr, const int[:] post_docs, const double[:] post_w,
               const long long[:] q_ords, const double[:] q_w, double[:] out):
    cdef Py_ssize_t i, p
    cdef long long t
    cdef double qw
    for i in range(q_ords.shape[0]):
        t = q_ords[i]
        qw = q_w[i]
        for p in range(indptr[t], indptr[t + 1]):
            out[post_docs[p]] += qw * post_w[p]
