# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled support-counting kernels; same contracts as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int32_t

cnp.import_array()

cdef extern from *:
    """
    static inline int pld_popcount64(unsigned long long x) {
    #if defined(__GNUC__) || defined(__clang__)
        return __builtin_popcountll(x);
    #else
        int c = 0;
        while (x) { x &= x - 1; c++; }
        return c;
    #endif
    }
    """
    int pld_popcount64(unsigned long long x) nogil


cdef inline bint _bit(const uint64_t[::1] w, int32_t i) noexcept nogil:
    return (w[i >> 6] >> (i & 63)) & 1


def popcount(const uint64_t[::1] words):
    cdef Py_ssize_t i
    cdef long long total = 0
    with nogil:
        for i in range(words.shape[0]):
            total += pld_popcount64(words[i])
    return total


def popcount_and(const uint64_t[::1] a, const uint64_t[::1] b):
    cdef Py_ssize_t i
    cdef long long total = 0
    with nogil:
        for i in range(a.shape[0]):
            total += pld_popcount64(a[i] & b[i])
    return total


def mask_indices(const uint64_t[::1] words, Py_ssize_t n_objects):
    out = np.empty(n_objects, dtype=np.int32)
    cdef int32_t[::1] o = out
    cdef Py_ssize_t i, k = 0
    with nogil:
        for i in range(n_objects):
            if (words[i >> 6] >> (i & 63)) & 1:
                o[k] = <int32_t>i
                k += 1
    return out[:k].copy()


def filter_scope(const int32_t[::1] scope, const uint64_t[::1] words):
    out = np.empty(scope.shape[0], dtype=np.int32)
    cdef int32_t[::1] o = out
    cdef Py_ssize_t i, k = 0
    cdef int32_t j
    with nogil:
        for i in range(scope.shape[0]):
            j = scope[i]
            if _bit(words, j):
                o[k] = j
                k += 1
    return out[:k].copy()


def count_in_scope(const int32_t[::1] scope, const uint64_t[::1] words):
    cdef Py_ssize_t i
    cdef long long c = 0
    with nogil:
        for i in range(scope.shape[0]):
            c += _bit(words, scope[i])
    return c


def refine(const int32_t[::1] scope, const uint64_t[::1] p_words,
           const uint64_t[::1] r_words):
    out = np.empty(scope.shape[0], dtype=np.int32)
    cdef int32_t[::1] o = out
    cdef Py_ssize_t i, k = 0
    cdef long long co = 0
    cdef int32_t j
    with nogil:
        for i in range(scope.shape[0]):
            j = scope[i]
            if _bit(p_words, j):
                o[k] = j
                k += 1
                co += _bit(r_words, j)
    return out[:k].copy(), co
