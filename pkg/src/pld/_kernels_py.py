"""Numpy implementations of the support-counting kernels.

Bit-vectors are ``uint64`` word arrays, bit ``i`` of the vector lives in
word ``i >> 6`` at position ``i & 63``. Object scopes are sorted ``int32``
arrays of object indices.
"""
import numpy as np

_SHIFT = np.uint64(63)


def popcount(words):
    return int(np.bitwise_count(words).sum())


def popcount_and(a, b):
    return int(np.bitwise_count(a & b).sum())


def _bits_at(words, scope):
    w = words[scope >> 6]
    return ((w >> (scope.astype(np.uint64) & _SHIFT)) & np.uint64(1)).astype(bool)


def mask_indices(words, n_objects):
    bits = np.unpackbits(words.view(np.uint8), bitorder="little")[:n_objects]
    return np.flatnonzero(bits).astype(np.int32)


def filter_scope(scope, words):
    return scope[_bits_at(words, scope)]


def count_in_scope(scope, words):
    return int(np.count_nonzero(_bits_at(words, scope)))


def refine(scope, p_words, r_words):
    """Return ``(sub_scope, co_support)`` for the objects of ``scope`` where
    ``p`` holds; ``co_support`` counts those where ``r`` also holds."""
    sub = scope[_bits_at(p_words, scope)]
    return sub, int(np.count_nonzero(_bits_at(r_words, sub)))
