"""Exhaustive law enumeration for small predicate languages.

Every premise subset up to the size limit is counted directly on the dense
object x predicate matrix and compared against all of its proper subsets
with exact integer cross-multiplication. This shares no code with the
learner's counting path and serves as ground truth in tests.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .errors import OracleRefusal
from .rules import Rule, make_stats

MAX_ORACLE_PREDICATES = 16


def _less(a: tuple[int, int], b: tuple[int, int]) -> bool:
    """p(a) < p(b) for (co_support, support) pairs, with 0/0 read as 0."""
    (ca, sa), (cb, sb) = a, b
    if sb == 0:
        return False
    if sa == 0:
        return cb > 0
    return ca * sb < cb * sa


def _proper_subsets(s: tuple):
    for k in range(len(s)):
        yield from combinations(s, k)


def count_all(ds, conclusion: int, max_size: int) -> dict[tuple, tuple[int, int]]:
    """(co_support, support) for every premise of size <= max_size."""
    m = ds.to_dense()
    r = m[:, conclusion]
    preds = [p for p in range(ds.n_predicates) if p != conclusion]
    counts = {}
    for k in range(max_size + 1):
        for s in combinations(preds, k):
            cover = np.all(m[:, list(s)], axis=1) if s else np.ones(ds.n_objects, dtype=bool)
            counts[s] = (int(np.count_nonzero(cover & r)), int(np.count_nonzero(cover)))
    return counts


def enumerate_all_laws(ds, conclusion: int, max_size: int, a: float = 0.95) -> dict:
    """All probabilistic laws with at most ``max_size`` premise predicates.

    Returns a mapping ``Rule -> RuleStats``.
    """
    n_free = ds.n_predicates - 1
    if n_free > MAX_ORACLE_PREDICATES:
        raise OracleRefusal(f"oracle limited to {MAX_ORACLE_PREDICATES} non-conclusion "
                            f"predicates, got {n_free}")
    if max_size < 0:
        raise ValueError("max_size must be >= 0")
    max_size = min(max_size, n_free)
    counts = count_all(ds, conclusion, max_size)
    laws = {}
    for s, cs in counts.items():
        if cs[0] == 0:
            continue
        if all(_less(counts[sub], cs) for sub in _proper_subsets(s)):
            laws[Rule(frozenset(s), conclusion)] = make_stats(cs[1], cs[0], a)
    return laws
