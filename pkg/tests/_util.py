"""Shared builders and brute-force helpers for the test suite."""
from itertools import combinations

import numpy as np

from pld.dataset import Dataset, PredicateLanguage

# eight-object example: rows (A, B, R) for o1..o8
D1_ROWS = [(1, 1, 1), (1, 1, 1), (1, 0, 1), (1, 0, 0), (0, 1, 0), (0, 1, 1), (0, 0, 0), (0, 0, 0)]
D1_CSV = "A,B,R\n" + "".join(",".join(map(str, r)) + "\n" for r in D1_ROWS)
A, B, R = 0, 1, 2


def d1():
    return Dataset.from_dense(PredicateLanguage.boolean(["A", "B", "R"]), D1_ROWS)


def boolean_dataset(matrix, prefix="p"):
    m = np.asarray(matrix, dtype=bool)
    return Dataset.from_dense(PredicateLanguage.boolean([f"{prefix}{j}" for j in range(m.shape[1])]), m)


def random_dataset(rng, max_predicates=12, max_objects=64, min_predicates=2):
    n_pred = int(rng.integers(min_predicates, max_predicates + 1))
    n_obj = int(rng.integers(1, max_objects + 1))
    density = rng.uniform(0.15, 0.85)
    return boolean_dataset(rng.random((n_obj, n_pred)) < density)


def random_corpus(seed, count=200, **kw):
    rng = np.random.default_rng(seed)
    return [random_dataset(rng, **kw) for _ in range(count)]


def direct_counts(ds, premise, conclusion):
    """(co_support, support) by row iteration over the dense matrix."""
    m = ds.to_dense()
    support = co = 0
    for row in m:
        if all(row[p] for p in premise):
            support += 1
            co += bool(row[conclusion])
    return co, support


def prob_less(a, b):
    """Exact p(a) < p(b) for (co, support) pairs, 0/0 read as 0."""
    (ca, sa), (cb, sb) = a, b
    if sb == 0:
        return False
    if sa == 0:
        return cb > 0
    return ca * sb < cb * sa


def is_law_from_scratch(ds, premise, conclusion):
    m = ds.to_dense()
    r = m[:, conclusion]

    def counts(s):
        cover = np.all(m[:, list(s)], axis=1) if s else np.ones(len(m), dtype=bool)
        return int((cover & r).sum()), int(cover.sum())

    mine = counts(premise)
    if mine[0] == 0:
        return False
    premise = sorted(premise)
    for k in range(len(premise)):
        for sub in combinations(premise, k):
            if not prob_less(counts(sub), mine):
                return False
    return True


def two_step_dataset():
    """P1..P4 -> R is a law, adding P5 lowers the probability, and
    P1..P6 -> R beats every subrule while no size-5 subrule is a law."""
    rows = []
    full = set(range(6))

    def add(preds, r, count):
        rows.extend([[j in preds for j in range(6)] + [r]] * count)

    add(full, 1, 2)
    for i in range(6):
        add(full - {i}, 0, 1)
    add({5}, 1, 8)
    add({0, 1, 2, 3}, 1, 4)
    add(set(), 0, 10)
    lang = PredicateLanguage.boolean([f"P{j}" for j in range(1, 7)] + ["R"])
    return Dataset.from_dense(lang, rows)
