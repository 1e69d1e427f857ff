"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--objects 10000] [--predicates 50]

Times the individual support-counting kernels and a full learning run with
each backend. The learning run swaps the backend by patching
``pld.kernels``, so both runs see identical data.
"""
import argparse
import timeit

import numpy as np

from pld import kernels
from pld.dataset import Dataset, PredicateLanguage
from pld.learner import Hyperparameters, learn


def make_dataset(n_objects, n_predicates, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.random((n_objects, n_predicates)) < 0.5
    for t in range(n_predicates - 5, n_predicates):
        a, b, c = rng.choice(n_predicates - 5, 3, replace=False)
        x[:, t] = np.where(x[:, a] & x[:, b], rng.random(n_objects) < 0.9,
                           np.where(x[:, c], rng.random(n_objects) < 0.6, rng.random(n_objects) < 0.2))
    lang = PredicateLanguage.boolean([f"p{j}" for j in range(n_predicates)])
    return Dataset.from_dense(lang, x)


def use_backend(impl):
    for name in ("popcount", "popcount_and", "mask_indices", "filter_scope", "count_in_scope", "refine"):
        setattr(kernels, name, getattr(impl, name))


def bench_kernels(ds, impl, number):
    a, b, c = ds.column(0), ds.column(1), ds.column(2)
    scope = impl.mask_indices(a, ds.n_objects)
    cases = {
        "popcount_and": lambda: impl.popcount_and(a, b),
        "mask_indices": lambda: impl.mask_indices(a, ds.n_objects),
        "refine": lambda: impl.refine(scope, b, c),
        "count_in_scope": lambda: impl.count_in_scope(scope, c),
    }
    return {k: min(timeit.repeat(f, number=number, repeat=5)) / number for k, f in cases.items()}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--objects", type=int, default=10_000)
    ap.add_argument("--predicates", type=int, default=50)
    ap.add_argument("--targets", type=int, default=5)
    ap.add_argument("--number", type=int, default=2000)
    args = ap.parse_args()

    ds = make_dataset(args.objects, args.predicates)
    found = kernels.backends()
    if "compiled" not in found:
        print("compiled backend not built; only the numpy backend is timed")
    hp = Hyperparameters(d=2, max_size=3, min_support=30, gain_threshold=0.01)
    targets = list(range(args.predicates - args.targets, args.predicates))

    results = {}
    for name, impl in found.items():
        k = bench_kernels(ds, impl, args.number)
        use_backend(impl)
        t = min(timeit.repeat(lambda: learn(ds, targets, hp), number=1, repeat=3))
        results[name] = (k, t)

    print(f"{args.objects} objects x {args.predicates} predicates, {len(targets)} targets")
    names = list(results)
    print(f"{'kernel':<16}" + "".join(f"{n:>14}" for n in names))
    for kname in results[names[0]][0]:
        print(f"{kname:<16}" + "".join(f"{results[n][0][kname] * 1e6:>12.2f}us" for n in names))
    print(f"{'learn':<16}" + "".join(f"{results[n][1]:>13.3f}s" for n in names))
    if len(names) == 2:
        print(f"learn speedup compiled/numpy: {results['python'][1] / results['compiled'][1]:.2f}x")


if __name__ == "__main__":
    main()
