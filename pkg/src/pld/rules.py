"""Rules, their frequency statistics, and the law / significance tests."""
from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Iterable

import numpy as np

from . import kernels
from .errors import ConfigError


@dataclass(frozen=True, slots=True)
class Rule:
    """``premise -> conclusion`` over predicate ids."""
    premise: frozenset
    conclusion: int

    def __post_init__(self):
        if not isinstance(self.premise, frozenset):
            object.__setattr__(self, "premise", frozenset(self.premise))
        if self.conclusion in self.premise:
            raise ValueError(f"conclusion {self.conclusion} appears in the premise")

    @property
    def size(self) -> int:
        return len(self.premise)

    @property
    def key(self) -> tuple:
        return tuple(sorted(self.premise))

    def format(self, language=None) -> str:
        def name(p):
            return language[p].name if language is not None else str(p)
        lhs = ", ".join(name(p) for p in self.key) or "{}"
        return f"{lhs} -> {name(self.conclusion)}"

    def __str__(self):
        return self.format()


@dataclass(frozen=True, slots=True)
class RuleStats:
    support: int
    co_support: int
    probability: float
    wilson_lb: float


def probability(co_support: int, support: int) -> float:
    return co_support / support if support else 0.0


def _z(a: float) -> float:
    # lower end of the two-sided interval at confidence a
    return NormalDist().inv_cdf((1.0 + a) / 2.0)


def wilson_lower_bound(k: int, n: int, a: float) -> float:
    """Wilson score lower bound for ``k`` successes out of ``n`` at confidence ``a``."""
    if not 0.0 < a < 1.0:
        raise ConfigError(f"confidence level must be in (0, 1), got {a}")
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if n == 0:
        return 0.0
    z = _z(a)
    p = k / n
    z2n = z * z / n
    centre = p + z2n / 2.0
    margin = z * math.sqrt(p * (1.0 - p) / n + z2n / (4.0 * n))
    lb = (centre - margin) / (1.0 + z2n)
    return min(max(lb, 0.0), p)


def make_stats(support: int, co_support: int, a: float = 0.95) -> RuleStats:
    return RuleStats(support, co_support, probability(co_support, support),
                     wilson_lower_bound(co_support, support, a))


def _check_ids(ds, ids: Iterable[int]) -> None:
    for p in ids:
        if not 0 <= p < ds.n_predicates:
            raise IndexError(f"predicate id {p} out of range 0..{ds.n_predicates - 1}")


def premise_scope(ds, premise: Iterable[int]) -> np.ndarray:
    """Indices of the objects on which every premise predicate holds."""
    premise = sorted(premise)
    _check_ids(ds, premise)
    if not premise:
        return np.arange(ds.n_objects, dtype=np.int32)
    words = ds.column(premise[0]).copy()
    for p in premise[1:]:
        words &= ds.column(p)
    return kernels.mask_indices(words, ds.n_objects)


def rule_stats(ds, rule: Rule, scope: np.ndarray | None = None, a: float = 0.95) -> RuleStats:
    """Support, co-support and probability of ``rule`` on ``ds``.

    ``scope`` may hold the object indices satisfying some sub-premise of the
    rule; counting is then restricted to those objects with identical results.
    """
    _check_ids(ds, [*rule.premise, rule.conclusion])
    r_words = ds.column(rule.conclusion)
    if scope is None:
        if not rule.premise:
            support = ds.n_objects
            co = kernels.popcount(r_words)
        else:
            it = iter(rule.key)
            words = ds.column(next(it)).copy()
            for p in it:
                words &= ds.column(p)
            support = kernels.popcount(words)
            co = kernels.popcount_and(words, r_words)
    else:
        sub = np.ascontiguousarray(scope, dtype=np.int32)
        for p in rule.key:
            sub = kernels.filter_scope(sub, ds.column(p))
        support = len(sub)
        co = kernels.count_in_scope(sub, r_words)
    return make_stats(support, co, a)


def law_condition(rule_prob: float, proper_subrule_probs: Iterable[float]) -> bool:
    """Non-zero probability strictly above every proper subrule's probability."""
    return rule_prob > 0 and all(q < rule_prob for q in proper_subrule_probs)


def significance_check(stats: RuleStats, hp, baseline: float | None = None) -> bool:
    """Statistical gate for a candidate law.

    ``baseline`` is the probability of the empty-premise rule with the same
    conclusion; ``None`` marks the empty-premise rule itself, which always
    passes. With ``hp.wilson_gate`` off only the support count is checked.
    """
    if baseline is None:
        return True
    if stats.support < hp.min_support:
        return False
    if hp.wilson_gate:
        lb = wilson_lower_bound(stats.co_support, stats.support, hp.a)
        return lb > baseline
    return True
