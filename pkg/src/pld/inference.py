"""Applying learned laws to objects: classification, regression by range
averaging, and anomaly scoring."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ConfigError, ModelIntegrityError
from .learner import Law, Model


@dataclass(frozen=True)
class Prediction:
    label: int
    probability: float
    support_laws: tuple[Law, ...]
    n_applicable: int = 0


@dataclass(frozen=True)
class Failure:
    """No unique answer; ``laws`` are the tied laws (empty if none applied)."""
    reason: str
    laws: tuple[Law, ...] = field(default=())


def _check_features(m: Model, obj: Iterable[int]) -> frozenset:
    obj = frozenset(obj)
    for p in obj:
        if not 0 <= p < len(m.language):
            raise ValueError(f"unknown predicate id {p}")
    return obj


def applicable_laws(m: Model, obj: Iterable[int], target: Iterable[int] | None = None) -> list[Law]:
    """Stored laws whose premise is a subset of the object's true predicates.

    Baseline rules are included for every selected target, law or not.
    """
    obj = _check_features(m, obj)
    wanted = m.targets if target is None else tuple(t for t in m.targets if t in set(target))
    out = []
    for t in wanted:
        base = m.baselines.get(t)
        laws = m.laws.get(t, [])
        if base is not None and not any(l.rule.size == 0 for l in laws):
            out.append(base)
        out.extend(l for l in laws if l.rule.premise <= obj)
    return out


def _max_group(laws: Sequence[Law]) -> tuple[float, list[Law]]:
    best = max(l.probability for l in laws)
    return best, [l for l in laws if l.probability == best]


def classify(m: Model, obj: Iterable[int], class_predictors: Sequence[int],
             strict_ties: bool = False) -> Prediction | Failure:
    """Label an object by its highest-probability applicable law.

    Baseline rules decide only when no other law fires. A tie between laws
    with different conclusions fails; with ``strict_ties`` any tie fails.
    """
    if not class_predictors:
        raise ConfigError("class_predictors must be non-empty")
    preds = set(class_predictors)
    missing = [c for c in class_predictors if c not in m.baselines]
    if len(missing) == len(class_predictors):
        raise ModelIntegrityError(f"model has no baseline rule for predictors {missing}")
    applicable = applicable_laws(m, obj, preds)
    pool = [l for l in applicable if l.rule.size > 0]
    if not pool:
        pool = [m.baselines[c] for c in class_predictors if c in m.baselines]
    best, tied = _max_group(pool)
    conclusions = {l.rule.conclusion for l in tied}
    if len(conclusions) > 1 or (strict_ties and len(tied) > 1):
        return Failure("conflicting laws", tuple(tied))
    return Prediction(tied[0].rule.conclusion, best, tuple(tied), len(pool))


def regress_average(m: Model, obj: Iterable[int], range_predictors: Sequence[tuple[int, tuple[float, float]]],
                    weighted: bool = True) -> float | Failure:
    """Mean of range midpoints over applicable non-baseline laws.

    Weighted by law probability unless ``weighted`` is false.
    """
    mids = {}
    for pid, interval in range_predictors:
        if interval is None:
            raise ConfigError(f"predictor {pid} has no numeric range")
        lo, hi = interval
        mids[pid] = (lo + hi) / 2.0
    laws = [l for l in applicable_laws(m, obj, mids) if l.rule.size > 0]
    if not laws:
        return Failure("no applicable law")
    if weighted:
        total = sum(l.probability for l in laws)
        return sum(l.probability * mids[l.rule.conclusion] for l in laws) / total
    return sum(mids[l.rule.conclusion] for l in laws) / len(laws)


def range_predictors(m: Model, targets: Iterable[int] | None = None) -> list[tuple[int, tuple[float, float]]]:
    """``(id, interval)`` for model targets carrying range provenance."""
    targets = m.targets if targets is None else targets
    out = []
    for t in targets:
        p = m.language[t]
        if p.interval is None:
            raise ConfigError(f"predicate {p.name!r} has no numeric range")
        out.append((t, p.interval))
    return out


def high_probability_laws(m: Model, p_min: float) -> list[Law]:
    """Stored laws with probability >= ``p_min``.

    A baseline rule counts only if it is itself a law (non-zero probability).
    """
    if not 0.0 <= p_min <= 1.0:
        raise ConfigError(f"p_min must be in [0, 1], got {p_min}")
    return [l for l in m.all_laws() if l.probability >= p_min]


def violations(m: Model, record: Iterable[int], p_min: float = 0.9) -> tuple[list[Law], list[Law]]:
    """Applicable high-probability laws and the subset the record violates."""
    record = _check_features(m, record)
    applicable = [l for l in high_probability_laws(m, p_min) if l.rule.premise <= record]
    return applicable, [l for l in applicable if l.rule.conclusion not in record]


def anomaly_score(m: Model, record: Iterable[int], p_min: float = 0.9) -> float:
    """Fraction of applicable high-probability laws the record violates.

    ``record`` is the full set of true predicates, conclusions included.
    The score is 0 when no such law applies.
    """
    applicable, violated = violations(m, record, p_min)
    return len(violated) / len(applicable) if applicable else 0.0
