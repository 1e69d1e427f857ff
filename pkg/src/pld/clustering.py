"""Feature and object clusters from the agreement measure of a law set.

The agreement of a predicate set ``F`` adds the probability of every law
lying entirely inside ``F`` and subtracts the probability of every law whose
premise lies inside ``F`` but whose conclusion does not. Feature clusters
are strict local maxima of agreement under single add/remove moves.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .learner import Law


@dataclass(frozen=True)
class FeatureCluster:
    features: frozenset
    agreement: float
    characteristic_set: tuple[Law, ...]

    @property
    def key(self) -> tuple:
        return tuple(sorted(self.features))


@dataclass
class ClusterHierarchy:
    feature_clusters: list[FeatureCluster]
    object_assignments: dict[int, int | None]
    scores: dict[int, float]
    object_groups: list[tuple[int, list[int]]]
    order: list[tuple[int, int]] = field(default_factory=list)
    epsilon: float = math.inf

    @property
    def below_zero(self) -> list[int]:
        return [o for o, c in self.object_assignments.items() if c is not None and self.scores[o] < 0]


def agreement_terms(laws: Iterable[Law], features: Iterable[int]) -> list[tuple[int, Law]]:
    """``(sign, law)`` for every law the feature set decides; sign is +1 or -1."""
    f = frozenset(features)
    out = []
    for law in laws:
        if law.rule.premise <= f:
            out.append((1 if law.rule.conclusion in f else -1, law))
    return out


def agreement(laws: Iterable[Law], features: Iterable[int]) -> float:
    return math.fsum(s * law.probability for s, law in agreement_terms(laws, features))


def characteristic_set(laws: Iterable[Law], features: Iterable[int]) -> list[Law]:
    """Laws whose premise and conclusion both lie in ``features``."""
    f = frozenset(features)
    return [l for l in laws if l.rule.premise <= f and l.rule.conclusion in f]


def _neighbours(f: frozenset, universe: Sequence[int]):
    for p in universe:
        yield f - {p} if p in f else f | {p}


def _climb(laws, start: frozenset, universe) -> frozenset:
    current, value = start, agreement(laws, start)
    while True:
        best = None
        for nb in _neighbours(current, universe):
            v = agreement(laws, nb)
            if v <= value:
                continue
            rank = (-v, len(nb), tuple(sorted(nb)))
            if best is None or rank < best[0]:
                best = (rank, nb, v)
        if best is None:
            return current
        _, current, value = best


def is_local_maximum(laws, features: Iterable[int], universe: Sequence[int]) -> bool:
    f = frozenset(features)
    v = agreement(laws, f)
    return all(agreement(laws, nb) < v for nb in _neighbours(f, universe))


def find_feature_clusters(laws: Sequence[Law], language) -> list[FeatureCluster]:
    """Steepest-ascent search from every singleton and every law's predicates.

    Ties between equally good moves go to the smaller set, then to the
    lexicographically smaller id tuple. Only strict local maxima are kept.
    """
    laws = list(laws)
    if not laws:
        return []
    universe = list(range(len(language)))
    seeds = [frozenset({p}) for p in universe]
    seeds += [law.rule.premise | {law.rule.conclusion} for law in laws]
    found = {}
    for seed in seeds:
        top = _climb(laws, seed, universe)
        if top not in found and is_local_maximum(laws, top, universe):
            found[top] = FeatureCluster(top, agreement(laws, top),
                                        tuple(characteristic_set(laws, top)))
    return sorted(found.values(), key=lambda c: (-c.agreement, len(c.features), c.key))


def _bands(members: list[tuple[float, int]], epsilon: float) -> list[list[int]]:
    groups: list[list[int]] = []
    prev = None
    for score, obj in sorted(members):
        if prev is None or score - prev > epsilon:
            groups.append([])
        groups[-1].append(obj)
        prev = score
    return groups


def assign_objects(clusters: Sequence[FeatureCluster], ds, epsilon: float = 0.1) -> ClusterHierarchy:
    """Assign each object to the cluster whose characteristic set agrees best
    with its features, and split each cluster's members into bands whose
    neighbouring scores differ by at most ``epsilon``."""
    clusters = list(clusters)
    assignments: dict[int, int | None] = {}
    scores: dict[int, float] = {}
    members: dict[int, list[tuple[float, int]]] = {}
    for o in range(ds.n_objects):
        feats = ds.object_predicates(o)
        best_i, best_s = None, -math.inf
        for i, c in enumerate(clusters):
            s = agreement(c.characteristic_set, feats)
            if s > best_s:
                best_i, best_s = i, s
        assignments[o] = best_i
        if best_i is not None:
            scores[o] = best_s
            members.setdefault(best_i, []).append((best_s, o))
    groups = [(i, g) for i in sorted(members) for g in _bands(members[i], epsilon)]
    order = [(i, j) for i, a in enumerate(clusters) for j, b in enumerate(clusters)
             if a.features < b.features]
    return ClusterHierarchy(clusters, assignments, scores, groups, order, epsilon)
