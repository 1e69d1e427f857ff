"""Derivation-graph search for probabilistic laws.

For one conclusion predicate ``R`` the graph starts at the rule ``{} -> R``.
Levels ``1..d`` are enumerated completely (base enumeration). Above ``d`` only
single-predicate refinements of the previous level's laws are tried, and a
refinement survives only if it beats every subrule (additional enumeration).
Each node caches the indices of the objects its premise covers, so a
refinement's statistics are counted over its seed's cache instead of the
whole dataset.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .errors import ConfigError, PartialResultError
from .rules import Rule, RuleStats, make_stats, premise_scope, significance_check

log = logging.getLogger(__name__)

DEFAULT_NODE_CAP = 5_000_000


@dataclass(frozen=True)
class Hyperparameters:
    d: int = 2
    max_size: int = 4
    a: float = 0.95
    wilson_gate: bool = True
    min_support: int = 2
    prob_threshold: float = 0.0
    gain_threshold: float = 0.0
    per_level_gain: Mapping[int, float] = field(default_factory=dict)
    node_cap: int = DEFAULT_NODE_CAP

    def __post_init__(self):
        object.__setattr__(self, "per_level_gain",
                           {int(k): float(v) for k, v in dict(self.per_level_gain).items()})
        self.validate()

    def validate(self) -> None:
        if not isinstance(self.d, int) or self.d < 1:
            raise ConfigError(f"d must be an integer >= 1, got {self.d!r}")
        if not isinstance(self.max_size, int) or self.max_size < self.d:
            raise ConfigError(f"max_size must be an integer >= d={self.d}, got {self.max_size!r}")
        if not (isinstance(self.a, (int, float)) and 0.0 < self.a < 1.0):
            raise ConfigError(f"a must be in (0, 1), got {self.a!r}")
        if not isinstance(self.min_support, int) or self.min_support < 0:
            raise ConfigError(f"min_support must be a non-negative integer, got {self.min_support!r}")
        if not (math.isfinite(self.prob_threshold) and 0.0 <= self.prob_threshold <= 1.0):
            raise ConfigError(f"prob_threshold must be in [0, 1], got {self.prob_threshold!r}")
        if not (math.isfinite(self.gain_threshold) and self.gain_threshold >= 0.0):
            raise ConfigError(f"gain_threshold must be finite and >= 0, got {self.gain_threshold!r}")
        for k, v in self.per_level_gain.items():
            if k < 1:
                raise ConfigError(f"per_level_gain level must be >= 1, got {k}")
            if not (math.isfinite(v) and v >= 0.0):
                raise ConfigError(f"per_level_gain.{k} must be finite and >= 0, got {v!r}")
        if not isinstance(self.node_cap, int) or self.node_cap < 1:
            raise ConfigError(f"node_cap must be a positive integer, got {self.node_cap!r}")

    def gain_for_level(self, level: int) -> float:
        return self.per_level_gain.get(level, self.gain_threshold)


class RuleNode:
    """A rule in the derivation graph plus its cached object scope.

    ``max_sub`` is the highest probability among all proper subrules; it is
    ``None`` until every parent has been linked.
    """
    __slots__ = ("premise", "conclusion", "stats", "cache", "parents", "children",
                 "max_sub", "max_sub_node", "is_law", "significant", "in_reg", "witness",
                 "evaluated", "_rule")

    def __init__(self, premise: tuple, conclusion: int, stats: RuleStats, cache: np.ndarray):
        self.premise = premise
        self.conclusion = conclusion
        self.stats = stats
        self.cache = cache
        self.parents: list[RuleNode] = []
        self.children: list[RuleNode] = []
        self.max_sub: float | None = None
        self.max_sub_node: RuleNode | None = None
        self.is_law = False
        self.significant = False
        self.in_reg = False
        self.witness: RuleNode | None = None
        self.evaluated = False
        self._rule = None

    @property
    def rule(self) -> Rule:
        if self._rule is None:
            self._rule = Rule(frozenset(self.premise), self.conclusion)
        return self._rule

    @property
    def object_cache(self) -> np.ndarray:
        return self.cache

    @property
    def prob(self) -> float:
        return self.stats.probability

    @property
    def size(self) -> int:
        return len(self.premise)

    def __repr__(self):
        return f"RuleNode({self.premise} -> {self.conclusion}, p={self.prob:.4g}, n={self.stats.support})"


@dataclass(frozen=True)
class Law:
    rule: Rule
    stats: RuleStats
    level: int

    @property
    def probability(self) -> float:
        return self.stats.probability


@dataclass(frozen=True)
class LevelReport:
    target: int
    level: int
    nodes: int
    laws: int
    seconds: float


class _CapExceeded(Exception):
    pass


def refine(node: RuleNode, p: int) -> Rule:
    """The rule obtained by adding predicate ``p`` to ``node``'s premise."""
    if p in node.premise:
        raise ValueError(f"predicate {p} already in premise {node.premise}")
    if p == node.conclusion:
        raise ValueError(f"predicate {p} is the conclusion")
    return Rule(frozenset(node.premise) | {p}, node.conclusion)


def rule_gain(node: RuleNode) -> float:
    """Probability gain over the strongest immediate subrule."""
    if not node.parents:
        return node.prob
    return node.prob - max(p.prob for p in node.parents)


def apply_thresholds(candidates: Iterable[RuleNode], hp: Hyperparameters, level: int) -> list[RuleNode]:
    """Filter laws of one level by probability and probability gain.

    ``candidates`` must already be significant laws with all parents linked.
    """
    g = hp.gain_for_level(level)
    return [n for n in candidates
            if n.prob >= hp.prob_threshold and rule_gain(n) >= g]


class DerivationGraph:
    """Leveled rule graph for a single conclusion predicate."""

    def __init__(self, ds, conclusion: int, hp: Hyperparameters):
        self.ds = ds
        self.conclusion = conclusion
        self.hp = hp
        self.r_words = ds.column(conclusion)
        self.nodes: dict[tuple, RuleNode] = {}
        self.levels: list[list[RuleNode]] = []
        self.regs: list[list[RuleNode]] = []
        self.reports: list[LevelReport] = []
        self.predicates = [p for p in range(ds.n_predicates) if p != conclusion]

        scope = np.arange(ds.n_objects, dtype=np.int32)
        co = kernels.count_in_scope(scope, self.r_words)
        root = RuleNode((), conclusion, make_stats(ds.n_objects, co, hp.a), scope)
        root.max_sub = -1.0
        root.is_law = root.prob > 0
        root.significant = True
        root.in_reg = root.is_law
        root.evaluated = True
        self.root = root
        self.levels.append([root])
        self._add(root)
        self.regs.append([root] if root.in_reg else [])

    @property
    def baseline(self) -> float:
        return self.root.prob

    def _add(self, node: RuleNode) -> None:
        if len(self.nodes) >= self.hp.node_cap:
            raise _CapExceeded()
        self.nodes[node.premise] = node
        while len(self.levels) <= node.size:
            self.levels.append([])
        if node.size > 0:
            self.levels[node.size].append(node)

    def _level_size(self, k: int) -> int:
        return len(self.levels[k]) if k < len(self.levels) else 0

    def _new_node(self, premise: tuple, seed: RuleNode, p: int) -> RuleNode:
        cache, co = kernels.refine(seed.cache, self.ds.column(p), self.r_words)
        node = RuleNode(premise, self.conclusion, make_stats(len(cache), co, self.hp.a), cache)
        self._add(node)
        return node

    def _materialize(self, premise: tuple) -> RuleNode:
        # subrule requested by find_parents; no cached scope exists, count on the full data
        cache = premise_scope(self.ds, premise)
        co = kernels.count_in_scope(cache, self.r_words)
        node = RuleNode(premise, self.conclusion, make_stats(len(cache), co, self.hp.a), cache)
        self._add(node)
        return node

    @staticmethod
    def _link(parent: RuleNode, child: RuleNode) -> None:
        if parent not in child.parents:
            child.parents.append(parent)
            parent.children.append(child)

    def _sub_max(self, parent: RuleNode) -> tuple[float, RuleNode]:
        if parent.max_sub is not None and parent.max_sub > parent.prob:
            return parent.max_sub, parent.max_sub_node
        return parent.prob, parent

    def find_parents(self, node: RuleNode, bound: float | None = None) -> RuleNode | None:
        """Link every size-1-smaller subrule of ``node``, creating missing ones.

        With ``bound`` set, stop at the first subrule (at any depth) whose
        probability is ``>= bound`` and return it as the witness. Returns
        ``None`` when all parents were linked; ``node.max_sub`` is then set.
        """
        best, best_node = -1.0, None
        prem = node.premise
        for i in range(len(prem)):
            sub = prem[:i] + prem[i + 1:]
            parent = self.nodes.get(sub)
            if parent is None:
                parent = self._materialize(sub)
            if bound is not None and parent.prob >= bound:
                return parent
            if parent.max_sub is None:
                self.find_parents(parent)
            m, m_node = self._sub_max(parent)
            if bound is not None and m >= bound:
                return m_node
            self._link(parent, node)
            if m > best:
                best, best_node = m, m_node
        node.max_sub, node.max_sub_node = best, best_node
        return None

    def _evaluate(self, node: RuleNode, level: int) -> None:
        node.evaluated = True
        node.significant = significance_check(node.stats, self.hp, self.baseline)
        node.is_law = node.prob > 0 and node.prob > node.max_sub

    def base_enumeration(self) -> None:
        hp = self.hp
        for k in range(1, hp.d + 1):
            t0 = time.perf_counter()
            while len(self.levels) <= k:
                self.levels.append([])
            new: list[RuleNode] = []
            for seed in self.levels[k - 1]:
                last = seed.premise[-1] if seed.premise else -1
                for p in self.predicates:
                    if p > last:
                        new.append(self._new_node(seed.premise + (p,), seed, p))
            for node in new:
                self.find_parents(node)
                self._evaluate(node, k)
            laws = [n for n in new if n.is_law and n.significant]
            reg = apply_thresholds(laws, hp, k)
            for n in reg:
                n.in_reg = True
            self.regs.append(reg)
            self.reports.append(LevelReport(self.conclusion, k, self._level_size(k), len(reg),
                                            time.perf_counter() - t0))
            log.debug("target %d level %d: nodes=%d laws=%d", self.conclusion, k,
                      self._level_size(k), len(reg))

    def additional_enumeration(self) -> None:
        hp = self.hp
        k = hp.d
        while k < hp.max_size and self.regs[k]:
            k += 1
            t0 = time.perf_counter()
            candidates: list[RuleNode] = []
            seen = set()
            for seed in self.regs[k - 1]:
                for p in self.predicates:
                    if p in seed.premise:
                        continue
                    premise = tuple(sorted(seed.premise + (p,)))
                    if premise in seen:
                        continue
                    seen.add(premise)
                    node = self.nodes.get(premise)
                    if node is None:
                        node = self._new_node(premise, seed, p)
                    candidates.append(node)
            laws = []
            for node in candidates:
                node.evaluated = True
                node.significant = significance_check(node.stats, hp, self.baseline)
                if not node.significant:
                    continue
                witness = self.find_parents(node, bound=node.prob)
                if witness is not None:
                    node.witness = witness
                    continue
                node.is_law = node.prob > 0
                if node.is_law:
                    laws.append(node)
            reg = apply_thresholds(laws, hp, k)
            for n in reg:
                n.in_reg = True
            while len(self.regs) <= k:
                self.regs.append([])
            self.regs[k] = reg
            self.reports.append(LevelReport(self.conclusion, k, self._level_size(k), len(reg),
                                            time.perf_counter() - t0))
            log.debug("target %d level %d: nodes=%d laws=%d", self.conclusion, k,
                      self._level_size(k), len(reg))

    def laws(self) -> list[Law]:
        out = []
        for level, reg in enumerate(self.regs):
            for n in sorted(reg, key=lambda n: n.premise):
                out.append(Law(n.rule, n.stats, level))
        return out


class Model:
    """Learned laws per conclusion predicate, with baselines and settings."""

    def __init__(self, language, hp: Hyperparameters, targets: Iterable[int],
                 baselines: Mapping[int, Law], laws: Mapping[int, list[Law]],
                 reports: Iterable[LevelReport] = (), partial: bool = False):
        self.language = language
        self.hp = hp
        self.targets = tuple(targets)
        self.baselines = dict(baselines)
        self.laws = {t: list(laws.get(t, [])) for t in self.targets}
        self.reports = list(reports)
        self.partial = partial

    def all_laws(self) -> list[Law]:
        return [law for t in self.targets for law in self.laws[t]]

    def __eq__(self, other):
        if not isinstance(other, Model):
            return NotImplemented
        return (self.language == other.language and self.hp == other.hp
                and self.targets == other.targets and self.baselines == other.baselines
                and self.laws == other.laws and self.partial == other.partial)

    def __repr__(self):
        return f"Model(targets={self.targets}, laws={sum(map(len, self.laws.values()))}, partial={self.partial})"


def learn_graph(ds, target: int, hp: Hyperparameters) -> DerivationGraph:
    g = DerivationGraph(ds, target, hp)
    g.base_enumeration()
    g.additional_enumeration()
    return g


def learn(ds, targets: Iterable[int], hp: Hyperparameters) -> Model:
    """Learn probabilistic laws for each target predicate.

    Raises :class:`PartialResultError` carrying the laws of completed levels
    when the node cap is hit.
    """
    targets = list(targets)
    if not targets:
        raise ConfigError("at least one target predicate is required")
    for t in targets:
        if not 0 <= t < ds.n_predicates:
            raise ConfigError(f"target id {t} out of range")
    hp.validate()
    baselines, laws, reports = {}, {}, []
    for t in targets:
        g = DerivationGraph(ds, t, hp)
        baselines[t] = Law(g.root.rule, g.root.stats, 0)
        try:
            g.base_enumeration()
            g.additional_enumeration()
        except _CapExceeded:
            level = len(g.regs)
            laws[t] = g.laws()
            reports.extend(g.reports)
            model = Model(ds.language, hp, targets[:targets.index(t) + 1], baselines, laws,
                          reports, partial=True)
            raise PartialResultError(
                f"node cap {hp.node_cap} exceeded for target {ds.language[t].name!r} "
                f"at level {level}", model=model, level=level, target=t) from None
        laws[t] = g.laws()
        reports.extend(g.reports)
    return Model(ds.language, hp, targets, baselines, laws, reports)
