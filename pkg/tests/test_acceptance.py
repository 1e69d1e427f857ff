"""End-to-end acceptance criteria. Each test carries an ``acceptance``
marker; the terminal summary prints one PASS/FAIL line per criterion."""
import time

import numpy as np
import pytest

from _util import D1_CSV, direct_counts, two_step_dataset, is_law_from_scratch, random_corpus
from pld import kernels, learner, rulefile
from pld.cli import main
from pld.dataset import Dataset, PredicateLanguage
from pld.learner import Hyperparameters, learn, learn_graph
from pld.oracle import enumerate_all_laws
from pld.rules import Rule, premise_scope, rule_stats

ZERO = dict(min_support=1, wilson_gate=False)


@pytest.fixture(scope="module")
def corpus():
    return random_corpus(2024, count=200, max_predicates=12, max_objects=64)


@pytest.mark.acceptance(1, "oracle equivalence to depth d (200 datasets)")
def test_oracle_equivalence(corpus):
    hp = Hyperparameters(d=4, max_size=4, **ZERO)
    t0 = time.perf_counter()
    mismatches = []
    for i, ds in enumerate(corpus):
        targets = range(ds.n_predicates)
        m = learn(ds, targets, hp)
        for t in targets:
            got = {l.rule: (l.stats.support, l.stats.co_support) for l in m.laws[t]}
            exact = {r: (s.support, s.co_support) for r, s in enumerate_all_laws(ds, t, 4).items()}
            if got != exact:
                mismatches.append((i, t))
    elapsed = time.perf_counter() - t0
    print(f"oracle equivalence: {len(corpus)} datasets, {elapsed:.1f}s, mismatches={mismatches}")
    assert mismatches == []
    assert elapsed < 60


@pytest.mark.acceptance(2, "soundness at all depths")
def test_soundness(corpus):
    hp = Hyperparameters(d=2, max_size=5, **ZERO)
    checked = 0
    for ds in corpus:
        m = learn(ds, range(ds.n_predicates), hp)
        for law in m.all_laws():
            assert is_law_from_scratch(ds, law.rule.key, law.rule.conclusion), law.rule
            assert (law.stats.co_support, law.stats.support) == direct_counts(ds, law.rule.key, law.rule.conclusion)
            checked += 1
    assert checked > 0


@pytest.mark.acceptance(3, "hill-climbing incompleteness witness")
def test_incompleteness_witness():
    ds = two_step_dataset()
    r, full = 6, frozenset(range(6))
    exact = enumerate_all_laws(ds, r, 6)
    assert Rule(full, r) in exact
    assert not any(Rule(full - {i}, r) in exact for i in range(6))
    for d in (1, 2, 3, 4):
        m = learn(ds, [r], Hyperparameters(d=d, max_size=6, **ZERO))
        assert Rule(full, r) not in {l.rule for l in m.laws[r]}


@pytest.mark.acceptance(4, "eight-object example end to end through the command line")
def test_d1_end_to_end(tmp_path, capsys):
    (tmp_path / "d1.csv").write_text(D1_CSV)
    (tmp_path / "zero.cfg").write_text("d = 2\nmax_size = 3\nmin_support = 1\na = off\n")
    (tmp_path / "rec.csv").write_text("A,B,R\n1,1,0\n")
    model, data = str(tmp_path / "d1.rules"), str(tmp_path / "d1.csv")
    assert main(["learn", "--data", data, "--config", str(tmp_path / "zero.cfg"),
                 "--targets", "R", "--out", model]) == 0
    m = rulefile.load(model)
    names = m.language.names
    got = {(tuple(names[p] for p in l.rule.key), l.probability) for l in m.laws[names.index("R")]}
    assert got == {((), 0.5), (("A",), 0.75), (("B",), 0.75), (("A", "B"), 1.0)}

    assert main(["predict", "--model", model, "--data", data, "--out", str(tmp_path / "p.csv")]) == 0
    first = (tmp_path / "p.csv").read_text().splitlines()[1].split(",")
    assert first[1:3] == ["R", "1.0"]

    assert main(["predict", "--mode", "anomaly", "--p-min", "0.9", "--model", model,
                 "--data", str(tmp_path / "rec.csv"), "--out", str(tmp_path / "a.csv")]) == 0
    assert (tmp_path / "a.csv").read_text().splitlines()[1].split(",")[1] == "1.0"

    assert main(["cluster", "--model", model, "--data", data, "--out", str(tmp_path / "c.txt")]) == 0
    assert "features: A, B, R\nagreement: 3.0" in (tmp_path / "c.txt").read_text()


@pytest.mark.acceptance(5, "cache coherence over 1000 rule/dataset pairs")
def test_cache_coherence():
    rng = np.random.default_rng(77)
    corpus = random_corpus(78, count=100, max_predicates=12, max_objects=200)
    pairs = 0
    while pairs < 1000:
        ds = corpus[pairs % len(corpus)]
        n = ds.n_predicates
        conclusion = int(rng.integers(n))
        free = [p for p in range(n) if p != conclusion]
        size = int(rng.integers(0, min(len(free), 5) + 1))
        premise = [int(p) for p in rng.choice(free, size, replace=False)]
        # scope built incrementally through the refine kernel, as the learner does
        scope = np.arange(ds.n_objects, dtype=np.int32)
        r_words = ds.column(conclusion)
        co = None
        for p in premise:
            scope, co = kernels.refine(scope, ds.column(p), r_words)
        rule = Rule(frozenset(premise), conclusion)
        uncached = rule_stats(ds, rule)
        cached = rule_stats(ds, rule, scope=scope)
        assert uncached == cached
        assert np.array_equal(scope, premise_scope(ds, premise))
        if co is not None:
            assert co == uncached.co_support
        assert (uncached.co_support, uncached.support) == direct_counts(ds, premise, conclusion)
        pairs += 1
    # caches held by the learner's nodes agree as well
    for ds in corpus[:30]:
        g = learn_graph(ds, 0, Hyperparameters(d=2, max_size=4, **ZERO))
        for node in g.nodes.values():
            assert node.stats == rule_stats(ds, node.rule)


@pytest.mark.acceptance(6, "threshold semantics")
def test_threshold_semantics(corpus, monkeypatch):
    seeds = []
    original = learner.DerivationGraph._new_node

    def spy(self, premise, seed, p):
        if len(premise) > self.hp.d:
            seeds.append((seed, self.hp))
        return original(self, premise, seed, p)

    monkeypatch.setattr(learner.DerivationGraph, "_new_node", spy)
    p_star = 0.6
    hp_p = Hyperparameters(d=1, max_size=4, prob_threshold=p_star, **ZERO)
    hp_g = Hyperparameters(d=1, max_size=4, per_level_gain={2: 0.1, 3: 0.05}, **ZERO)
    hp_0 = Hyperparameters(d=1, max_size=4, **ZERO)
    for ds in corpus:
        targets = range(ds.n_predicates)
        m_p = learn(ds, targets, hp_p)
        m_0 = learn(ds, targets, hp_0)
        for t in targets:
            laws = m_p.laws[t]
            assert all(l.probability >= p_star for l in laws if l.rule.size)
            # base levels are complete, so thresholding only filters them
            base = {l.rule for l in laws if 0 < l.rule.size <= hp_p.d}
            expect = {l.rule for l in m_0.laws[t] if 0 < l.rule.size <= hp_p.d and l.probability >= p_star}
            assert base == expect
        assert all(s.prob >= p_star and s.in_reg for s, hp in seeds if hp is hp_p)

        m_g = learn(ds, targets, hp_g)
        for law in m_g.all_laws():
            k = law.rule.size
            if k < 2:
                continue
            g = hp_g.gain_for_level(k)
            subs = [rule_stats(ds, Rule(law.rule.premise - {p}, law.rule.conclusion)).probability
                    for p in law.rule.premise]
            assert law.probability - max(subs) >= g
    assert any(hp is hp_p for _, hp in seeds)
    assert all(s.in_reg for s, _ in seeds)


@pytest.mark.acceptance(7, "determinism and round trip")
def test_determinism_round_trip(tmp_path, corpus):
    rng = np.random.default_rng(5)
    x = (rng.random((300, 10)) < 0.4).astype(int)
    (tmp_path / "x.csv").write_text(",".join(f"c{j}" for j in range(10)) + "\n"
                                    + "".join(",".join(map(str, r)) + "\n" for r in x))
    outs = []
    for i in range(2):
        out = tmp_path / f"run{i}.rules"
        assert main(["learn", "--data", str(tmp_path / "x.csv"), "--targets", "c0,c1,c2",
                     "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]

    hps = [Hyperparameters(d=1, max_size=3, **ZERO), Hyperparameters(d=2, max_size=3),
           Hyperparameters(d=1, max_size=4, a=0.8, min_support=3, per_level_gain={3: 0.02})]
    for i, ds in enumerate(corpus[:100]):
        m = learn(ds, range(ds.n_predicates), hps[i % len(hps)])
        text = rulefile.serialize(m)
        back = rulefile.parse(text)
        assert back == m
        assert rulefile.serialize(back) == text


def _cheap_product():
    # one CheapProduct object, and it has HighDemand
    lang = PredicateLanguage.boolean(["CheapProduct", "Seasonal", "HighDemand"])
    rows = [(1, 0, 1)] + [(0, 1, 1)] * 6 + [(0, 1, 0)] * 4 + [(0, 0, 1)] * 3 + [(0, 0, 0)] * 6
    return Dataset.from_dense(lang, rows)


@pytest.mark.acceptance(8, "statistical filter on a single-support rule")
def test_statistical_filter():
    ds = _cheap_product()
    rule = Rule(frozenset({0}), 2)
    stats = rule_stats(ds, rule)
    assert (stats.support, stats.probability) == (1, 1.0)
    for ms in (2, 3, 5):
        for gate in (True, False):
            m = learn(ds, [2], Hyperparameters(d=2, max_size=3, min_support=ms, wilson_gate=gate))
            assert rule not in {l.rule for l in m.laws[2]}
    m = learn(ds, [2], Hyperparameters(d=2, max_size=3, min_support=1, wilson_gate=False))
    assert rule in {l.rule for l in m.laws[2]}


def _scaling_dataset(n_objects=10_000, n_predicates=50, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.random((n_objects, n_predicates)) < 0.5
    for t in range(0, n_predicates, 5):
        a, b, c = rng.choice([j for j in range(n_predicates) if j % 5], 3, replace=False)
        x[:, t] = np.where(x[:, a] & x[:, b], rng.random(n_objects) < 0.9,
                           np.where(x[:, c], rng.random(n_objects) < 0.6, rng.random(n_objects) < 0.2))
    return Dataset.from_dense(PredicateLanguage.boolean([f"p{j}" for j in range(n_predicates)]), x)


@pytest.mark.acceptance(9, "scaling smoke test (50 predicates, 10000 objects)")
def test_scaling():
    ds = _scaling_dataset()
    hp = Hyperparameters(d=2, max_size=3, min_support=30, gain_threshold=0.01)
    t0 = time.perf_counter()
    m = learn(ds, range(50), hp)
    elapsed = time.perf_counter() - t0
    nodes = sum(r.nodes for r in m.reports)
    print(f"scaling: backend={kernels.BACKEND} {elapsed:.2f}s, nodes={nodes}, laws={len(m.all_laws())}")
    assert not m.partial
    assert nodes < hp.node_cap
    assert elapsed < 60
    planted = [l for l in m.all_laws() if l.rule.conclusion % 5 == 0 and l.rule.size == 2]
    assert planted, "planted conjunctive dependencies were not found"
