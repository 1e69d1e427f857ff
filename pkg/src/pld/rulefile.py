"""Plain-text model files.

Tab-separated records, one per line::

    PLD-RULES   1
    fingerprint <hex>
    status      complete | PARTIAL
    param       <name>  <value>
    predicate   <json definition>
    target      <predicate name>
    rule        law|baseline  <level>  <conclusion>  <p>  <support>  <co_support>  <wilson_lb>  <premise...>
    end

Floats are written with ``repr`` so parsing restores them exactly.
"""
from __future__ import annotations

import json
from pathlib import Path

from .dataset import Kind, PredicateDef, PredicateLanguage
from .errors import ConfigError, ParseError
from .learner import Hyperparameters, Law, Model
from .rules import Rule, RuleStats

MAGIC = "PLD-RULES"
FORMAT_VERSION = 1

_PRED_FIELDS = ("category", "threshold", "level", "parent_range", "lower", "upper", "interval")


def _check_name(name: str) -> str:
    if "\t" in name or "\n" in name or "\r" in name:
        raise ValueError(f"predicate name {name!r} contains a tab or newline")
    return name


def _predicate_json(p: PredicateDef) -> str:
    d = {"id": p.id, "name": p.name, "column": p.column, "kind": p.column_kind.value,
         "transform": p.transform}
    for f in _PRED_FIELDS:
        v = getattr(p, f)
        if v is not None:
            d[f] = list(v) if isinstance(v, tuple) else v
    if p.has_missing:
        d["has_missing"] = True
    return json.dumps(d, sort_keys=True, ensure_ascii=False)


def _predicate_from_json(text: str) -> PredicateDef:
    d = json.loads(text)
    kw = {f: (tuple(d[f]) if isinstance(d.get(f), list) else d.get(f)) for f in _PRED_FIELDS}
    return PredicateDef(id=d["id"], name=d["name"], column=d["column"], column_kind=Kind(d["kind"]),
                        transform=d["transform"], has_missing=d.get("has_missing", False), **kw)


def _hp_items(hp: Hyperparameters):
    yield "d", str(hp.d)
    yield "max_size", str(hp.max_size)
    yield "a", repr(hp.a)
    yield "wilson_gate", "1" if hp.wilson_gate else "0"
    yield "min_support", str(hp.min_support)
    yield "prob_threshold", repr(hp.prob_threshold)
    yield "gain_threshold", repr(hp.gain_threshold)
    for k in sorted(hp.per_level_gain):
        yield f"per_level_gain.{k}", repr(hp.per_level_gain[k])
    yield "node_cap", str(hp.node_cap)


def _rule_line(kind: str, law: Law, language) -> str:
    s = law.stats
    fields = ["rule", kind, str(law.level), _check_name(language[law.rule.conclusion].name),
              repr(s.probability), str(s.support), str(s.co_support), repr(s.wilson_lb)]
    fields += [_check_name(language[p].name) for p in law.rule.key]
    return "\t".join(fields)


def serialize(m: Model) -> str:
    lang = m.language
    lines = [f"{MAGIC}\t{FORMAT_VERSION}",
             f"fingerprint\t{lang.fingerprint()}",
             f"status\t{'PARTIAL' if m.partial else 'complete'}"]
    lines += [f"param\t{k}\t{v}" for k, v in _hp_items(m.hp)]
    lines += [f"predicate\t{_predicate_json(p)}" for p in lang]
    for t in m.targets:
        lines.append(f"target\t{_check_name(lang[t].name)}")
    for t in m.targets:
        laws = m.laws[t]
        if not any(l.rule.size == 0 for l in laws):
            lines.append(_rule_line("baseline", m.baselines[t], lang))
        lines += [_rule_line("law", l, lang) for l in laws]
    lines.append("end")
    return "\n".join(lines) + "\n"


def _parse_hp(params: dict[str, str], lineno: int) -> Hyperparameters:
    try:
        per_level = {int(k.split(".", 1)[1]): float(v) for k, v in params.items()
                     if k.startswith("per_level_gain.")}
        return Hyperparameters(
            d=int(params["d"]), max_size=int(params["max_size"]), a=float(params["a"]),
            wilson_gate=params["wilson_gate"] == "1", min_support=int(params["min_support"]),
            prob_threshold=float(params["prob_threshold"]),
            gain_threshold=float(params["gain_threshold"]), per_level_gain=per_level,
            node_cap=int(params["node_cap"]))
    except KeyError as exc:
        raise ParseError(f"missing parameter {exc.args[0]!r}", lineno) from None
    except (ValueError, ConfigError) as exc:
        raise ParseError(f"bad parameters: {exc}", lineno) from None


def parse(text: str) -> Model:
    """Inverse of :func:`serialize`; raises :class:`ParseError` with a line number."""
    lines = text.splitlines()
    if not lines or lines[0].split("\t")[0] != MAGIC:
        raise ParseError("not a rule file (missing header)", 1)
    try:
        version = int(lines[0].split("\t")[1])
    except (IndexError, ValueError):
        raise ParseError("bad format version", 1) from None
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format version {version}", 1)
    fingerprint = status = None
    params: dict[str, str] = {}
    preds: list[PredicateDef] = []
    target_names: list[str] = []
    rule_lines: list[tuple[int, list[str]]] = []
    ended = False
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        if ended:
            raise ParseError("content after 'end'", lineno)
        f = line.split("\t")
        tag = f[0]
        if tag == "fingerprint" and len(f) == 2:
            fingerprint = f[1]
        elif tag == "status" and len(f) == 2 and f[1] in ("complete", "PARTIAL"):
            status = f[1]
        elif tag == "param" and len(f) == 3:
            params[f[1]] = f[2]
        elif tag == "predicate" and len(f) == 2:
            try:
                preds.append(_predicate_from_json(f[1]))
            except (ValueError, KeyError, TypeError) as exc:
                raise ParseError(f"bad predicate record: {exc}", lineno) from None
        elif tag == "target" and len(f) == 2:
            target_names.append(f[1])
        elif tag == "rule" and len(f) >= 8:
            rule_lines.append((lineno, f))
        elif tag == "end" and len(f) == 1:
            ended = True
        else:
            raise ParseError(f"unrecognised record {tag!r}", lineno)
    if not ended:
        raise ParseError("truncated file (no 'end' record)", len(lines))
    if fingerprint is None or status is None:
        raise ParseError("missing fingerprint or status", 2)
    try:
        lang = PredicateLanguage(preds)
    except ValueError as exc:
        raise ParseError(f"bad predicate language: {exc}", 2) from None
    if lang.fingerprint() != fingerprint:
        raise ParseError("language fingerprint mismatch", 2)
    hp = _parse_hp(params, 2)
    try:
        targets = [lang.id_of(n) for n in target_names]
    except KeyError as exc:
        raise ParseError(f"unknown target {exc}", 2) from None

    baselines: dict[int, Law] = {}
    laws: dict[int, list[Law]] = {t: [] for t in targets}
    for lineno, f in rule_lines:
        try:
            kind, level = f[1], int(f[2])
            conclusion = lang.id_of(f[3])
            p, support, co, lb = float(f[4]), int(f[5]), int(f[6]), float(f[7])
            premise = frozenset(lang.id_of(n) for n in f[8:])
        except (ValueError, KeyError) as exc:
            raise ParseError(f"bad rule record: {exc}", lineno) from None
        if kind not in ("law", "baseline"):
            raise ParseError(f"unknown rule kind {kind!r}", lineno)
        if conclusion not in laws:
            raise ParseError(f"rule conclusion {f[3]!r} is not a target", lineno)
        if len(premise) != len(f) - 8 or level != len(premise):
            raise ParseError("premise size does not match level", lineno)
        if not (0 <= co <= support) or p != (co / support if support else 0.0):
            raise ParseError("inconsistent rule statistics", lineno)
        try:
            rule = Rule(premise, conclusion)
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        law = Law(rule, RuleStats(support, co, p, lb), level)
        if kind == "baseline" or level == 0:
            if kind == "baseline" and level != 0:
                raise ParseError("baseline must have an empty premise", lineno)
            if conclusion in baselines:
                raise ParseError("duplicate baseline", lineno)
            baselines[conclusion] = law
        if kind == "law":
            laws[conclusion].append(law)
    for t in targets:
        if t not in baselines:
            raise ParseError(f"no baseline for target {lang[t].name!r}", len(lines))
    return Model(lang, hp, targets, baselines, laws, partial=status == "PARTIAL")


def save(m: Model, path) -> None:
    Path(path).write_text(serialize(m), encoding="utf-8")


def load(path) -> Model:
    return parse(Path(path).read_text(encoding="utf-8"))
