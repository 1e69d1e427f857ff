"""Command-line interface.

Exit codes:
    0  success
    1  I/O or other runtime error
    2  validation error (bad config, bad data, bad arguments)
    3  schema mismatch between data and model
    4  node cap exceeded; a PARTIAL model file was written
    5  model file parse error
    6  oracle refused the input (language too large)
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
import time
from pathlib import Path

from . import __version__, rulefile
from .clustering import assign_objects, find_feature_clusters
from .config import RunConfig, load_config
from .dataset import apply_language, binarize, load_csv, read_manifest, write_manifest
from .errors import (ConfigError, DataError, OracleRefusal, ParseError, PartialResultError,
                     SchemaError)
from .inference import Failure, anomaly_score, classify, range_predictors, regress_average, violations
from .learner import learn
from .oracle import enumerate_all_laws

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VALIDATION = 2
EXIT_SCHEMA = 3
EXIT_PARTIAL = 4
EXIT_PARSE = 5
EXIT_REFUSED = 6

DEFAULT_EPSILON = 0.1

log = logging.getLogger("pld")


def _fmt_p(p: float) -> str:
    return repr(round(p, 6))


def format_law(law, language) -> str:
    return f"{law.rule.format(language)}  p={_fmt_p(law.probability)} support={law.stats.support}"


def _resolve_targets(text: str, language) -> list[int]:
    """Comma-separated predicate names; a column name expands to all its predicates."""
    out: list[int] = []
    for name in (s.strip() for s in text.split(",")):
        if not name:
            continue
        if name in language.names:
            ids = [language.id_of(name)]
        else:
            ids = language.predicates_of_column(name)
            if not ids:
                raise ConfigError(f"unknown target {name!r}")
        out += [i for i in ids if i not in out]
    if not out:
        raise ConfigError("no targets given")
    return out


def _load_for_model(path, model):
    table = load_csv(path, type_hints=model.language.column_kinds())
    return apply_language(table, model.language)


# ------------------------------------------------------------------ learn

def cmd_learn(args) -> int:
    cfg = load_config(args.config) if args.config else RunConfig()
    hints, range_cols, q = {}, list(args.range_columns or []), cfg.quantization_depth
    if args.manifest:
        hints, mq, mranges = read_manifest(args.manifest)
        q = mq if mq is not None else q
        range_cols += [c for c in mranges if c not in range_cols]
    table = load_csv(args.data, type_hints=hints)
    ds = binarize(table, q, range_cols)
    if args.write_manifest:
        write_manifest(args.write_manifest, table, q, range_cols)
    targets = _resolve_targets(args.targets, ds.language)
    status = EXIT_OK
    t0 = time.perf_counter()
    try:
        model = learn(ds, targets, cfg.hp)
    except PartialResultError as exc:
        model = exc.model
        status = EXIT_PARTIAL
        print(f"PARTIAL: {exc}", file=sys.stderr)
    rulefile.save(model, args.out)
    lang = ds.language
    print(f"objects={ds.n_objects} predicates={ds.n_predicates} targets={len(model.targets)}")
    for t in model.targets:
        print(f"target {lang[t].name}: laws={len(model.laws[t])} baseline p={_fmt_p(model.baselines[t].probability)}")
        for r in model.reports:
            if r.target == t:
                print(f"  level {r.level}: nodes={r.nodes}, laws={r.laws}, time={r.seconds:.3f}s")
    print(f"total time {time.perf_counter() - t0:.3f}s; wrote {args.out}")
    return status


# ---------------------------------------------------------------- predict

def _target_ids(args, model) -> list[int]:
    if args.targets:
        ids = _resolve_targets(args.targets, model.language)
        for i in ids:
            if i not in model.targets:
                raise ConfigError(f"{model.language[i].name!r} is not a target of this model")
        return ids
    return list(model.targets)


def cmd_predict(args) -> int:
    model = rulefile.load(args.model)
    ds = _load_for_model(args.data, model)
    lang = model.language
    targets = _target_ids(args, model)
    hidden = {p for t in targets for p in lang.predicates_of_column(lang[t].column)}
    strict = args.strict_ties
    if strict is None and args.config:
        strict = load_config(args.config).strict_ties
    ranges = range_predictors(model, targets) if args.mode == "regress" else None

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if args.mode == "classify":
        w.writerow(["object", "label", "probability", "n_laws", "diagnostics"])
    elif args.mode == "regress":
        w.writerow(["object", "value", "n_laws", "diagnostics"])
    else:
        w.writerow(["object", "score", "n_laws", "violated"])
    for o in range(ds.n_objects):
        feats = ds.object_predicates(o)
        if args.mode == "classify":
            res = classify(model, feats - hidden, targets, strict_ties=bool(strict))
            if isinstance(res, Failure):
                tied = res.laws
                w.writerow([o, "FAIL", _fmt_p(tied[0].probability) if tied else "", len(tied),
                            "; ".join(l.rule.format(lang) for l in tied)])
            else:
                w.writerow([o, lang[res.label].name, _fmt_p(res.probability), res.n_applicable, ""])
        elif args.mode == "regress":
            res = regress_average(model, feats - hidden, ranges, weighted=not args.unweighted)
            if isinstance(res, Failure):
                w.writerow([o, "FAIL", 0, res.reason])
            else:
                n = sum(1 for t, _ in ranges for l in model.laws[t]
                        if l.rule.size and l.rule.premise <= feats - hidden)
                w.writerow([o, repr(res), n, ""])
        else:
            applicable, violated = violations(model, feats, args.p_min)
            score = anomaly_score(model, feats, args.p_min)
            w.writerow([o, repr(score), len(applicable),
                        "; ".join(l.rule.format(lang) for l in violated)])
    Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    return EXIT_OK


# ---------------------------------------------------------------- cluster

def cluster_report(model, hierarchy, epsilon: float) -> str:
    lang = model.language
    lines = ["# feature/object cluster report", f"epsilon = {epsilon!r}",
             f"clusters = {len(hierarchy.feature_clusters)}"]
    for i, c in enumerate(hierarchy.feature_clusters):
        members = sorted(o for o, ci in hierarchy.object_assignments.items() if ci == i)
        lines += ["", f"cluster {i}",
                  f"features: {', '.join(lang[p].name for p in c.key)}",
                  f"agreement: {c.agreement!r}",
                  "laws:"]
        lines += [f"  {format_law(l, lang)}" for l in c.characteristic_set]
        lines.append("members: " + ", ".join(f"{o} ({hierarchy.scores[o]!r})" for o in members))
        groups = [g for ci, g in hierarchy.object_groups if ci == i]
        lines.append("object groups: " + " ".join("[" + ", ".join(map(str, g)) + "]" for g in groups))
    lines.append("")
    unassigned = [o for o, c in hierarchy.object_assignments.items() if c is None]
    lines.append("unassigned: " + ", ".join(map(str, unassigned)))
    lines.append("below zero: " + ", ".join(map(str, hierarchy.below_zero)))
    lines.append("order: " + ", ".join(f"{i} < {j}" for i, j in hierarchy.order))
    return "\n".join(lines) + "\n"


def cmd_cluster(args) -> int:
    model = rulefile.load(args.model)
    ds = _load_for_model(args.data, model)
    eps = DEFAULT_EPSILON if args.epsilon is None else args.epsilon
    clusters = find_feature_clusters(model.all_laws(), model.language)
    hierarchy = assign_objects(clusters, ds, eps)
    Path(args.out).write_text(cluster_report(model, hierarchy, eps), encoding="utf-8")
    print(f"clusters={len(clusters)} epsilon={eps!r}; wrote {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------- inspect

def cmd_inspect(args) -> int:
    model = rulefile.load(args.model)
    lang = model.language
    conc = lang.id_of(args.conclusion) if args.conclusion else None
    shown = [l for l in model.all_laws()
             if (conc is None or l.rule.conclusion == conc)
             and l.probability >= args.min_prob
             and (args.max_size is None or l.rule.size <= args.max_size)]
    if model.partial:
        print("# PARTIAL model")
    for law in shown:
        print(format_law(law, lang))
    if args.oracle:
        ds = _load_for_model(args.oracle, model)
        diffs = []
        for t in model.targets:
            exact = {r: s for r, s in enumerate_all_laws(ds, t, model.hp.max_size).items()}
            stored = {l.rule: l.stats for l in model.laws[t]}
            for r in sorted(set(stored) - set(exact), key=lambda r: (r.size, r.key)):
                diffs.append(f"- only in model: {r.format(lang)}")
            for r in sorted(set(exact) - set(stored), key=lambda r: (r.size, r.key)):
                diffs.append(f"+ only in oracle: {r.format(lang)}  p={_fmt_p(exact[r].probability)}")
            for r in sorted(set(exact) & set(stored), key=lambda r: (r.size, r.key)):
                a, b = exact[r], stored[r]
                if (a.support, a.co_support) != (b.support, b.co_support):
                    diffs.append(f"~ statistics differ: {r.format(lang)}")
        print("diff: none" if not diffs else "diff:")
        for d in diffs:
            print(d)
    return EXIT_OK


# ------------------------------------------------------------------ main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pld", description="Probabilistic law discovery")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="learn laws from a CSV file")
    p.add_argument("--data", required=True)
    p.add_argument("--config")
    p.add_argument("--out", "--model", dest="out", required=True)
    p.add_argument("--targets", required=True,
                   help="comma-separated predicate or column names")
    p.add_argument("--range-columns", type=lambda s: [c for c in s.split(",") if c],
                   help="numeric columns to encode as disjoint ranges (regression targets)")
    p.add_argument("--manifest", help="read column kinds / quantization depth from a manifest")
    p.add_argument("--write-manifest", help="write the dataset manifest here")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("predict", help="apply a model to a CSV file")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=["classify", "regress", "anomaly"], default="classify")
    p.add_argument("--targets", help="restrict predictors to these targets")
    p.add_argument("--p-min", type=float, default=0.9)
    p.add_argument("--strict-ties", action="store_true", default=None)
    p.add_argument("--unweighted", action="store_true", help="plain mean in regress mode")
    p.add_argument("--config", help="read strict_ties from a config file")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("cluster", help="feature/object clusters from a model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epsilon", type=float, default=None,
                   help=f"object similarity tolerance (default {DEFAULT_EPSILON})")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("inspect", help="list the laws of a model")
    p.add_argument("--model", required=True)
    p.add_argument("--conclusion")
    p.add_argument("--min-prob", type=float, default=0.0)
    p.add_argument("--max-size", type=int)
    p.add_argument("--oracle", metavar="CSV", help="re-derive laws exhaustively and diff")
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SchemaError as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except OracleRefusal as exc:
        print(f"oracle refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (ConfigError, DataError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
