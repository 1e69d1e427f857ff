"""Flat ``key = value`` configuration files for learning runs.

Recognised keys: ``d``, ``max_size``, ``a`` (a level in (0, 1), or ``off``
to drop the Wilson gate and keep only ``min_support``), ``min_support``,
``prob_threshold``, ``gain_threshold``, ``per_level_gain.<k>``,
``quantization_depth``, ``node_cap`` and ``strict_ties``. Lines starting
with ``#`` are comments.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .learner import DEFAULT_NODE_CAP, Hyperparameters

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass(frozen=True)
class RunConfig:
    hp: Hyperparameters = field(default_factory=Hyperparameters)
    quantization_depth: int = 2
    strict_ties: bool = False


def _bool(value: str) -> bool:
    v = value.lower()
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise ValueError(value)


def parse_config(text: str) -> RunConfig:
    hp_kw: dict = {}
    per_level: dict[int, float] = {}
    q, strict = 2, False
    converters = {"d": int, "max_size": int, "min_support": int, "node_cap": int,
                  "prob_threshold": float, "gain_threshold": float}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (s.strip() for s in line.partition("="))
        if not sep or not key or not value:
            raise ConfigError(f"config line {lineno}: expected 'key = value'")
        try:
            if key in converters:
                hp_kw[key] = converters[key](value)
            elif key == "a":
                if value.lower() == "off":
                    hp_kw["wilson_gate"] = False
                else:
                    hp_kw["a"] = float(value)
                    hp_kw["wilson_gate"] = True
            elif key.startswith("per_level_gain."):
                per_level[int(key.split(".", 1)[1])] = float(value)
            elif key == "quantization_depth":
                q = int(value)
            elif key == "strict_ties":
                strict = _bool(value)
            else:
                raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        except ConfigError:
            raise
        except ValueError:
            raise ConfigError(f"config line {lineno}: bad value {value!r} for {key!r}") from None
    if q < 1:
        raise ConfigError(f"quantization_depth must be >= 1, got {q}")
    hp_kw.setdefault("node_cap", DEFAULT_NODE_CAP)
    return RunConfig(Hyperparameters(per_level_gain=per_level, **hp_kw), q, strict)


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))
