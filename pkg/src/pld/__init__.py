"""Probabilistic law discovery: learn minimal-premise, high-probability rules
from Boolean object-feature data and apply them to classification,
regression, anomaly scoring and clustering."""
from .dataset import (Dataset, Kind, PredicateDef, PredicateLanguage, RawTable, apply_language,
                      binarize, holds, load_csv, median_thresholds)
from .errors import (ConfigError, DataError, ModelIntegrityError, OracleRefusal, ParseError,
                     PartialResultError, PLDError, SchemaError)
from .learner import DerivationGraph, Hyperparameters, Law, Model, RuleNode, learn
from .rules import Rule, RuleStats, law_condition, rule_stats, significance_check, wilson_lower_bound

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DataError", "Dataset", "DerivationGraph", "Hyperparameters", "Kind", "Law",
    "Model", "ModelIntegrityError", "OracleRefusal", "PLDError", "ParseError", "PartialResultError",
    "PredicateDef", "PredicateLanguage", "RawTable", "Rule", "RuleNode", "RuleStats", "SchemaError",
    "apply_language", "binarize", "holds", "law_condition", "learn", "load_csv",
    "median_thresholds", "rule_stats", "significance_check", "wilson_lower_bound",
]
