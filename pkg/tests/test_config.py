import pytest

from pld.config import RunConfig, load_config, parse_config
from pld.errors import ConfigError


def test_defaults():
    cfg = parse_config("")
    assert cfg == RunConfig()
    assert cfg.hp.min_support == 2 and cfg.hp.wilson_gate


def test_full():
    cfg = parse_config("""
        # tuned run
        d = 3
        max_size = 5
        a = 0.9
        min_support = 10
        prob_threshold = 0.6
        gain_threshold = 0.02
        per_level_gain.4 = 0.1
        quantization_depth = 3
        strict_ties = yes
        node_cap = 1000
    """)
    hp = cfg.hp
    assert (hp.d, hp.max_size, hp.a, hp.min_support) == (3, 5, 0.9, 10)
    assert (hp.prob_threshold, hp.gain_threshold, dict(hp.per_level_gain)) == (0.6, 0.02, {4: 0.1})
    assert hp.gain_for_level(4) == 0.1 and hp.gain_for_level(3) == 0.02
    assert cfg.quantization_depth == 3 and cfg.strict_ties and hp.node_cap == 1000


def test_wilson_off():
    assert not parse_config("a = off").hp.wilson_gate


@pytest.mark.parametrize("text, match", [
    ("d = 3\nmax_size = 2", "max_size"),
    ("colour = red", "unknown key"),
    ("d = two", "bad value"),
    ("d 3", "key = value"),
    ("prob_threshold = 1.5", "prob_threshold"),
    ("quantization_depth = 0", "quantization_depth"),
])
def test_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(text)


def test_load(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("min_support = 1\na = off\n")
    assert load_config(p).hp.min_support == 1
