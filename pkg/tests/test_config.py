import pytest

from crindep.config import (
    DEFAULT_SEED,
    SEED_ENV_VAR,
    default_seed,
    get_desk_preset,
    get_full_preset,
    get_scale_preset,
    parse_seed,
)
from crindep.errors import ConfigError


def test_presets():
    assert get_desk_preset() == {"reps": 500, "B": 2000}
    assert get_full_preset() == {"reps": 1000, "B": 10000}
    assert get_full_preset(reps=10)["reps"] == 10

def test_get_scale_preset_dispatch():
    assert get_scale_preset() == get_desk_preset()
    assert get_scale_preset("full", B=500) == {"reps": 1000, "B": 500}

def test_get_scale_preset_invalid():
    with pytest.raises(ValueError, match="Unknown preset 'huge'"):
        get_scale_preset("huge")

def test_parse_seed():
    assert parse_seed("42") == 42
    assert parse_seed(" 0 ") == 0
    assert parse_seed(2**64 - 1) == 2**64 - 1
    for bad in ("-1", "x", 2**64):
        with pytest.raises(ConfigError):
            parse_seed(bad)

def test_default_seed(monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    assert default_seed() == DEFAULT_SEED
    monkeypatch.setenv(SEED_ENV_VAR, "7")
    assert default_seed() == 7
    monkeypatch.setenv(SEED_ENV_VAR, "")
    assert default_seed() == DEFAULT_SEED
    monkeypatch.setenv(SEED_ENV_VAR, "seven")
    with pytest.raises(ConfigError):
        default_seed()
