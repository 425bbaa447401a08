"""Tests for settings loading, merging and persistence."""
# Created: 2026-10-18

import logging

import yaml

from uspoisson.config import load_settings, save_settings
from uspoisson.config.settings import Settings


def test_defaults():
    settings = Settings()
    assert settings.solver.tolerance == 1e-12
    assert settings.solver.check_every == 10
    assert settings.solver.max_n == 1024
    assert settings.output.grid_size == 101
    assert settings.benchmark.sizes == [256, 512, 1024, 2048]
    assert settings.logging.level == "INFO"


def test_from_dict_ignores_unknown_keys(caplog):
    with caplog.at_level(logging.WARNING, logger="uspoisson.config.settings"):
        settings = Settings.from_dict({"solver": {"max_n": 512, "colour": "blue"}})
    assert settings.solver.max_n == 512
    assert "solver.colour" in caplog.text


def test_from_dict_coerces_string_floats():
    """YAML 1.1 reads 1e-10 (no dot) as a string."""
    settings = Settings.from_dict(yaml.safe_load("solver:\n  tolerance: 1e-10\n"))
    assert settings.solver.tolerance == 1e-10


def test_merge_keeps_only_non_defaults():
    base = Settings.from_dict({"solver": {"max_n": 256}})
    other = Settings.from_dict({"solver": {"check_every": 4}})
    base.merge(other)
    assert base.solver.max_n == 256
    assert base.solver.check_every == 4


def test_user_config_overrides_defaults(config_dir):
    (config_dir / "config.yaml").write_text("solver:\n  max_n: 128\noutput:\n  grid_size: 21\n")
    settings = load_settings(config_dir)
    assert settings.solver.max_n == 128
    assert settings.output.grid_size == 21


def test_unreadable_user_config_is_skipped(config_dir, caplog):
    (config_dir / "config.yaml").write_text("solver: [1, 2\n")
    with caplog.at_level(logging.WARNING):
        settings = load_settings(config_dir)
    assert settings.solver.max_n == 1024
    assert "Failed to load user config" in caplog.text


def test_environment_overrides(config_dir, monkeypatch):
    monkeypatch.setenv("USPOISSON_TOLERANCE", "1e-9")
    monkeypatch.setenv("USPOISSON_MAX_N", "64")
    settings = load_settings(config_dir)
    assert settings.solver.tolerance == 1e-9
    assert settings.solver.max_n == 64


def test_bad_environment_value_is_ignored(config_dir, monkeypatch):
    monkeypatch.setenv("USPOISSON_MAX_N", "lots")
    assert load_settings(config_dir).solver.max_n == 1024


def test_save_and_reload(config_dir):
    settings = Settings()
    settings.solver.check_every = 3
    settings.output.directory = "results"
    path = save_settings(settings, config_dir)
    assert path == config_dir / "config.yaml"
    reloaded = load_settings(config_dir)
    assert reloaded.solver.check_every == 3
    assert reloaded.output.directory == "results"
