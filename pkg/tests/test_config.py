import math
import os
from pathlib import Path

import pytest

from pconcave_app.config import AppConfig, ExperimentConfig, load_env_from_file, load_key_value_file
from pconcave_app.errors import ConfigError


def test_config_defaults(monkeypatch):
    for name in ("PCONCAVE_WORKERS", "PCONCAVE_FORMAT", "PCONCAVE_OUT_DIR", "ENABLE_INFLUX", "INFLUX_TOKEN", "INFLUXDB_TOKEN"):
        monkeypatch.delenv(name, raising=False)
    cfg = AppConfig.from_env()
    assert cfg.out_dir == "results"
    assert cfg.report_format == "json"
    assert cfg.workers == 1
    assert cfg.enable_influx is False
    assert cfg.influx_token == ""


def test_config_from_env_overrides():
    os.environ["PCONCAVE_WORKERS"] = "4"
    os.environ["PCONCAVE_FORMAT"] = "CSV"
    os.environ["PCONCAVE_OUT_DIR"] = "/tmp/reports"
    cfg = AppConfig.from_env()
    assert cfg.workers == 4
    assert cfg.report_format == "csv"
    assert cfg.out_dir == "/tmp/reports"


def test_invalid_values_fall_back(monkeypatch):
    monkeypatch.setenv("PCONCAVE_WORKERS", "many")
    monkeypatch.setenv("PCONCAVE_CHUNK_SIZE", "-3")
    monkeypatch.setenv("PCONCAVE_FORMAT", "xml")
    monkeypatch.setenv("ENABLE_INFLUX", "maybe")
    cfg = AppConfig.from_env()
    assert cfg.workers == 1
    assert cfg.chunk_size == 64
    assert cfg.report_format == "json"
    assert cfg.enable_influx is False


def test_influx_toggle_and_token_alias(monkeypatch):
    monkeypatch.setenv("ENABLE_INFLUX", "yes")
    monkeypatch.delenv("INFLUX_TOKEN", raising=False)
    monkeypatch.setenv("INFLUXDB_TOKEN", "secret")
    cfg = AppConfig.from_env()
    assert cfg.enable_influx is True
    assert cfg.influx_token == "secret"


def test_load_env_from_file(tmp_path: Path, monkeypatch):
    env_file = tmp_path / ".env"
    env_file.write_text("FOO=bar\nPCONCAVE_WORKERS=7\n# comment\n")
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("FOO", "kept")
    monkeypatch.delenv("PCONCAVE_WORKERS", raising=False)
    load_env_from_file(".env")
    assert os.environ["FOO"] == "kept"
    assert os.environ["PCONCAVE_WORKERS"] == "7"


def test_load_key_value_file_keeps_equals_in_values(tmp_path: Path):
    path = tmp_path / "job.cfg"
    path.write_text("experiment = theorem41\n\n# note\nsource=radial beta_cap 2 2\nweird=a=b\n")
    assert load_key_value_file(path) == {"experiment": "theorem41", "source": "radial beta_cap 2 2", "weird": "a=b"}


def test_experiment_config_from_mapping():
    config = ExperimentConfig.from_mapping(
        {
            "experiment": "rearrangement65",
            "operator": "pucci_minus",
            "lambda": "1",
            "Lambda": "2",
            "h": "1/16",
            "p": "auto-from-beta",
            "q_list": "1, 2; inf",
            "m_list": "2,4",
            "waiver": "yes",
            "stencil_radius": "3",
        }
    )
    assert config.lam == 1.0 and config.Lam == 2.0
    assert config.h == 0.0625
    assert config.p == "auto-from-beta"
    assert config.q_list == (1.0, 2.0, math.inf)
    assert config.m_list == (2, 4)
    assert config.waiver is True
    assert config.stencil_radius == 3.0
    assert ExperimentConfig(experiment="theorem41").stencil_radius is None


@pytest.mark.parametrize(
    "raw",
    [
        {"operator": "poisson"},
        {"experiment": "theorem99"},
        {"experiment": "theorem41", "colour": "blue"},
        {"experiment": "theorem41", "h": "fine"},
        {"experiment": "theorem41", "lambda": "2", "Lambda": "1"},
        {"experiment": "theorem41", "mu": "1"},
        {"experiment": "theorem41", "p": "auto"},
        {"experiment": "theorem41", "waiver": "perhaps"},
        {"experiment": "theorem41", "stencil_radius": "0.5"},
        {"experiment": "theorem41", "body0": "missing_polygon.txt"},
    ],
)
def test_experiment_config_rejects(raw):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_mapping(raw)


def test_polygon_paths_resolve_against_the_config_directory(tmp_path: Path):
    (tmp_path / "tri.txt").write_text("0 0\n1 0\n0 1\n")
    config = ExperimentConfig.from_mapping({"experiment": "torsion_urysohn", "body": "tri.txt"}, base_dir=tmp_path)
    assert config.body == str(tmp_path / "tri.txt")


def test_with_overrides_ignores_none_and_validates():
    config = ExperimentConfig(experiment="theorem41")
    assert config.with_overrides(h=None, p=None) is config
    assert config.with_overrides(h=0.25).h == 0.25
    with pytest.raises(ConfigError):
        config.with_overrides(mu=2.0)


def test_echo_renders_every_field():
    echo = ExperimentConfig(experiment="corollary42").echo()
    assert echo["experiment"] == "corollary42"
    assert echo["r_list"] == "1.0,2.0,inf"
    assert echo["h"] == "0.03125"
    assert echo["epsilon"] == "None"
