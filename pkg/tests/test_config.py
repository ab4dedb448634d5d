import json

import pytest

from src.config import AppConfig, load_config
from src.errors import ConfigError


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in ("LOG_LEVEL", "LEVELS", "SEED", "GRID", "OUT_DIR"):
        monkeypatch.delenv(f"LEASTGRAD_{name}", raising=False)


def test_defaults():
    cfg = load_config()
    assert isinstance(cfg, AppConfig)
    assert cfg.norm.form == "pnorm"
    assert cfg.domain.shape == "disk"
    assert cfg.solver.levels == 101
    assert cfg.solver.eps_schedule[0] == 1.0
    assert cfg.oracle.grid == 128
    assert cfg.oracle.noise == 0.0


def test_file_values(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"norm": {"form": "hexagon"}, "solver": {"levels": 31}}))
    cfg = load_config(str(path))
    assert cfg.norm.form == "hexagon"
    assert cfg.solver.levels == 31
    assert cfg.domain.shape == "disk"


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "nope.json"))


def test_bad_json(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(str(path))
    path.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_bad_type(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"solver": {"levels": "many"}}))
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("LEASTGRAD_LEVELS", "17")
    monkeypatch.setenv("LEASTGRAD_GRID", "48")
    cfg = load_config()
    assert cfg.solver.levels == 17
    assert cfg.oracle.grid == 48
    monkeypatch.setenv("LEASTGRAD_SEED", "x")
    with pytest.raises(ConfigError):
        load_config()
