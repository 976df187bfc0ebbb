import json

import pytest

from src.config import Config


@pytest.fixture
def make_config(tmp_path, monkeypatch):
    for name in ("CAPWAVES_THREADS", "CAPWAVES_LOG_LEVEL", "CAPWAVES_LOG_FILE", "CAPWAVES_B2_SIGN"):
        monkeypatch.delenv(name, raising=False)

    def _make(data=None):
        path = tmp_path / "config.json"
        if data is not None:
            path.write_text(json.dumps(data), encoding="utf-8")
        return Config(str(path))
    return _make


def test_defaults_without_file(make_config):
    cfg = make_config()
    assert cfg.get("resonance", "b2_sign") == "verbatim"
    assert cfg.get("elliptic", "x_bound") == 1000000
    assert cfg.get("missing", "key", default=3) == 3


def test_file_merges_over_defaults(make_config):
    cfg = make_config({"elliptic": {"c_max": 20}})
    assert cfg.get("elliptic", "c_max") == 20
    assert cfg.get("elliptic", "x_bound") == 1000000


def test_broken_file_falls_back(tmp_path, make_config):
    (tmp_path / "config.json").write_text("{not json", encoding="utf-8")
    cfg = make_config()
    assert cfg.get("output", "format") == "json"


def test_environment_overrides(make_config, monkeypatch):
    monkeypatch.setenv("CAPWAVES_THREADS", "3")
    monkeypatch.setenv("CAPWAVES_B2_SIGN", "conjugate")
    cfg = make_config()
    assert cfg.get("processing", "threads") == 3
    assert cfg.thread_count() == 3
    assert cfg.get("resonance", "b2_sign") == "conjugate"


def test_thread_count(make_config):
    cfg = make_config()
    assert cfg.thread_count(2) == 2
    assert cfg.thread_count(0) >= 1


def test_save_and_sample(make_config):
    cfg = make_config()
    cfg.set("sphere", "linf_refinement", value=6)
    cfg.save_config()
    assert Config(str(cfg.config_file)).get("sphere", "linf_refinement") == 6
    sample = cfg.create_sample_config()
    assert json.loads(sample.read_text(encoding="utf-8")) == Config.defaults()
