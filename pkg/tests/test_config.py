from __future__ import annotations

import pytest

from app import config
from app.corpus import UnknownTag
from app.joint import JointParams
from app.storage import UnsupportedFileType


@pytest.fixture(autouse=True)
def _no_dotenv(monkeypatch):
    monkeypatch.setattr(config, "_ENV_LOADED", True)
    for name in (config.LOG_LEVEL_ENV, config.READING_CAP_ENV, config.THREADS_ENV):
        monkeypatch.delenv(name, raising=False)


def _write(tmp_path, text, name="pipeline.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_load_environment_reads_dotenv_once(monkeypatch, tmp_path):
    calls = []
    monkeypatch.setattr(config, "_ENV_LOADED", False)
    monkeypatch.setattr(config, "load_dotenv", lambda dotenv_path=None: calls.append(dotenv_path))

    config.load_environment(str(tmp_path / ".env"))
    config.load_environment()
    assert calls == [str(tmp_path / ".env")]


def test_environment_settings_and_defaults(monkeypatch):
    assert config.get_log_level() == "WARNING"
    assert config.get_reading_cap() is None
    assert config.get_threads() == 1

    monkeypatch.setenv(config.LOG_LEVEL_ENV, "debug")
    monkeypatch.setenv(config.READING_CAP_ENV, "250")
    monkeypatch.setenv(config.THREADS_ENV, "4")
    assert config.get_log_level() == "DEBUG"
    assert config.get_reading_cap() == 250
    assert config.get_threads() == 4


@pytest.mark.parametrize(
    "name, value",
    [
        (config.LOG_LEVEL_ENV, "chatty"),
        (config.READING_CAP_ENV, "many"),
        (config.THREADS_ENV, "0"),
    ],
)
def test_invalid_environment_settings_raise(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    getter = {
        config.LOG_LEVEL_ENV: config.get_log_level,
        config.READING_CAP_ENV: config.get_reading_cap,
        config.THREADS_ENV: config.get_threads,
    }[name]
    with pytest.raises(config.ConfigError):
        getter()


def test_load_pipeline_config_reads_the_fixture(fixtures_dir, inventory):
    loaded = config.load_pipeline_config(fixtures_dir / "layers.cfg")

    assert [layer.id for layer in loaded.layers] == ["subjects", "verbs", "clauses"]
    assert loaded.layers[2].eq.classes[0][0] == "nonfinv"
    assert loaded.layers[1].priority == 1
    assert loaded.joint_params == JointParams(0.01, 2, 3, "incremental")
    assert loaded.disambiguation.reading_cap == 5000
    assert loaded.disambiguation.layer_skip
    assert not loaded.disambiguation.strict_gaps
    assert loaded.inventory == inventory


def test_environment_reading_cap_applies_without_a_parse_line(monkeypatch, tmp_path):
    monkeypatch.setenv(config.READING_CAP_ENV, "77")
    loaded = config.load_pipeline_config(_write(tmp_path, "LAYER a PRIORITY 0 GENERALISE no\nTAGS SUBJ\n"))
    assert loaded.disambiguation.reading_cap == 77
    assert loaded.joint_params == JointParams()
    assert loaded.layers[0].generalise is False


def test_inventory_path_is_relative_to_the_config(tmp_path):
    _write(tmp_path, "SUBJ\tSubject\nOBJ\tObject\n", name="tags.tsv")
    loaded = config.load_pipeline_config(
        _write(tmp_path, "INVENTORY tags.tsv\nLAYER a PRIORITY 0 GENERALISE yes\nTAGS SUBJ OBJ\n")
    )
    assert list(loaded.inventory) == ["SUBJ", "OBJ"]


@pytest.mark.parametrize(
    "text, line",
    [
        ("TAGS SUBJ\n", 1),
        ("JOINTS error_margin=0.1\nJOINTS max_len=2\n", 2),
        ("JOINTS max_len=two\n", 1),
        ("JOINTS error_margin=3\n", 1),
        ("JOINTS colour=blue\n", 1),
        ("PARSE strict_gaps=perhaps\n", 1),
        ("PARSE reading_cap=0\n", 1),
        ("LAYER a PRIORITY 0 GENERALISE yes\nTAGS SUBJ\nFOO bar\n", 3),
        ("LAYER a PRIORITY high GENERALISE yes\n", 1),
    ],
)
def test_malformed_configs_name_their_line(tmp_path, text, line):
    with pytest.raises(config.MalformedConfig) as excinfo:
        config.load_pipeline_config(_write(tmp_path, text))
    assert excinfo.value.line == line


def test_duplicate_layer_ids_are_rejected(tmp_path):
    text = "LAYER a PRIORITY 0 GENERALISE yes\nTAGS SUBJ\nLAYER a PRIORITY 1 GENERALISE yes\nTAGS OBJ\n"
    with pytest.raises(config.MalformedConfig, match="duplicate layer ids: a"):
        config.load_pipeline_config(_write(tmp_path, text))


def test_layer_tags_must_be_in_the_inventory(tmp_path):
    text = "\nLAYER a PRIORITY 0 GENERALISE yes\nTAGS SUBJ NOTATAG\n"
    with pytest.raises(UnknownTag) as excinfo:
        config.load_pipeline_config(_write(tmp_path, text))
    assert excinfo.value.line == 2
    assert "NOTATAG" in str(excinfo.value)


def test_require_layers(tmp_path):
    loaded = config.load_pipeline_config(_write(tmp_path, "JOINTS max_len=2\n"))
    assert loaded.joint_params.max_len == 2
    with pytest.raises(config.NoLayers):
        loaded.require_layers()


def test_config_files_need_the_cfg_extension(tmp_path):
    with pytest.raises(UnsupportedFileType):
        config.load_pipeline_config(_write(tmp_path, "JOINTS max_len=2\n", name="pipeline.ini"))
