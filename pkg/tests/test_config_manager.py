# tests/test_config_manager.py
import logging
from pathlib import Path

import pytest

from training import TrainConfig
from utils.config_factory import create_model_from_config, create_slot_from_config, create_whitener_from_config
from utils.config_manager import ConfigManager, format_config_value, parse_config_text
from utils.errors import ConfigError
from utils.logging_utils import level_from_env, setup_logger

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"


def test_parse_skips_comments_and_blank_lines():
    text = "# header\n\nlr = 0.1  # inline\nslot=bn\n"
    assert parse_config_text(text) == {"lr": "0.1", "slot": "bn"}


@pytest.mark.parametrize("text, message", [
    ("lr=0.1\nlr=0.2\n", "duplicate"),
    ("just words\n", "expected key=value"),
    ("=3\n", "empty key"),
])
def test_parse_rejects_malformed_lines(text, message):
    with pytest.raises(ConfigError, match=message):
        parse_config_text(text, "run.cfg")


def test_shipped_defaults_match_train_config():
    manager = ConfigManager(str(CONFIG_DIR))
    assert manager.load_train_config("default") == TrainConfig()
    assert {"default", "quickstart"} <= set(manager.list_configs())
    quick = manager.load_train_config("quickstart")
    assert quick.hidden == 16 and quick.newton_iters == 10


def test_load_by_path_and_unknown_key(write_config, caplog):
    manager = ConfigManager("unused")
    path = write_config({"epochs": 3, "stop_whitening_grad": "true"})
    assert manager.load_config(str(path)) == {"epochs": 3, "stop_whitening_grad": True}
    bad = write_config({"learning_rate": 0.1}, "bad.cfg")
    with caplog.at_level(logging.ERROR):
        with pytest.raises(ConfigError, match="Unknown config key"):
            manager.load_config(str(bad))
    assert "Invalid config file" in caplog.text
    with pytest.raises(ConfigError, match="not found"):
        manager.load_config("missing")


def test_save_and_reload(tmp_path):
    manager = ConfigManager(str(tmp_path))
    config = TrainConfig(lr=0.125, stop_whitening_grad=True, slot="bn_aux").to_dict()
    path = manager.save_config(config, "saved")
    assert path == tmp_path / "saved.cfg"
    lines = path.read_text().splitlines()
    assert lines == sorted(lines)
    assert "stop_whitening_grad=true" in lines
    assert manager.load_train_config("saved") == TrainConfig(lr=0.125, stop_whitening_grad=True, slot="bn_aux")
    assert manager.list_configs() == ["saved"]
    assert ConfigManager(str(tmp_path / "absent")).list_configs() == []


def test_validate_config(caplog):
    manager = ConfigManager()
    assert manager.validate_config({"epochs": 2, "slot": "bn"})
    with caplog.at_level(logging.ERROR):
        assert not manager.validate_config({"epochs": 0})
    assert "Invalid configuration" in caplog.text


def test_format_config_value():
    assert format_config_value(False) == "false"
    assert format_config_value(1e-05) == "1e-05"
    assert format_config_value("newton") == "newton"


# ── Factories ─────────────────────────────────────────────────────────────────

def test_factories_log_and_reraise_unknown_types(caplog):
    with caplog.at_level(logging.ERROR):
        with pytest.raises(ConfigError, match="Unknown whitening mode"):
            create_whitener_from_config("cholesky")
        with pytest.raises(ConfigError, match="Unknown slot type"):
            create_slot_from_config("gn", {"channels": 3})
        with pytest.raises(ConfigError, match="Unknown arch type"):
            create_model_from_config({"arch": "rnn", "input_shape": [3], "n_classes": 2})
    assert "Error creating whitener cholesky" in caplog.text
    assert "Error creating model rnn" in caplog.text


def test_slot_factory_forwards_options():
    slot = create_slot_from_config("cw", {"channels": 4, "whitening_mode": "exact", "reducer": "max", "beta": 0.5})
    assert slot.layer.whitening.mode == "exact"
    assert slot.layer.reducer.kind == "max"
    assert slot.layer.rotation.beta == 0.5
    assert create_slot_from_config("bn", {"channels": 4, "momentum": 0.3}).momentum == 0.3


# ── Logging ───────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("value, level", [("debug", logging.DEBUG), ("ERROR", logging.ERROR), (None, logging.INFO)])
def test_level_from_env(monkeypatch, value, level):
    if value is None:
        monkeypatch.delenv("CW_LOG", raising=False)
    else:
        monkeypatch.setenv("CW_LOG", value)
    assert level_from_env() == level


def test_unknown_log_level_warns(monkeypatch, caplog):
    monkeypatch.setenv("CW_LOG", "chatty")
    with caplog.at_level(logging.WARNING):
        assert level_from_env() == logging.INFO
    assert "Unknown CW_LOG value" in caplog.text


def test_setup_logger_writes_to_the_given_file(tmp_path):
    log_file = tmp_path / "run.log"
    setup_logger(str(log_file), level=logging.INFO)
    logging.info("hello from the test")
    for handler in logging.getLogger().handlers:
        handler.flush()
    text = log_file.read_text()
    assert "Logging to:" in text and "INFO - hello from the test" in text
    setup_logger(to_file=False, level=logging.WARNING)
    assert not any(isinstance(h, logging.FileHandler) for h in logging.getLogger().handlers)
