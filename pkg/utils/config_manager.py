"""
Configuration manager for training runs.
Handles loading, saving, and validating plain-text key=value config files.
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict

from utils.errors import ConfigError

CONFIG_SUFFIX = ".cfg"


def parse_config_text(text: str, source: str = "<string>") -> Dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment, blank lines are skipped."""
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key}")
        values[key] = value
    return values


def format_config_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


class ConfigManager:
    """Manages key=value configuration files for training runs."""

    def __init__(self, config_dir: str = "config"):
        self.config_dir = Path(config_dir)
        self.default_config_path = self.config_dir / f"default{CONFIG_SUFFIX}"

    def _resolve(self, config_name: str) -> Path:
        candidate = Path(config_name)
        if candidate.suffix or os.sep in config_name:
            return candidate
        return self.config_dir / f"{config_name}{CONFIG_SUFFIX}"

    def load_config(self, config_name: str = "default") -> Dict[str, Any]:
        """
        Load configuration from a file name (in the config dir) or a path.

        Returns:
            Dictionary of typed values for the keys present in the file
        """
        from training.train_config import TrainConfig

        config_path = self._resolve(config_name)
        if not config_path.exists():
            raise ConfigError(f"Configuration file {config_path} not found")
        try:
            raw = parse_config_text(config_path.read_text(encoding="utf-8"), str(config_path))
            config = {key: TrainConfig.coerce(key, value) for key, value in raw.items()}
            logging.info(f"Loaded configuration from {config_path}")
            return config
        except ConfigError as e:
            logging.error(f"Invalid config file {config_path}: {e}")
            raise

    def load_train_config(self, config_name: str = "default"):
        from training.train_config import TrainConfig

        return TrainConfig.from_mapping(self.load_config(config_name))

    def save_config(self, config: Dict[str, Any], config_name: str = "user") -> Path:
        """Save configuration, one ``key=value`` per line in key order."""
        config_path = self._resolve(config_name)
        config_path.parent.mkdir(parents=True, exist_ok=True)
        lines = [f"{key}={format_config_value(config[key])}" for key in sorted(config)]
        config_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        logging.info(f"Saved configuration to {config_path}")
        return config_path

    def list_configs(self) -> list:
        """List all available configuration files."""
        if not self.config_dir.exists():
            return []
        return sorted(path.stem for path in self.config_dir.glob(f"*{CONFIG_SUFFIX}"))

    def validate_config(self, config: Dict[str, Any]) -> bool:
        """
        Validate configuration keys and values.

        Returns:
            True if valid, False otherwise
        """
        from training.train_config import TrainConfig

        try:
            TrainConfig.from_mapping(config)
        except ConfigError as e:
            logging.error(f"Invalid configuration: {e}")
            return False
        return True
