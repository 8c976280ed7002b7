# utils/logging_utils.py
import datetime
import logging
import os

LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


def level_from_env(var: str = "CW_LOG", default: int = logging.INFO) -> int:
    """Map ``$CW_LOG`` ∈ {error, info, debug} to a logging level."""
    value = os.environ.get(var)
    if value is None:
        return default
    level = LOG_LEVELS.get(value.strip().lower())
    if level is None:
        logging.warning(f"Unknown {var} value {value!r}; using info")
        return logging.INFO
    return level


def setup_logger(log_file: str | None = None, level: int | None = None, to_file: bool = True):
    """
    Initialise Python's root logger.  If log_file is None, create a unique
    timestamped log in a 'logs' directory; ``to_file=False`` logs to stderr only.
    """
    if level is None:
        level = level_from_env()
    handlers: list[logging.Handler] = [logging.StreamHandler()]
    if to_file:
        if log_file is None:
            log_dir = "logs"
            os.makedirs(log_dir, exist_ok=True)
            timestamp = datetime.datetime.now().strftime("%Y%m%d_%H%M%S")
            log_file = os.path.join(log_dir, f"cw_{timestamp}.log")
        handlers.insert(0, logging.FileHandler(log_file))

    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True,
    )
    if to_file:
        logging.info(f"Logging to: {log_file}")
