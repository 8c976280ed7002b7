from .errors import CwError
from .logging_utils import setup_logger

__all__: list[str] = [
    "CwError",
    "setup_logger",
]
