# training/train_config.py
from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Any, Mapping

from utils.errors import ConfigError

_BOOL_WORDS = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


@dataclass(frozen=True)
class TrainConfig:
    arch: str = "mlp"
    slot: str = "cw"
    cw_layer: int = 0
    reducer: str = "maxpool-mean"
    pool_size: int = 2
    lr: float = 0.05
    momentum: float = 0.9
    batch_size: int = 64
    epochs: int = 10
    align_frequency: int = 20
    beta: float = 0.9
    newton_iters: int = 5
    eps: float = 1e-5
    ema_momentum: float = 0.9
    seed: int = 0
    whitening_mode: str = "newton"
    align_batch_stats: str = "batch"
    stop_whitening_grad: bool = False
    aux_weight: float = 0.5
    search_eta0: float = 1.0
    search_c1: float = 1e-4
    search_backtrack: float = 0.5
    search_max_backtracks: int = 20
    hidden: int = 32

    def __post_init__(self) -> None:
        if self.arch not in ("mlp", "cnn"):
            raise ConfigError(f"Unknown arch: {self.arch}")
        if self.slot not in ("bn", "cw", "bn_aux"):
            raise ConfigError(f"Unknown slot variant: {self.slot}")
        if self.reducer not in ("mean", "max", "positive-mean", "maxpool-mean"):
            raise ConfigError(f"Unknown reducer: {self.reducer}")
        if self.whitening_mode not in ("newton", "exact"):
            raise ConfigError(f"Unknown whitening mode: {self.whitening_mode}")
        if self.align_batch_stats not in ("batch", "running"):
            raise ConfigError(f"align_batch_stats must be 'batch' or 'running', got {self.align_batch_stats}")
        for name in ("lr", "eps", "search_eta0"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("batch_size", "epochs", "align_frequency", "newton_iters", "hidden"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.batch_size < 2:
            raise ConfigError(f"batch_size must be >= 2 for batch statistics, got {self.batch_size}")
        if self.reducer == "maxpool-mean" and self.pool_size < 2:
            raise ConfigError(f"pool_size must be >= 2 for maxpool-mean, got {self.pool_size}")
        if not 0.0 <= self.momentum < 1.0 or not 0.0 <= self.beta < 1.0:
            raise ConfigError("momentum and beta must lie in [0, 1)")
        if not 0.0 <= self.ema_momentum <= 1.0:
            raise ConfigError(f"ema_momentum must lie in [0, 1], got {self.ema_momentum}")
        if self.aux_weight < 0 or self.cw_layer < 0 or self.search_max_backtracks < 0:
            raise ConfigError("aux_weight, cw_layer and search_max_backtracks must be non-negative")

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def coerce(cls, key: str, value: Any) -> Any:
        """Convert a raw (usually string) value to the declared type of *key*."""
        types = {f.name: f.type for f in fields(cls)}
        if key not in types:
            raise ConfigError(f"Unknown config key: {key}")
        kind = types[key]
        try:
            if kind == "bool":
                if isinstance(value, bool):
                    return value
                word = str(value).strip().lower()
                if word not in _BOOL_WORDS:
                    raise ValueError(value)
                return _BOOL_WORDS[word]
            if kind == "int":
                if isinstance(value, float) and not value.is_integer():
                    raise ValueError(value)
                return int(str(value).strip()) if isinstance(value, str) else int(value)
            if kind == "float":
                return float(value)
            return str(value).strip()
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid value for {key}: {value!r} (expected {kind})") from e

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any]) -> "TrainConfig":
        return cls(**{key: cls.coerce(key, value) for key, value in mapping.items()})

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def slot_options(self) -> dict[str, Any]:
        """Keyword options for building normalization slots."""
        return {
            "eps": self.eps,
            "momentum": self.ema_momentum,
            "newton_iters": self.newton_iters,
            "whitening_mode": self.whitening_mode,
            "stop_whitening_grad": self.stop_whitening_grad,
            "reducer": self.reducer,
            "pool_size": self.pool_size,
            "beta": self.beta,
        }

    def search_params(self):
        from stiefel import SearchParams

        return SearchParams(eta0=self.search_eta0, c1=self.search_c1,
                            backtrack=self.search_backtrack, max_backtracks=self.search_max_backtracks)
