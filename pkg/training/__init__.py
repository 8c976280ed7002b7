from .alternating_trainer import (
    HISTORY_COLUMNS,
    PROBE_COLUMNS,
    AlternatingTrainer,
    HistoryRecord,
    TrainingHistory,
    evaluate,
)
from .concept_bank import ConceptBank, ConceptSet, Dataset
from .synthetic import SyntheticData, SyntheticSpec, class_codes, make_synthetic, render_image
from .train_config import TrainConfig

__all__: list[str] = [
    "HISTORY_COLUMNS",
    "PROBE_COLUMNS",
    "AlternatingTrainer",
    "ConceptBank",
    "ConceptSet",
    "Dataset",
    "HistoryRecord",
    "SyntheticData",
    "SyntheticSpec",
    "TrainConfig",
    "TrainingHistory",
    "class_codes",
    "evaluate",
    "make_synthetic",
    "render_image",
]
