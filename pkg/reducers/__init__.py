from .base_reducer import ActivationReducer
from .max_reducer import MaxReducer
from .maxpool_mean_reducer import MaxPoolMeanReducer
from .mean_reducer import MeanReducer
from .positive_mean_reducer import PositiveMeanReducer

REDUCER_KINDS = ("mean", "max", "positive-mean", "maxpool-mean")

__all__: list[str] = [
    "REDUCER_KINDS",
    "ActivationReducer",
    "MaxPoolMeanReducer",
    "MaxReducer",
    "MeanReducer",
    "PositiveMeanReducer",
]
