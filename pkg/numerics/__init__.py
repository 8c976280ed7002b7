from . import ops
from .tensor import GradientTape, Tensor, as_array, as_tensor, backward

__all__: list[str] = [
    "GradientTape",
    "Tensor",
    "as_array",
    "as_tensor",
    "backward",
    "ops",
]
