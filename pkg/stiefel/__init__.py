from .alignment import ConceptBatch, alignment_gradient, alignment_objective, momentum_update
from .cayley import cayley_step, cayley_transform, skew_generator
from .curvilinear_search import SearchResult, curvilinear_search
from .rotation_state import ORTHOGONALITY_TOLERANCE, RotationState, SearchParams

__all__: list[str] = [
    "ORTHOGONALITY_TOLERANCE",
    "ConceptBatch",
    "RotationState",
    "SearchParams",
    "SearchResult",
    "alignment_gradient",
    "alignment_objective",
    "cayley_step",
    "cayley_transform",
    "curvilinear_search",
    "momentum_update",
    "skew_generator",
]
