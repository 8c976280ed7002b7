from .activations import reduce_latents, slot_activations, slot_latents, slot_reducer
from .correlation import axis_correlation, layerwise_correlation, mean_abs_correlation
from .importance import (
    LOSS_KINDS,
    ImportanceResult,
    balanced_binary_loss,
    concept_importance,
    importance_profile,
    multiclass_loss,
    summarize_profile,
)
from .occlusion import OcclusionResult, default_patch, default_stride, occlusion_map
from .purity import AxisAuc, best_axis_auc, compare_reducers, concept_aucs, purity_auc, purity_auc_folds
from .ranking import (
    JointHistogram,
    LayerActivations,
    joint_histogram,
    percentile_rank,
    percentile_trajectory,
    topk_activated,
)
from .report import MetricsReport, accuracy, balanced_accuracy
from .similarity import mean_off_diagonal, similarity_matrices

__all__: list[str] = [
    "LOSS_KINDS",
    "AxisAuc",
    "ImportanceResult",
    "JointHistogram",
    "LayerActivations",
    "MetricsReport",
    "OcclusionResult",
    "accuracy",
    "axis_correlation",
    "balanced_accuracy",
    "balanced_binary_loss",
    "best_axis_auc",
    "compare_reducers",
    "concept_aucs",
    "concept_importance",
    "default_patch",
    "default_stride",
    "importance_profile",
    "joint_histogram",
    "layerwise_correlation",
    "mean_abs_correlation",
    "mean_off_diagonal",
    "multiclass_loss",
    "occlusion_map",
    "percentile_rank",
    "percentile_trajectory",
    "purity_auc",
    "purity_auc_folds",
    "reduce_latents",
    "similarity_matrices",
    "slot_activations",
    "slot_latents",
    "slot_reducer",
    "summarize_profile",
    "topk_activated",
]
