from .base_network import SLOT_VARIANTS, HostNetwork
from .base_slot import NormalizationSlot
from .batch_norm import BatchNormSlot
from .cnn import ConvNetwork
from .cw_slot import CwSlot
from .mlp import MlpNetwork
from .sgd import SGD, sgd_step
from .warm_start import auxiliary_concept_loss, latent_matrix, swap_bn_for_cw

__all__: list[str] = [
    "SGD",
    "SLOT_VARIANTS",
    "BatchNormSlot",
    "ConvNetwork",
    "CwSlot",
    "HostNetwork",
    "MlpNetwork",
    "NormalizationSlot",
    "auxiliary_concept_loss",
    "latent_matrix",
    "sgd_step",
    "swap_bn_for_cw",
]
