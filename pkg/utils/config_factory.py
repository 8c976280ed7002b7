"""
Factory functions to create objects from configuration.
"""

import logging
from typing import Any, Dict

import numpy as np


def create_reducer_from_config(reducer_type: str, parameters: Dict[str, Any] | None = None):
    """Create an activation reducer from its kind string."""
    parameters = parameters or {}
    try:
        if reducer_type == "mean":
            from reducers.mean_reducer import MeanReducer
            return MeanReducer()
        elif reducer_type == "max":
            from reducers.max_reducer import MaxReducer
            return MaxReducer()
        elif reducer_type == "positive-mean":
            from reducers.positive_mean_reducer import PositiveMeanReducer
            return PositiveMeanReducer()
        elif reducer_type == "maxpool-mean":
            from reducers.maxpool_mean_reducer import MaxPoolMeanReducer
            return MaxPoolMeanReducer(pool_size=int(parameters.get("pool_size", 2)))
        else:
            from utils.errors import ConfigError
            raise ConfigError(f"Unknown reducer type: {reducer_type}")
    except Exception as e:
        logging.error(f"Error creating reducer {reducer_type}: {e}")
        raise


def create_whitener_from_config(whitening_mode: str, parameters: Dict[str, Any] | None = None):
    """Create a ZCA whitener: 'newton' (training) or 'exact' (eigendecomposition)."""
    parameters = parameters or {}
    try:
        if whitening_mode == "newton":
            from whitening.zca_newton import NewtonZcaWhitener
            return NewtonZcaWhitener(iters=int(parameters.get("iters", 5)))
        elif whitening_mode == "exact":
            from whitening.zca_exact import ExactZcaWhitener
            return ExactZcaWhitener()
        else:
            from utils.errors import ConfigError
            raise ConfigError(f"Unknown whitening mode: {whitening_mode}")
    except Exception as e:
        logging.error(f"Error creating whitener {whitening_mode}: {e}")
        raise


def create_slot_from_config(slot_type: str, parameters: Dict[str, Any]):
    """Create a normalization slot ('bn' or 'cw') for a given channel count."""
    try:
        channels = int(parameters["channels"])
        if slot_type == "bn":
            from models.batch_norm import BatchNormSlot
            return BatchNormSlot(channels, eps=parameters.get("eps", 1e-5),
                                 momentum=parameters.get("momentum", 0.9))
        elif slot_type == "cw":
            from cw_layers import CwLayer
            from models.cw_slot import CwSlot
            from stiefel import RotationState
            from whitening import WhiteningState

            state = WhiteningState(
                dim=channels,
                ema_momentum=parameters.get("momentum", 0.9),
                eps=parameters.get("eps", 1e-5),
                newton_iters=parameters.get("newton_iters", 5),
                mode=parameters.get("whitening_mode", "newton"),
                stop_gradient=parameters.get("stop_whitening_grad", False),
            )
            reducer = create_reducer_from_config(parameters.get("reducer", "maxpool-mean"),
                                                 {"pool_size": parameters.get("pool_size", 2)})
            rotation = RotationState(channels, beta=parameters.get("beta", 0.9))
            return CwSlot(CwLayer(state, rotation, reducer, placement=parameters.get("placement", 0)))
        else:
            from utils.errors import ConfigError
            raise ConfigError(f"Unknown slot type: {slot_type}")
    except Exception as e:
        logging.error(f"Error creating slot {slot_type}: {e}")
        raise


def create_model_from_config(descriptor: Dict[str, Any], slot_options: Dict[str, Any] | None = None,
                             rng: np.random.Generator | None = None):
    """Create a host network from an architecture descriptor.

    The descriptor carries ``arch``, ``input_shape``, ``n_classes``,
    ``variant``, ``cw_layer`` and, for the MLP, ``hidden``.
    """
    arch = descriptor.get("arch", "mlp")
    try:
        input_shape = tuple(int(s) for s in descriptor["input_shape"])
        common = {
            "n_classes": int(descriptor["n_classes"]),
            "variant": descriptor.get("variant", "bn"),
            "cw_layer": int(descriptor.get("cw_layer", 0)),
            "rng": rng,
            "slot_options": slot_options,
        }
        if arch == "mlp":
            from models.mlp import MlpNetwork
            if len(input_shape) != 1:
                from utils.errors import ConfigError
                raise ConfigError(f"mlp expects vector inputs, got input shape {input_shape}")
            return MlpNetwork(input_shape[0], hidden=int(descriptor.get("hidden", 32)), **common)
        elif arch == "cnn":
            from models.cnn import ConvNetwork
            if len(input_shape) != 3:
                from utils.errors import ConfigError
                raise ConfigError(f"cnn expects c x h x w inputs, got input shape {input_shape}")
            return ConvNetwork(input_shape, **common)
        else:
            from utils.errors import ConfigError
            raise ConfigError(f"Unknown arch type: {arch}")
    except Exception as e:
        logging.error(f"Error creating model {arch}: {e}")
        raise


def create_model_from_train_config(config, input_shape, n_classes: int, rng: np.random.Generator | None = None):
    """Create the host network a :class:`training.TrainConfig` describes."""
    descriptor = {
        "arch": config.arch,
        "input_shape": list(input_shape),
        "n_classes": n_classes,
        "variant": config.slot,
        "cw_layer": config.cw_layer,
        "hidden": config.hidden,
    }
    return create_model_from_config(descriptor, config.slot_options(), rng)
