# cw_layers/conv_reshape.py
from numerics import Tensor, as_tensor, ops
from utils.errors import DimensionError


def conv_reshape(z) -> Tensor:
    """n×d×h×w feature maps → d×(n·h·w) matrix, channels as rows.

    Columns run sample by sample, each sample's cells in raster order.
    """
    z = as_tensor(z)
    if z.ndim != 4:
        raise DimensionError(f"conv_reshape expects an n x d x h x w tensor, got {z.shape}")
    n, d, h, w = z.shape
    return ops.reshape(ops.transpose(z, (1, 0, 2, 3)), (d, n * h * w))


def conv_unreshape(m, shape: tuple[int, int, int, int]) -> Tensor:
    """Inverse of :func:`conv_reshape` for an original ``shape`` (n, d, h, w)."""
    m = as_tensor(m)
    if len(shape) != 4:
        raise DimensionError(f"target shape must have rank 4, got {shape}")
    n, d, h, w = shape
    if m.shape != (d, n * h * w):
        raise DimensionError(f"matrix {m.shape} does not match feature maps {tuple(shape)}")
    return ops.transpose(ops.reshape(m, (d, n, h, w)), (1, 0, 2, 3))
