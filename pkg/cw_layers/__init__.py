from .conv_reshape import conv_reshape, conv_unreshape
from .cw_layer import CwLayer

__all__: list[str] = ["CwLayer", "conv_reshape", "conv_unreshape"]
