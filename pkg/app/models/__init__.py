from .tensor import ConvParams, Tensor
from .network import FeatureStack, NetworkRole, NetworkWeights
from .video import ChannelMode, FrameSequence, VideoFormat

__all__ = [
    # Tensor engine
    "Tensor",
    "ConvParams",
    # Networks
    "NetworkWeights",
    "NetworkRole",
    "FeatureStack",
    # Video
    "FrameSequence",
    "ChannelMode",
    "VideoFormat",
]
