import enum
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from app.exceptions import DimensionError, FormatError


class ChannelMode(str, enum.Enum):
    LUMA = "luma"
    RGB = "rgb"

    @property
    def channels(self) -> int:
        return 1 if self is ChannelMode.LUMA else 3


class VideoFormat(str, enum.Enum):
    PNG_DIR = "png_dir"
    Y4M = "y4m"
    RAW_YUV = "raw_yuv"


@dataclass
class FrameSequence:
    """
    Frames of one video in temporal order, each a ``(1, c, h, w)`` array of
    intensities in [0, 1].
    """

    frames: List[np.ndarray]
    channel_mode: ChannelMode = ChannelMode.LUMA

    def __post_init__(self):
        if not self.frames:
            raise FormatError("A frame sequence needs at least one frame")
        shape = self.frames[0].shape
        if len(shape) != 4 or shape[0] != 1:
            raise DimensionError(f"Frames must be shaped (1, c, h, w), got {shape}")
        if shape[1] != self.channel_mode.channels:
            raise DimensionError(
                f"{self.channel_mode.value} frames need {self.channel_mode.channels} channels, got {shape[1]}"
            )
        for index, frame in enumerate(self.frames):
            if frame.shape != shape:
                raise DimensionError(f"Frame {index} has shape {frame.shape}, expected {shape}")
            if not np.all(np.isfinite(frame)) or frame.min() < 0.0 or frame.max() > 1.0:
                raise FormatError(f"Frame {index} has intensities outside [0, 1]")

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    @property
    def shape(self) -> Tuple[int, int, int, int]:
        return self.frames[0].shape

    @property
    def height(self) -> int:
        return self.frames[0].shape[2]

    @property
    def width(self) -> int:
        return self.frames[0].shape[3]

    def stacked(self) -> np.ndarray:
        """All frames as one ``(T, c, h, w)`` array"""
        return np.concatenate(self.frames, axis=0)

    def with_frames(self, frames: List[np.ndarray]) -> "FrameSequence":
        return FrameSequence(frames=frames, channel_mode=self.channel_mode)
