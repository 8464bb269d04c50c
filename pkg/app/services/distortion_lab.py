import logging
from typing import List, Sequence

import numpy as np
from scipy.ndimage import gaussian_filter1d

from app.exceptions import ConfigurationError
from app.models.video import FrameSequence
from app.schemas.distortion import DistortionKind, DistortionSpec

logger = logging.getLogger(__name__)

BLUR_TRUNCATE = 3.0
QUANT_BLOCK = 8


def _awgn(frame: np.ndarray, sigma: float, seed: int, index: int) -> np.ndarray:
    # One substream per (seed, frame) so frames can be distorted independently.
    rng = np.random.default_rng([seed, index])
    return frame + rng.normal(0.0, sigma, size=frame.shape)


def _gaussian_blur(frame: np.ndarray, sigma: float) -> np.ndarray:
    # Separable kernel truncated at 3 sigma, renormalised, edge-replicated.
    out = gaussian_filter1d(frame, sigma, axis=2, mode="nearest", truncate=BLUR_TRUNCATE)
    return gaussian_filter1d(out, sigma, axis=3, mode="nearest", truncate=BLUR_TRUNCATE)


def _block_quantize(frame: np.ndarray, step: float) -> np.ndarray:
    """Per 8x8 block: keep the block mean, round the deviations to multiples of ``step``"""
    out = np.empty_like(frame)
    height, width = frame.shape[2], frame.shape[3]
    for top in range(0, height, QUANT_BLOCK):
        for left in range(0, width, QUANT_BLOCK):
            block = frame[:, :, top:top + QUANT_BLOCK, left:left + QUANT_BLOCK]
            dc = block.mean(axis=(2, 3), keepdims=True)
            out[:, :, top:top + QUANT_BLOCK, left:left + QUANT_BLOCK] = dc + np.round((block - dc) / step) * step
    return out


def apply_distortion(seq: FrameSequence, spec: DistortionSpec) -> FrameSequence:
    if spec.severity == 0:
        return seq.with_frames([frame.copy() for frame in seq.frames])

    frames = []
    for index, frame in enumerate(seq.frames):
        if spec.kind is DistortionKind.AWGN:
            out = _awgn(frame, spec.severity, spec.seed, index)
        elif spec.kind is DistortionKind.GAUSSIAN_BLUR:
            out = _gaussian_blur(frame, spec.severity)
        else:
            out = _block_quantize(frame, spec.severity)
        frames.append(np.clip(out, 0.0, 1.0))

    logger.debug("Applied %s to %d frames", spec.to_text(), len(frames))
    return seq.with_frames(frames)


def severity_ladder(
    seq: FrameSequence,
    kind: DistortionKind,
    severities: Sequence[float],
    base_seed: int = 0,
) -> List[FrameSequence]:
    """One distorted copy per severity; rung i uses seed ``base_seed + i``"""
    if any(b <= a for a, b in zip(severities, severities[1:])):
        raise ConfigurationError(f"Severities must be strictly increasing, got {list(severities)}")
    return [
        apply_distortion(seq, DistortionSpec(kind=kind, severity=severity, seed=base_seed + index))
        for index, severity in enumerate(severities)
    ]
