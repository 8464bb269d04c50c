import logging
import math
from typing import List, Optional

import numpy as np
from joblib import Parallel, delayed

from app.exceptions import DimensionError, ScoringError
from app.models.network import NetworkWeights
from app.models.video import FrameSequence
from app.schemas.quality import LogBase, QualityScore
from .ops import as_frame_tensor
from .prior_net import detached, restore_frame
from .video_io import pad_to_divisible

logger = logging.getLogger(__name__)

PSNR_PEAK = 1.0
MSE_FLOOR = 1e-10  # caps identical frames at 100 dB for peak 1.0
PSNR_FLOOR = 1e-3  # keeps log(PSNR) finite


def psnr(a, b, peak: float = PSNR_PEAK, mse_floor: float = MSE_FLOOR) -> float:
    """10 * log10(peak^2 / MSE) in dB, MSE floored at ``mse_floor``"""
    a = np.asarray(getattr(a, "values", a), dtype=np.float64)
    b = np.asarray(getattr(b, "values", b), dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"psnr shapes differ: {a.shape} vs {b.shape}")
    if peak <= 0:
        raise ValueError(f"PSNR peak must be positive, got {peak}")
    mse = max(float(np.mean((a - b) ** 2)), mse_floor)
    return 10.0 * (math.log10(peak * peak) - math.log10(mse))


def _restore_one(g: NetworkWeights, frame: np.ndarray) -> np.ndarray:
    # frames run in the dtype the weights were loaded in
    return restore_frame(g, as_frame_tensor(frame, dtype=g.layers[0].weights.values.dtype)).values


def restore_frames(g: NetworkWeights, seq: FrameSequence, threads: int = 1) -> List[np.ndarray]:
    """
    G(D_t) for every frame, padded for the network and cropped back; values
    are unclamped. Non-finite output raises ScoringError naming the frame.
    """
    g = detached(g)
    padded, size = pad_to_divisible(seq, g.config.downsample_factor)
    outputs = Parallel(n_jobs=threads, backend="threading")(
        delayed(_restore_one)(g, frame) for frame in padded.frames
    )
    height, width = size
    restored = []
    for t, output in enumerate(outputs, start=1):
        if not np.all(np.isfinite(output)):
            raise ScoringError("restoration contains non-finite values", frame=t)
        restored.append(output[:, :, :height, :width])
    return restored


def restore_sequence(g: NetworkWeights, seq: FrameSequence, threads: int = 1) -> FrameSequence:
    """Clamped restorations R_t as a sequence, for export and inspection"""
    frames = [np.clip(frame, 0.0, 1.0) for frame in restore_frames(g, seq, threads)]
    return seq.with_frames(frames)


def score_video(
    g: NetworkWeights,
    distorted: FrameSequence,
    video_id: Optional[str] = None,
    log_base: LogBase = LogBase.NATURAL,
    threads: int = 1,
    peak: float = PSNR_PEAK,
    mse_floor: float = MSE_FLOOR,
    psnr_floor: float = PSNR_FLOOR,
) -> QualityScore:
    """
    Quality Score = (1/T) sum_t log(PSNR(clamp(G(D_t)), D_t)).

    The stored per-frame PSNRs are the floored values the log was taken of,
    so the score can be recomputed from them.
    """
    restored = restore_frames(g, distorted, threads)
    per_frame = []
    for t, (restoration, frame) in enumerate(zip(restored, distorted.frames), start=1):
        value = max(psnr(np.clip(restoration, 0.0, 1.0), frame, peak, mse_floor), psnr_floor)
        per_frame.append(value)
        logger.debug("%s frame %d PSNR %.4f dB", video_id or "video", t, value)

    score = float(np.mean(log_base.func(np.asarray(per_frame))))
    if not math.isfinite(score):
        raise ScoringError(f"non-finite quality score {score!r}")
    return QualityScore(video_id=video_id, score=score, per_frame_psnr=per_frame, log_base=log_base)
