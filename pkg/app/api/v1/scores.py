import logging
from pathlib import Path

from fastapi import APIRouter, status

from app.api.errors import to_http_error
from app.config import get_settings
from app.exceptions import DeepPriorError
from app.schemas.quality import LogBase, QualityScore
from app.schemas.requests import ScoreRequest
from app.services.scoring import restore_sequence, score_video
from app.services.video_io import read_sequence, write_sequence
from app.services.weights_io import load_weights

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/scores", tags=["Scores"])


@router.post("", response_model=QualityScore, status_code=status.HTTP_200_OK)
def create_score(request: ScoreRequest):
    """Score one distorted video with a trained restorer"""
    settings = get_settings()
    try:
        restorer = load_weights(Path(request.weights_path), dtype=settings.compute_dtype)
        video = read_sequence(
            Path(request.video_path),
            format=request.format,
            size=tuple(request.size) if request.size else None,
        )
        score = score_video(
            restorer,
            video,
            video_id=request.video_id,
            log_base=request.log_base or LogBase(settings.score_log_base),
            threads=settings.threads,
            peak=settings.psnr_peak,
            mse_floor=settings.mse_floor,
            psnr_floor=settings.psnr_floor,
        )
        if request.restored_out:
            write_sequence(restore_sequence(restorer, video, settings.threads), Path(request.restored_out))
    except (DeepPriorError, OSError, ValueError) as exc:
        logger.warning("Scoring %s failed: %s", request.video_path, exc)
        raise to_http_error(exc) from exc
    return score
