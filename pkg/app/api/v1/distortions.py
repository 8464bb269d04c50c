import logging
from pathlib import Path

from fastapi import APIRouter, status

from app.api.errors import to_http_error
from app.exceptions import DeepPriorError
from app.schemas.requests import DistortionRequest, DistortionResponse
from app.services.distortion_lab import apply_distortion
from app.services.video_io import read_sequence, write_sequence

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/distortions", tags=["Distortions"])


@router.post("", response_model=DistortionResponse, status_code=status.HTTP_201_CREATED)
def create_distortion(request: DistortionRequest):
    """Write a synthetically distorted copy of a video"""
    size = tuple(request.size) if request.size else None
    try:
        source = read_sequence(
            Path(request.input_path), format=request.format, channel_mode=request.channel_mode, size=size
        )
        distorted = apply_distortion(source, request.spec)
        write_sequence(distorted, Path(request.output_path), format=request.format)
    except (DeepPriorError, OSError, ValueError) as exc:
        logger.warning("Distorting %s failed: %s", request.input_path, exc)
        raise to_http_error(exc) from exc
    return DistortionResponse(
        output_path=request.output_path,
        frame_count=distorted.frame_count,
        spec=request.spec,
    )
