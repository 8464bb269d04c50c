from typing import Annotated, List, Optional

from pydantic import BaseModel, Field

from app.models.video import ChannelMode, VideoFormat
from .distortion import DistortionSpec
from .quality import LogBase

# [height, width]
FrameSize = Annotated[List[Annotated[int, Field(ge=1)]], Field(min_length=2, max_length=2)]


class ScoreRequest(BaseModel):
    weights_path: str = Field(..., description="Trained restorer weights file")
    video_path: str = Field(..., description="Distorted video to score")
    video_id: Optional[str] = Field(default=None, description="Identifier echoed in the report line")
    format: Optional[VideoFormat] = Field(default=None, description="Inferred from the path when omitted")
    size: Optional[FrameSize] = Field(default=None, description="[height, width], raw_yuv only")
    log_base: Optional[LogBase] = Field(default=None, description="Base of the log in the score; settings default when omitted")
    restored_out: Optional[str] = Field(default=None, description="Where to write the clamped restorations")


class DistortionRequest(BaseModel):
    input_path: str = Field(..., description="Source video")
    output_path: str = Field(..., description="Destination for the distorted copy")
    spec: DistortionSpec
    format: Optional[VideoFormat] = Field(default=None, description="Inferred from the path when omitted")
    channel_mode: ChannelMode = Field(default=ChannelMode.LUMA)
    size: Optional[FrameSize] = Field(default=None, description="[height, width], raw_yuv only")


class DistortionResponse(BaseModel):
    output_path: str
    frame_count: int
    spec: DistortionSpec


class EvaluationRequest(BaseModel):
    manifest_path: str = Field(..., description="CSV manifest: video_id,path,mos,role[,pair_path]")
    config_path: Optional[str] = Field(default=None, description="Flat key = value run config")
    channel_mode: ChannelMode = Field(default=ChannelMode.LUMA)
    size: Optional[FrameSize] = Field(default=None, description="[height, width], raw_yuv only")
