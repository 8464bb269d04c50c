import enum
from typing import Callable, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field

REPORT_HEADER = "video_id,score,T,min_psnr,max_psnr"


class LogBase(str, enum.Enum):
    NATURAL = "natural"
    LOG10 = "log10"
    LOG2 = "log2"

    @property
    def func(self) -> Callable[[np.ndarray], np.ndarray]:
        return _LOG_FUNCS[self]


_LOG_FUNCS: Dict[LogBase, Callable[[np.ndarray], np.ndarray]] = {
    LogBase.NATURAL: np.log,
    LogBase.LOG10: np.log10,
    LogBase.LOG2: np.log2,
}


class QualityScore(BaseModel):
    video_id: Optional[str] = Field(default=None, description="Identifier used in reports")
    score: float = Field(..., description="Mean over frames of log(PSNR(R_t, D_t))")
    per_frame_psnr: List[float] = Field(..., min_length=1, description="PSNR in dB per frame, temporal order")
    log_base: LogBase = Field(default=LogBase.NATURAL, description="Base of the log in the mean")

    @property
    def frame_count(self) -> int:
        return len(self.per_frame_psnr)

    @property
    def min_psnr(self) -> float:
        return min(self.per_frame_psnr)

    @property
    def max_psnr(self) -> float:
        return max(self.per_frame_psnr)

    def recompute(self) -> float:
        return float(np.mean(self.log_base.func(np.asarray(self.per_frame_psnr))))

    def report_line(self) -> str:
        video_id = self.video_id or ""
        return f"{video_id},{self.score!r},{self.frame_count},{self.min_psnr!r},{self.max_psnr!r}"
