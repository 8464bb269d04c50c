import enum
import math
from typing import List, Optional

import pandas as pd
from pydantic import BaseModel, Field, model_validator


class ManifestRole(str, enum.Enum):
    TRAIN = "train"
    TEST = "test"


class ManifestEntry(BaseModel):
    video_id: str = Field(..., min_length=1, description="Identifier of the video")
    path: str = Field(..., min_length=1, description="Video location; the original for the train row")
    mos: Optional[float] = Field(default=None, description="Subjective score")
    role: ManifestRole = Field(..., description="train (the training pair) or test")
    pair_path: Optional[str] = Field(default=None, description="Distorted location, train row only")

    @model_validator(mode="after")
    def _check_role_fields(self) -> "ManifestEntry":
        if self.role == ManifestRole.TRAIN and not self.pair_path:
            raise ValueError(f"train entry '{self.video_id}' needs a pair_path (the distorted video)")
        if self.role == ManifestRole.TEST and (self.mos is None or not math.isfinite(self.mos)):
            raise ValueError(f"test entry '{self.video_id}' needs a finite mos")
        return self


class CorrelationRow(BaseModel):
    video_id: str
    predicted: float
    mos: float


class CorrelationReport(BaseModel):
    lcc: float = Field(..., ge=-1.0, le=1.0, description="Signed Pearson correlation")
    srocc: float = Field(..., ge=-1.0, le=1.0, description="Signed Spearman correlation")
    n: int = Field(..., ge=2, description="Number of scored test videos")
    rows: List[CorrelationRow] = Field(default_factory=list, description="Per-video table in manifest order")

    def summary_line(self) -> str:
        return f"{self.n},{round(self.lcc, 12)!r},{round(self.srocc, 12)!r}"

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [row.model_dump() for row in self.rows],
            columns=["video_id", "predicted", "mos"],
        )

    def summary_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "n": self.n,
                    "lcc": self.lcc,
                    "srocc": self.srocc,
                    "abs_lcc": abs(self.lcc),
                    "abs_srocc": abs(self.srocc),
                }
            ]
        )
