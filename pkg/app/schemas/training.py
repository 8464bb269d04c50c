import math
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd
from pydantic import BaseModel, Field, field_validator

from app.exceptions import ConfigurationError


class TrainConfig(BaseModel):
    epochs: int = Field(default=10, ge=1, description="Passes over the training pair")
    learning_rate: float = Field(default=1e-4, gt=0, description="Adam step size used by the trainer")
    beta1: float = Field(default=0.9, ge=0, lt=1, description="Adam first-moment decay")
    beta2: float = Field(default=0.999, ge=0, lt=1, description="Adam second-moment decay")
    epsilon: float = Field(default=1e-8, gt=0, description="Adam denominator offset")
    loss_layer_weights: Optional[List[float]] = Field(
        default=None,
        description="Per-term loss weights, index 0 = pixel term; defaults to all 1.0",
    )
    seed: Optional[int] = Field(default=None, description="Overrides NetworkConfig.seed for the restorer when set")

    @field_validator("loss_layer_weights")
    @classmethod
    def _weights_usable(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is None:
            return value
        if any(w < 0 or not math.isfinite(w) for w in value):
            raise ValueError("loss_layer_weights must be finite and non-negative")
        if not any(w > 0 for w in value):
            raise ValueError("loss_layer_weights needs at least one positive weight")
        return value

    def layer_weights_for(self, stages: int) -> List[float]:
        """Weights for the pixel term plus ``stages`` feature terms"""
        if self.loss_layer_weights is None:
            return [1.0] * (stages + 1)
        if len(self.loss_layer_weights) != stages + 1:
            raise ConfigurationError(
                f"loss_layer_weights has {len(self.loss_layer_weights)} entries, "
                f"the network needs {stages + 1} (pixel term + {stages} feature stages)"
            )
        return list(self.loss_layer_weights)

    def optimizer_params(self) -> Dict[str, float]:
        return {
            "learning_rate": self.learning_rate,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "epsilon": self.epsilon,
        }


class LossRecord(BaseModel):
    epoch: int = Field(..., ge=1, description="1-based epoch")
    frame: int = Field(..., ge=1, description="1-based frame index t")
    loss: float = Field(..., ge=0, description="Perceptual loss of this step")


class LossTrace(BaseModel):
    records: List[LossRecord] = Field(default_factory=list)

    def append(self, epoch: int, frame: int, loss: float) -> None:
        self.records.append(LossRecord(epoch=epoch, frame=frame, loss=loss))

    def __len__(self) -> int:
        return len(self.records)

    def epoch_means(self) -> Dict[int, float]:
        frame = self.to_frame()
        if frame.empty:
            return {}
        return {int(epoch): float(mean) for epoch, mean in frame.groupby("epoch")["loss"].mean().items()}

    def first_epoch_mean(self) -> float:
        means = self.epoch_means()
        return means[min(means)]

    def final_epoch_mean(self) -> float:
        means = self.epoch_means()
        return means[max(means)]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [record.model_dump() for record in self.records],
            columns=["epoch", "frame", "loss"],
        )

    def write_csv(self, path: Path) -> None:
        # pandas writes float64 with round-trip precision
        self.to_frame().to_csv(path, index=False)
