from typing import List

from pydantic import BaseModel, Field, field_validator


class NetworkConfig(BaseModel):
    in_channels: int = Field(default=1, ge=1, description="Channels of the frames fed to the restorer")
    out_channels: int = Field(default=1, ge=1, description="Channels of the restored frames")
    encoder_channels: List[int] = Field(
        default_factory=lambda: [16, 32, 64],
        min_length=1,
        description="Output channels of each stride-2 encoder stage",
    )
    kernel_size: int = Field(default=3, ge=1, description="Square kernel size of every 'same' convolution")
    activation_slope: float = Field(default=0.2, ge=0.0, lt=1.0, description="Leaky-ReLU negative slope")
    seed: int = Field(default=0, description="Seed of the restorer's random initialisation")
    extractor_seed: int = Field(default=1009, description="Seed of the frozen feature extractor")

    @field_validator("kernel_size")
    @classmethod
    def _kernel_must_be_odd(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError("kernel_size must be odd so that 'same' padding exists")
        return value

    @field_validator("encoder_channels")
    @classmethod
    def _channels_positive(cls, value: List[int]) -> List[int]:
        if any(ch < 1 for ch in value):
            raise ValueError("encoder_channels must all be >= 1")
        return value

    @property
    def stages(self) -> int:
        return len(self.encoder_channels)

    @property
    def downsample_factor(self) -> int:
        """Spatial factor frame sides must divide: one halving per encoder stage"""
        return 2 ** self.stages
