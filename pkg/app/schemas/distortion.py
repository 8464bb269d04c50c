import enum

from pydantic import BaseModel, Field

from app.exceptions import ConfigurationError


class DistortionKind(str, enum.Enum):
    AWGN = "awgn"
    GAUSSIAN_BLUR = "gaussian_blur"
    BLOCK_QUANTIZE = "block_quantize"


class DistortionSpec(BaseModel):
    kind: DistortionKind = Field(..., description="Distortion family")
    severity: float = Field(
        ...,
        ge=0,
        description=(
            "Noise sigma in intensity units (awgn), blur sigma in pixels (gaussian_blur), "
            "quantization step in intensity units (block_quantize); 0 is the identity"
        ),
    )
    seed: int = Field(default=0, description="Noise seed, used by awgn only")

    def to_text(self) -> str:
        return f"{self.kind.value},{self.severity!r},{self.seed}"

    @classmethod
    def from_text(cls, text: str) -> "DistortionSpec":
        parts = [part.strip() for part in text.strip().split(",")]
        if len(parts) not in (2, 3):
            raise ConfigurationError(f"Distortion spec must be 'kind,severity[,seed]', got '{text}'")
        try:
            kind = DistortionKind(parts[0])
            severity = float(parts[1])
            seed = int(parts[2]) if len(parts) == 3 else 0
        except ValueError as exc:
            raise ConfigurationError(f"Bad distortion spec '{text}': {exc}") from exc
        if severity < 0:
            raise ConfigurationError(f"Distortion severity must be >= 0, got {severity}")
        return cls(kind=kind, severity=severity, seed=seed)
