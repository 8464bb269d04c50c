import enum
from dataclasses import dataclass, field
from typing import List

from app.exceptions import ConfigurationError
from app.models.tensor import ConvParams, Tensor
from app.schemas.network import NetworkConfig


class NetworkRole(str, enum.Enum):
    RESTORER = "restorer"
    FEATURE_EXTRACTOR = "feature_extractor"


@dataclass
class NetworkWeights:
    """
    Parameter set of the restorer G or of the frozen extractor F.

    Layers are kept in declaration order; for the restorer that is encoder
    stages, decoder stages, then the 1x1 output projection.
    """

    config: NetworkConfig
    layers: List[ConvParams]
    role: NetworkRole

    def __post_init__(self):
        for index in range(1, len(self.layers)):
            previous, current = self.layers[index - 1], self.layers[index]
            if previous.out_channels != current.in_channels:
                raise ConfigurationError(
                    f"Layer {index} expects {current.in_channels} input channels, "
                    f"layer {index - 1} produces {previous.out_channels}"
                )
        if self.frozen:
            for param in self.parameters():
                param.requires_grad = False

    @property
    def frozen(self) -> bool:
        return self.role is NetworkRole.FEATURE_EXTRACTOR

    @property
    def parameter_count(self) -> int:
        return sum(layer.parameter_count for layer in self.layers)

    def parameters(self) -> List[Tensor]:
        return [param for layer in self.layers for param in layer.parameters()]

    def zero_grad(self) -> None:
        for param in self.parameters():
            param.zero_grad()


@dataclass
class FeatureStack:
    """F_1..F_L activation maps of one frame, shallowest first"""

    maps: List[Tensor] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.maps)

    def __getitem__(self, k: int) -> Tensor:
        return self.maps[k]
