from .network import NetworkConfig
from .training import LossRecord, LossTrace, TrainConfig
from .distortion import DistortionKind, DistortionSpec
from .quality import REPORT_HEADER, LogBase, QualityScore
from .evaluation import CorrelationReport, CorrelationRow, ManifestEntry, ManifestRole
from .requests import DistortionRequest, DistortionResponse, EvaluationRequest, ScoreRequest

__all__ = [
    # Configuration
    "NetworkConfig",
    "TrainConfig",
    "LossRecord",
    "LossTrace",
    # Distortions
    "DistortionKind",
    "DistortionSpec",
    # Scores and evaluation
    "REPORT_HEADER",
    "LogBase",
    "QualityScore",
    "CorrelationReport",
    "CorrelationRow",
    "ManifestEntry",
    "ManifestRole",
    # API bodies
    "ScoreRequest",
    "DistortionRequest",
    "DistortionResponse",
    "EvaluationRequest",
]
