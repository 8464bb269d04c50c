from typing import Optional


class DeepPriorError(Exception):
    """Base class for every error raised by the package"""


class ConfigurationError(DeepPriorError, ValueError):
    """Invalid parameters: bad config values, shapes that cannot exist, bad severities"""


class DimensionError(DeepPriorError, ValueError):
    """Tensor or frame shapes that do not fit together"""


class ContractError(DeepPriorError):
    """An operation was called outside its contract (e.g. backward on a non-scalar)"""


class OptimizerStateError(DeepPriorError):
    """Optimizer moments do not line up with the parameter list"""


class FormatError(DeepPriorError):
    """Unreadable or inconsistent frame data on disk"""


class SequenceSizeError(FormatError):
    def __init__(self, path: str, frame_size: int, actual: int):
        self.path = path
        self.frame_size = frame_size
        self.expected = frame_size * max(-(-actual // frame_size), 1)
        self.actual = actual
        super().__init__(
            f"{path}: expected {self.expected} bytes (a multiple of the {frame_size}-byte frame), "
            f"found {actual}"
        )


class WeightsFormatError(FormatError):
    """Weights file with a bad magic, version, config block or array length"""


class PairingError(DeepPriorError):
    """Original and distorted sequences do not form a training pair"""


class DivergenceError(DeepPriorError):
    def __init__(self, epoch: int, frame: int, loss: float):
        self.epoch = epoch
        self.frame = frame
        self.loss = loss
        super().__init__(f"Non-finite loss {loss!r} at epoch {epoch}, frame {frame}")


class ScoringError(DeepPriorError):
    def __init__(self, detail: str, frame: Optional[int] = None):
        self.frame = frame
        prefix = f"frame {frame}: " if frame is not None else ""
        super().__init__(prefix + detail)


class DegenerateVarianceError(DeepPriorError, ValueError):
    """Correlation requested on a constant vector"""


class ManifestError(DeepPriorError):
    """Malformed evaluation manifest"""
