"""
Finite-difference verification of the tensor engine.

Every check builds a fresh graph from the current input values, so the
forward closure can be re-evaluated after an input cell is nudged in place.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np

from app.models.network import NetworkRole
from app.models.tensor import ConvParams, Tensor
from app.schemas.network import NetworkConfig
from .ops import conv2d, l1_mean, leaky_relu, upsample_nearest
from .prior_net import build_network, restore_frame
from .trainer import perceptual_loss

logger = logging.getLogger(__name__)

FD_STEP = 1e-5
TOLERANCE = 1e-4
REL_ERROR_FLOOR = 1e-6


@dataclass
class GradCheckResult:
    op: str
    max_rel_error: float
    checked: int
    tolerance: float = TOLERANCE

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_rel_error)) and self.max_rel_error < self.tolerance

    def table_row(self) -> str:
        return f"{self.op},{self.max_rel_error:.3e},{self.checked},{'ok' if self.passed else 'FAIL'}"


def check_gradients(
    loss_fn: Callable[[], Tensor], inputs: Sequence[Tensor], step: float = FD_STEP
) -> Tuple[float, int]:
    """
    Compare backward() against central differences for every cell of
    ``inputs``. Returns ``(max_rel_error, cells_checked)`` with the
    elementwise error |a - n| / max(|a|, |n|, 1e-6).
    """
    for tensor in inputs:
        tensor.zero_grad()
    loss_fn().backward()
    analytic = [tensor.grad if tensor.grad is not None else np.zeros_like(tensor.values) for tensor in inputs]

    worst, checked = 0.0, 0
    for tensor, grad in zip(inputs, analytic):
        values = tensor.values
        for index in np.ndindex(values.shape):
            original = values[index]
            values[index] = original + step
            upper = loss_fn().item()
            values[index] = original - step
            lower = loss_fn().item()
            values[index] = original
            numeric = (upper - lower) / (2.0 * step)
            error = abs(grad[index] - numeric) / max(abs(grad[index]), abs(numeric), REL_ERROR_FLOOR)
            worst = max(worst, float(error))
            checked += 1
    return worst, checked


def _away_from_zero(rng: np.random.Generator, shape) -> np.ndarray:
    # Keeps leaky_relu inputs clear of the kink at 0.
    return rng.choice([-1.0, 1.0], size=shape) * rng.uniform(0.05, 1.0, size=shape)


def _offset_target(rng: np.random.Generator, values: np.ndarray) -> Tensor:
    # l1_mean against a target at distance >= 0.5 is linear near ``values``.
    return Tensor(values + rng.choice([-1.0, 1.0], size=values.shape) * rng.uniform(0.5, 1.0, size=values.shape))


def _conv2d_case(rng):
    x = Tensor(rng.uniform(-1.0, 1.0, size=(1, 2, 8, 8)), requires_grad=True)
    params = ConvParams(
        weights=Tensor(rng.uniform(-0.5, 0.5, size=(3, 2, 3, 3)), requires_grad=True),
        bias=Tensor(rng.uniform(-0.1, 0.1, size=3), requires_grad=True),
        stride=2,
        padding=1,
    )
    target = _offset_target(rng, conv2d(x, params).values)
    return (lambda: l1_mean(conv2d(x, params), target)), [x, params.weights, params.bias]


def _leaky_relu_case(rng):
    x = Tensor(_away_from_zero(rng, (1, 2, 8, 8)), requires_grad=True)
    target = _offset_target(rng, leaky_relu(x, 0.2).values)
    return (lambda: l1_mean(leaky_relu(x, 0.2), target)), [x]


def _upsample_case(rng):
    x = Tensor(rng.uniform(-1.0, 1.0, size=(1, 2, 4, 4)), requires_grad=True)
    target = _offset_target(rng, upsample_nearest(x, 2).values)
    return (lambda: l1_mean(upsample_nearest(x, 2), target)), [x]


def _l1_mean_case(rng):
    a = Tensor(rng.uniform(-1.0, 1.0, size=(1, 2, 8, 8)), requires_grad=True)
    b = _offset_target(rng, a.values)
    b.requires_grad = True
    return (lambda: l1_mean(a, b)), [a, b]


def _perceptual_loss_case(rng):
    config = NetworkConfig(encoder_channels=[2, 2], seed=int(rng.integers(1 << 31)))
    extractor = build_network(config, NetworkRole.FEATURE_EXTRACTOR)
    restored = Tensor(rng.uniform(0.0, 1.0, size=(1, 1, 8, 8)), requires_grad=True)
    original = Tensor(rng.uniform(0.0, 1.0, size=(1, 1, 8, 8)))
    weights = [1.0, 0.5, 0.25]
    return (lambda: perceptual_loss(restored, original, extractor, weights)), [restored]


def _composite_case(rng):
    # encoder conv -> leaky -> upsample -> conv -> leaky -> 1x1 conv
    config = NetworkConfig(encoder_channels=[2], seed=int(rng.integers(1 << 31)))
    restorer = build_network(config, NetworkRole.RESTORER)
    for layer in restorer.layers:
        layer.bias.values[...] = rng.uniform(-0.1, 0.1, size=layer.bias.shape)
    frame = Tensor(rng.uniform(0.0, 1.0, size=(1, 1, 8, 8)), requires_grad=True)
    target = _offset_target(rng, restore_frame(restorer, frame).values)
    return (lambda: l1_mean(restore_frame(restorer, frame), target)), [frame] + restorer.parameters()


CASES = {
    "conv2d": _conv2d_case,
    "leaky_relu": _leaky_relu_case,
    "upsample_nearest": _upsample_case,
    "l1_mean": _l1_mean_case,
    "perceptual_loss": _perceptual_loss_case,
    "composite_3_layer": _composite_case,
}


def run_gradient_suite(seed: int = 0, step: float = FD_STEP, tolerance: float = TOLERANCE) -> List[GradCheckResult]:
    rng = np.random.default_rng(seed)
    results = []
    for name, build_case in CASES.items():
        loss_fn, inputs = build_case(rng)
        max_error, checked = check_gradients(loss_fn, inputs, step)
        result = GradCheckResult(op=name, max_rel_error=max_error, checked=checked, tolerance=tolerance)
        logger.info("gradcheck %s: max rel error %.3e over %d cells", name, max_error, checked)
        results.append(result)
    return results
