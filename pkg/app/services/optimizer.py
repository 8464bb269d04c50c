import logging
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from app.exceptions import OptimizerStateError
from app.models.tensor import Tensor

logger = logging.getLogger(__name__)

DEFAULT_LEARNING_RATE = 1e-4
DEFAULT_BETA1 = 0.9
DEFAULT_BETA2 = 0.999
DEFAULT_EPSILON = 1e-8


@dataclass
class OptimizerState:
    """Adam moments, one array per parameter, in parameter order"""

    learning_rate: float = DEFAULT_LEARNING_RATE
    beta1: float = DEFAULT_BETA1
    beta2: float = DEFAULT_BETA2
    epsilon: float = DEFAULT_EPSILON
    step_count: int = 0
    first_moment: List[np.ndarray] = field(default_factory=list)
    second_moment: List[np.ndarray] = field(default_factory=list)

    @classmethod
    def for_parameters(cls, params: Sequence[Tensor], **hyperparams) -> "OptimizerState":
        return cls(
            first_moment=[np.zeros_like(p.values) for p in params],
            second_moment=[np.zeros_like(p.values) for p in params],
            **hyperparams,
        )

    @property
    def parameter_count(self) -> int:
        return sum(m.size for m in self.first_moment)


def adam_step(params: Sequence[Tensor], state: OptimizerState) -> OptimizerState:
    """
    One bias-corrected Adam update of ``params`` in place, using each
    parameter's ``grad`` (an absent grad counts as zero).

    param -= (lr / bc1) * m / (sqrt(v / bc2) + eps)
    """
    if len(params) != len(state.first_moment) or len(params) != len(state.second_moment):
        raise OptimizerStateError(
            f"Optimizer state holds {len(state.first_moment)} moment arrays for {len(params)} parameters"
        )
    total = sum(p.size for p in params)
    if total != state.parameter_count:
        raise OptimizerStateError(
            f"Optimizer moments cover {state.parameter_count} values, parameters have {total}"
        )

    for param, m in zip(params, state.first_moment):
        if m.shape != param.shape:
            raise OptimizerStateError(f"Moment shape {m.shape} does not match parameter shape {param.shape}")

    state.step_count += 1
    bc1 = 1.0 - state.beta1 ** state.step_count
    bc2 = 1.0 - state.beta2 ** state.step_count
    step_size = state.learning_rate / bc1

    for param, m, v in zip(params, state.first_moment, state.second_moment):
        g = param.grad if param.grad is not None else np.zeros_like(param.values)

        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)

        denom = np.sqrt(v * (1.0 / bc2)) + state.epsilon
        param.values -= step_size * m / denom

    logger.debug("Adam step %d applied to %d parameter arrays", state.step_count, len(params))
    return state
