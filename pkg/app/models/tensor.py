from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from app.exceptions import ConfigurationError, ContractError, DimensionError

BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class Tensor:
    """
    Array value plus the tape entry that produced it.

    Frames and feature maps are rank-4 ``(n, c, h, w)``; losses are rank-0.
    A tensor built by an op keeps references to its parents and a closure
    mapping the output gradient to one gradient per parent. Only leaves with
    ``requires_grad`` receive a ``grad`` after ``backward()``.
    """

    __slots__ = ("values", "grad", "requires_grad", "parents", "backward_fn", "op")

    def __init__(
        self,
        values,
        requires_grad: bool = False,
        parents: Sequence["Tensor"] = (),
        backward_fn: Optional[BackwardFn] = None,
        op: str = "leaf",
    ):
        values = np.asarray(values)
        if not np.issubdtype(values.dtype, np.floating):
            values = values.astype(np.float64)
        self.values = values
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self.parents: Tuple["Tensor", ...] = tuple(parents)
        self.backward_fn = backward_fn
        self.op = op

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.values.shape

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def is_leaf(self) -> bool:
        return self.backward_fn is None

    def item(self) -> float:
        if self.values.size != 1:
            raise ContractError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.values.reshape(()))

    def require_rank4(self, name: str = "tensor") -> Tuple[int, int, int, int]:
        if self.values.ndim != 4:
            raise DimensionError(f"{name} must be rank 4 (n, c, h, w), got shape {self.shape}")
        n, c, h, w = self.values.shape
        return n, c, h, w

    def detach(self) -> "Tensor":
        return Tensor(self.values)

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        """Reverse-mode pass from this scalar to every reachable ``requires_grad`` leaf"""
        if self.values.size != 1:
            raise ContractError(f"backward() needs a scalar loss, got shape {self.shape}")

        pending = {id(self): np.ones_like(self.values)}
        for node in reversed(self._topological_order()):
            grad = pending.pop(id(node), None)
            if grad is None:
                continue
            if node.is_leaf:
                if node.requires_grad:
                    node.grad = grad.copy() if node.grad is None else node.grad + grad
                continue
            for parent, parent_grad in zip(node.parents, node.backward_fn(grad)):
                if parent_grad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                pending[key] = pending[key] + parent_grad if key in pending else parent_grad

    def _topological_order(self) -> List["Tensor"]:
        # Iterative post-order DFS; parents precede children in the result.
        order: List[Tensor] = []
        visited = set()
        stack: List[Tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node.parents:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))
        return order

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, op={self.op}, requires_grad={self.requires_grad})"


@dataclass
class ConvParams:
    """Weights ``(oc, ic, kh, kw)`` and bias ``(oc,)`` of one convolution layer"""

    weights: Tensor
    bias: Tensor
    stride: int = 1
    padding: int = 0

    def __post_init__(self):
        if self.weights.values.ndim != 4:
            raise DimensionError(f"Conv weights must be (oc, ic, kh, kw), got {self.weights.shape}")
        if self.bias.shape != (self.out_channels,):
            raise DimensionError(
                f"Conv bias shape {self.bias.shape} does not match {self.out_channels} output channels"
            )
        if self.stride < 1:
            raise ConfigurationError(f"stride must be >= 1, got {self.stride}")
        if self.padding < 0:
            raise ConfigurationError(f"padding must be >= 0, got {self.padding}")

    @property
    def out_channels(self) -> int:
        return self.weights.shape[0]

    @property
    def in_channels(self) -> int:
        return self.weights.shape[1]

    @property
    def kernel_h(self) -> int:
        return self.weights.shape[2]

    @property
    def kernel_w(self) -> int:
        return self.weights.shape[3]

    @property
    def parameter_count(self) -> int:
        return self.weights.size + self.bias.size

    def parameters(self) -> List[Tensor]:
        return [self.weights, self.bias]
