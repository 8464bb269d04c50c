"""
Differentiable operations of the tensor engine.

Each op computes its forward value with numpy and returns a ``Tensor`` whose
``backward_fn`` maps the output gradient to one gradient per parent. Parents
that do not require gradients get ``None`` and are skipped on the tape.
"""

import logging
from typing import Optional, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from app.exceptions import ConfigurationError, DimensionError
from app.models.tensor import ConvParams, Tensor

logger = logging.getLogger(__name__)


def _tracked(*tensors: Tensor) -> bool:
    return any(t.requires_grad for t in tensors)


def conv_output_size(size: int, kernel: int, stride: int, padding: int) -> int:
    """floor((size + 2p - k) / s) + 1; raises when the result is not a positive count"""
    span = size + 2 * padding - kernel
    if span < 0:
        raise ConfigurationError(
            f"Kernel {kernel} with padding {padding} does not fit input size {size}"
        )
    return span // stride + 1


def conv2d(input: Tensor, params: ConvParams) -> Tensor:
    """Cross-correlation of ``input`` with ``params.weights`` plus bias"""
    n, c, h, w = input.require_rank4("conv2d input")
    if c != params.in_channels:
        raise DimensionError(
            f"conv2d input shape {input.shape} does not match weights shape {params.weights.shape}"
        )
    kh, kw, s, p = params.kernel_h, params.kernel_w, params.stride, params.padding
    h_out = conv_output_size(h, kh, s, p)
    w_out = conv_output_size(w, kw, s, p)

    padded = np.pad(input.values, ((0, 0), (0, 0), (p, p), (p, p))) if p else input.values
    # (n, c, h_out, w_out, kh, kw)
    windows = sliding_window_view(padded, (kh, kw), axis=(2, 3))[:, :, ::s, ::s][:, :, :h_out, :w_out]
    weights = params.weights.values
    out = np.tensordot(windows, weights, axes=([1, 4, 5], [1, 2, 3]))  # (n, h_out, w_out, oc)
    out = out.transpose(0, 3, 1, 2) + params.bias.values[None, :, None, None]

    def backward_fn(grad: np.ndarray):
        grad_w = grad_b = grad_x = None
        if params.weights.requires_grad:
            grad_w = np.tensordot(grad, windows, axes=([0, 2, 3], [0, 2, 3]))
        if params.bias.requires_grad:
            grad_b = grad.sum(axis=(0, 2, 3))
        if input.requires_grad:
            cols = np.tensordot(grad, weights, axes=([1], [0]))  # (n, h_out, w_out, c, kh, kw)
            grad_padded = np.zeros_like(padded)
            for i in range(kh):
                for j in range(kw):
                    grad_padded[:, :, i:i + s * h_out:s, j:j + s * w_out:s] += (
                        cols[:, :, :, :, i, j].transpose(0, 3, 1, 2)
                    )
            grad_x = grad_padded[:, :, p:p + h, p:p + w] if p else grad_padded
        return grad_x, grad_w, grad_b

    return Tensor(
        np.ascontiguousarray(out),
        requires_grad=_tracked(input, params.weights, params.bias),
        parents=(input, params.weights, params.bias),
        backward_fn=backward_fn,
        op="conv2d",
    )


def leaky_relu(input: Tensor, slope: float) -> Tensor:
    if not 0.0 <= slope < 1.0:
        raise ConfigurationError(f"leaky_relu slope must be in [0, 1), got {slope}")
    x = input.values
    positive = x >= 0
    out = np.where(positive, x, slope * x)

    def backward_fn(grad: np.ndarray):
        return (np.where(positive, grad, slope * grad),)

    return Tensor(
        out,
        requires_grad=input.requires_grad,
        parents=(input,),
        backward_fn=backward_fn,
        op="leaky_relu",
    )


def upsample_nearest(input: Tensor, factor: int) -> Tensor:
    n, c, h, w = input.require_rank4("upsample input")
    if factor < 1:
        raise ConfigurationError(f"upsample factor must be >= 1, got {factor}")
    if factor == 1:
        out = input.values.copy()
    else:
        out = input.values.repeat(factor, axis=2).repeat(factor, axis=3)

    def backward_fn(grad: np.ndarray):
        return (grad.reshape(n, c, h, factor, w, factor).sum(axis=(3, 5)),)

    return Tensor(
        out,
        requires_grad=input.requires_grad,
        parents=(input,),
        backward_fn=backward_fn,
        op="upsample_nearest",
    )


def l1_mean(a: Tensor, b: Tensor) -> Tensor:
    """Mean absolute difference; a rank-0 tensor"""
    if a.shape != b.shape:
        raise DimensionError(f"l1_mean shapes differ: {a.shape} vs {b.shape}")
    diff = a.values - b.values
    count = diff.size
    out = np.abs(diff).mean()

    def backward_fn(grad: np.ndarray):
        direction = np.sign(diff) * (grad / count)
        grad_a = direction if a.requires_grad else None
        grad_b = -direction if b.requires_grad else None
        return grad_a, grad_b

    return Tensor(
        np.asarray(out),
        requires_grad=_tracked(a, b),
        parents=(a, b),
        backward_fn=backward_fn,
        op="l1_mean",
    )


def weighted_sum(terms: Sequence[Tensor], weights: Sequence[float]) -> Tensor:
    """sum_k weights[k] * terms[k] over same-shaped tensors"""
    if len(terms) != len(weights) or not terms:
        raise DimensionError(f"weighted_sum got {len(terms)} terms and {len(weights)} weights")
    shape = terms[0].shape
    for term in terms:
        if term.shape != shape:
            raise DimensionError(f"weighted_sum shapes differ: {shape} vs {term.shape}")
    out = np.zeros(shape, dtype=terms[0].values.dtype)
    for term, weight in zip(terms, weights):
        out = out + weight * term.values

    def backward_fn(grad: np.ndarray):
        return tuple(weight * grad if term.requires_grad else None for term, weight in zip(terms, weights))

    return Tensor(
        out,
        requires_grad=_tracked(*terms),
        parents=tuple(terms),
        backward_fn=backward_fn,
        op="weighted_sum",
    )


def as_frame_tensor(values: np.ndarray, dtype: Optional[str] = None, requires_grad: bool = False) -> Tensor:
    """Wrap a ``(1, c, h, w)`` array as an input tensor"""
    array = np.asarray(values, dtype=dtype or np.float64)
    tensor = Tensor(array, requires_grad=requires_grad)
    tensor.require_rank4("frame")
    return tensor
