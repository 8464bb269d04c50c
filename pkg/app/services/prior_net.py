import logging
import math
from typing import List, Tuple

import numpy as np

from app.exceptions import ContractError, DimensionError
from app.models.network import FeatureStack, NetworkRole, NetworkWeights
from app.models.tensor import ConvParams, Tensor
from app.schemas.network import NetworkConfig
from .ops import conv2d, leaky_relu, upsample_nearest

logger = logging.getLogger(__name__)

# (in_channels, out_channels, kernel, stride)
LayerShape = Tuple[int, int, int, int]


def layer_plan(config: NetworkConfig, role: NetworkRole) -> List[LayerShape]:
    """
    Layer shapes for a role.

    Restorer: stride-2 encoder stages, mirrored decoder stages (each after a
    2x nearest upsample), then a 1x1 projection to ``out_channels``.
    Extractor: the encoder stages alone, reading ``out_channels`` frames.
    """
    k = config.kernel_size
    if role is NetworkRole.FEATURE_EXTRACTOR:
        plan, channels = [], config.out_channels
        for width in config.encoder_channels:
            plan.append((channels, width, k, 2))
            channels = width
        return plan

    plan, channels = [], config.in_channels
    for width in config.encoder_channels:
        plan.append((channels, width, k, 2))
        channels = width
    decoder_widths = list(reversed(config.encoder_channels[:-1])) + [config.encoder_channels[0]]
    for width in decoder_widths:
        plan.append((channels, width, k, 1))
        channels = width
    plan.append((channels, config.out_channels, 1, 1))
    return plan


def build_network(config: NetworkConfig, role: NetworkRole, dtype=np.float64) -> NetworkWeights:
    """Randomly initialised weights: uniform in [-a, a], a = sqrt(1 / (ic*kh*kw)); zero biases"""
    seed = config.extractor_seed if role is NetworkRole.FEATURE_EXTRACTOR else config.seed
    rng = np.random.default_rng(seed)
    trainable = role is NetworkRole.RESTORER

    layers = []
    for in_ch, out_ch, kernel, stride in layer_plan(config, role):
        bound = math.sqrt(1.0 / (in_ch * kernel * kernel))
        weights = rng.uniform(-bound, bound, size=(out_ch, in_ch, kernel, kernel)).astype(dtype)
        layers.append(
            ConvParams(
                weights=Tensor(weights, requires_grad=trainable),
                bias=Tensor(np.zeros(out_ch, dtype=dtype), requires_grad=trainable),
                stride=stride,
                padding=kernel // 2,
            )
        )

    network = NetworkWeights(config=config, layers=layers, role=role)
    logger.debug(
        "Built %s with %d layers, %d parameters (seed=%s)",
        role.value, len(layers), network.parameter_count, seed,
    )
    return network


def detached(network: NetworkWeights) -> NetworkWeights:
    """Same arrays, no gradient tracking; for inference so no tape is recorded"""
    layers = [
        ConvParams(
            weights=Tensor(layer.weights.values),
            bias=Tensor(layer.bias.values),
            stride=layer.stride,
            padding=layer.padding,
        )
        for layer in network.layers
    ]
    return NetworkWeights(config=network.config, layers=layers, role=network.role)


def restore_frame(g: NetworkWeights, frame: Tensor) -> Tensor:
    """R_t = G(D_t); unbounded output with the input's shape"""
    if g.role is not NetworkRole.RESTORER:
        raise ContractError(f"restore_frame needs restorer weights, got {g.role.value}")
    _, c, h, w = frame.require_rank4("frame")
    config = g.config
    if c != config.in_channels:
        raise DimensionError(f"Frame shape {frame.shape} has {c} channels, the restorer expects {config.in_channels}")
    factor = config.downsample_factor
    if h % factor or w % factor:
        raise DimensionError(
            f"Frame size {h}x{w} is not divisible by {factor}; pad the sequence with "
            f"pad_to_divisible(seq, {factor}) before restoring"
        )

    stages = config.stages
    slope = config.activation_slope
    x = frame
    for layer in g.layers[:stages]:
        x = leaky_relu(conv2d(x, layer), slope)
    for layer in g.layers[stages:2 * stages]:
        x = leaky_relu(conv2d(upsample_nearest(x, 2), layer), slope)
    return conv2d(x, g.layers[-1])


def extract_features(f: NetworkWeights, frame: Tensor) -> FeatureStack:
    """F_1..F_L: post-activation output of each extractor stage"""
    if f.role is not NetworkRole.FEATURE_EXTRACTOR:
        raise ContractError(f"extract_features needs extractor weights, got {f.role.value}")
    _, c, _, _ = frame.require_rank4("frame")
    if c != f.layers[0].in_channels:
        raise DimensionError(
            f"Frame shape {frame.shape} does not match extractor input of {f.layers[0].in_channels} channels"
        )
    maps = []
    x = frame
    for layer in f.layers:
        x = leaky_relu(conv2d(x, layer), f.config.activation_slope)
        maps.append(x)
    return FeatureStack(maps=maps)
