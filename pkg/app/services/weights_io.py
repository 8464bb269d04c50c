"""
Weights file layout (little-endian):

    b"DVPW" | u32 version | u32 n | n bytes of UTF-8 JSON {"role", "config"}
    | per layer in declaration order: weights (oc*ic*kh*kw f32), bias (oc f32)
"""

import json
import logging
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from app.exceptions import WeightsFormatError
from app.models.network import NetworkRole, NetworkWeights
from app.models.tensor import ConvParams, Tensor
from app.schemas.network import NetworkConfig
from .prior_net import layer_plan

logger = logging.getLogger(__name__)

MAGIC = b"DVPW"
FORMAT_VERSION = 1
_U32 = np.dtype("<u4")
_F32 = np.dtype("<f4")


def encode_weights(network: NetworkWeights) -> bytes:
    header = json.dumps(
        {"role": network.role.value, "config": network.config.model_dump()},
        sort_keys=True,
    ).encode("utf-8")
    chunks = [
        MAGIC,
        np.array([FORMAT_VERSION, len(header)], dtype=_U32).tobytes(),
        header,
    ]
    for layer in network.layers:
        chunks.append(layer.weights.values.astype(_F32).tobytes())
        chunks.append(layer.bias.values.astype(_F32).tobytes())
    return b"".join(chunks)


def decode_weights(blob: bytes, source: str = "<bytes>", dtype=np.float64) -> NetworkWeights:
    if blob[:4] != MAGIC:
        raise WeightsFormatError(f"{source}: bad magic {blob[:4]!r}, expected {MAGIC!r}")
    if len(blob) < 12:
        raise WeightsFormatError(f"{source}: truncated header ({len(blob)} bytes)")
    version, header_len = np.frombuffer(blob, dtype=_U32, count=2, offset=4)
    if version != FORMAT_VERSION:
        raise WeightsFormatError(f"{source}: unsupported format version {version}")
    offset = 12 + int(header_len)
    if len(blob) < offset:
        raise WeightsFormatError(f"{source}: config block runs past end of file")
    try:
        header = json.loads(blob[12:offset].decode("utf-8"))
        role = NetworkRole(header["role"])
        config = NetworkConfig.model_validate(header["config"])
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, ValueError, ValidationError) as exc:
        raise WeightsFormatError(f"{source}: unreadable config block: {exc}") from exc

    plan = layer_plan(config, role)
    expected = offset + sum((o * i * k * k + o) * _F32.itemsize for i, o, k, _ in plan)
    if len(blob) != expected:
        raise WeightsFormatError(f"{source}: expected {expected} bytes for this config, found {len(blob)}")

    trainable = role is NetworkRole.RESTORER
    layers = []
    for in_ch, out_ch, kernel, stride in plan:
        count = out_ch * in_ch * kernel * kernel
        weights = np.frombuffer(blob, dtype=_F32, count=count, offset=offset).reshape(out_ch, in_ch, kernel, kernel)
        offset += count * _F32.itemsize
        bias = np.frombuffer(blob, dtype=_F32, count=out_ch, offset=offset)
        offset += out_ch * _F32.itemsize
        layers.append(
            ConvParams(
                weights=Tensor(weights.astype(dtype), requires_grad=trainable),
                bias=Tensor(bias.astype(dtype), requires_grad=trainable),
                stride=stride,
                padding=kernel // 2,
            )
        )
    return NetworkWeights(config=config, layers=layers, role=role)


def save_weights(network: NetworkWeights, path: Path) -> None:
    path = Path(path)
    path.write_bytes(encode_weights(network))
    logger.info("Wrote %s weights (%d parameters) to %s", network.role.value, network.parameter_count, path)


def load_weights(path: Path, dtype=np.float64) -> NetworkWeights:
    path = Path(path)
    network = decode_weights(path.read_bytes(), source=str(path), dtype=dtype)
    logger.debug("Loaded %s weights from %s", network.role.value, path)
    return network
