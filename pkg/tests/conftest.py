"""
Pytest configuration and fixtures.

This module provides shared fixtures for all tests:
- Synthetic frame sequences (smooth moving patterns in [0, 1])
- Tiny network and training configs that keep tests fast
- Videos on disk as PNG directories and Y4M files
- A session-scoped restorer trained once on a tiny AWGN pair
"""

from pathlib import Path
from typing import Generator, Tuple

import numpy as np
import pytest
from fastapi.testclient import TestClient

from app.config import get_settings
from app.main import app
from app.models.network import NetworkWeights
from app.models.video import ChannelMode, FrameSequence
from app.schemas.distortion import DistortionKind, DistortionSpec
from app.schemas.network import NetworkConfig
from app.schemas.training import LossTrace, TrainConfig
from app.services.distortion_lab import apply_distortion, severity_ladder
from app.services.trainer import train_pair
from app.services.video_io import write_sequence


def synthetic_sequence(
    frames: int = 4,
    height: int = 16,
    width: int = 16,
    channel_mode: ChannelMode = ChannelMode.LUMA,
    phase: float = 0.0,
) -> FrameSequence:
    """0.5 + 0.25 * sin pattern drifting one step per frame"""
    rows = np.arange(height)[:, None]
    cols = np.arange(width)[None, :]
    out = []
    for t in range(frames):
        planes = [
            0.5 + 0.25 * np.sin(0.4 * rows + 0.3 * cols + 0.5 * t + phase + 1.3 * c)
            for c in range(channel_mode.channels)
        ]
        out.append(np.stack(planes)[None].astype(np.float64))
    return FrameSequence(frames=out, channel_mode=channel_mode)


@pytest.fixture(autouse=True)
def clear_settings_cache() -> Generator[None, None, None]:
    """Settings are cached per process; tests that set DVP_* env vars need a fresh read"""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def sample_sequence() -> FrameSequence:
    """4 luma frames of 16x16"""
    return synthetic_sequence()


@pytest.fixture
def rgb_sequence() -> FrameSequence:
    """3 RGB frames of 8x8"""
    return synthetic_sequence(frames=3, height=8, width=8, channel_mode=ChannelMode.RGB)


@pytest.fixture
def tiny_net_config() -> NetworkConfig:
    """Two encoder stages of 4 and 8 channels; frame sides must divide 4"""
    return NetworkConfig(encoder_channels=[4, 8], seed=11)


@pytest.fixture
def tiny_train_config() -> TrainConfig:
    return TrainConfig(epochs=2, learning_rate=1e-2)


@pytest.fixture
def awgn_pair(sample_sequence) -> Tuple[FrameSequence, FrameSequence]:
    """(original, distorted) with AWGN sigma 0.1"""
    distorted = apply_distortion(sample_sequence, DistortionSpec(kind=DistortionKind.AWGN, severity=0.1, seed=5))
    return sample_sequence, distorted


@pytest.fixture(scope="session")
def trained_restorer() -> Tuple[NetworkWeights, LossTrace]:
    """Tiny restorer trained for 3 epochs; shared read-only across tests"""
    original = synthetic_sequence()
    distorted = apply_distortion(original, DistortionSpec(kind=DistortionKind.AWGN, severity=0.1, seed=5))
    return train_pair(
        original,
        distorted,
        NetworkConfig(encoder_channels=[4, 8], seed=11),
        TrainConfig(epochs=3, learning_rate=1e-2),
    )


@pytest.fixture
def png_video(tmp_path, sample_sequence) -> Path:
    """sample_sequence written as a PNG frame directory"""
    path = tmp_path / "clip_png"
    write_sequence(sample_sequence, path)
    return path


@pytest.fixture
def y4m_video(tmp_path, sample_sequence) -> Path:
    """sample_sequence written as a Y4M file"""
    path = tmp_path / "clip.y4m"
    write_sequence(sample_sequence, path)
    return path


@pytest.fixture
def client() -> Generator[TestClient, None, None]:
    """Test client for the HTTP surface"""
    with TestClient(app) as test_client:
        yield test_client


MANIFEST_MOS = {"v1": 4.5, "v2": 3.0, "v3": 1.5}


@pytest.fixture
def manifest_path(tmp_path) -> Path:
    """Train pair plus three test videos of decreasing quality, as PNG directories"""
    original = synthetic_sequence(frames=2, height=8, width=8)
    rungs = severity_ladder(original, DistortionKind.AWGN, [0.02, 0.05, 0.1, 0.2], base_seed=3)
    write_sequence(original, tmp_path / "orig")
    write_sequence(rungs[2], tmp_path / "dist")
    for video_id, rung in zip(MANIFEST_MOS, [rungs[0], rungs[1], rungs[3]]):
        write_sequence(rung, tmp_path / video_id)

    lines = ["video_id,path,mos,role,pair_path", "pair,orig,,train,dist"]
    lines += [f"{video_id},{video_id},{mos},test," for video_id, mos in MANIFEST_MOS.items()]
    path = tmp_path / "manifest.csv"
    path.write_text("\n".join(lines) + "\n")
    return path
