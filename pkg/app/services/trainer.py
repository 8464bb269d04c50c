import logging
import math
from typing import Optional, Sequence, Tuple

from app.exceptions import ConfigurationError, DimensionError, DivergenceError, PairingError
from app.models.network import FeatureStack, NetworkRole, NetworkWeights
from app.models.tensor import Tensor
from app.models.video import FrameSequence
from app.schemas.network import NetworkConfig
from app.schemas.training import LossTrace, TrainConfig
from .ops import as_frame_tensor, l1_mean, weighted_sum
from .optimizer import OptimizerState, adam_step
from .prior_net import build_network, extract_features, restore_frame
from .video_io import pad_to_divisible

logger = logging.getLogger(__name__)


def perceptual_loss(
    restored: Tensor,
    original: Tensor,
    f: NetworkWeights,
    weights: Sequence[float],
    original_features: Optional[FeatureStack] = None,
) -> Tensor:
    """
    sum_{k=0..L} w_k * l1_mean(F_k(restored), F_k(original)), with F_0 the
    identity (pixel term) and F_1..F_L the frozen extractor's stages.

    ``original_features`` may be passed in when the original frame's stack
    has already been computed.
    """
    if restored.shape != original.shape:
        raise DimensionError(f"perceptual_loss shapes differ: {restored.shape} vs {original.shape}")
    if not f.frozen:
        raise ConfigurationError("perceptual_loss needs the frozen feature extractor")
    stages = len(f.layers)
    if len(weights) != stages + 1:
        raise ConfigurationError(f"Expected {stages + 1} loss weights, got {len(weights)}")

    terms, used = [], []
    if weights[0] > 0:
        terms.append(l1_mean(restored, original))
        used.append(weights[0])
    if any(w > 0 for w in weights[1:]):
        restored_stack = extract_features(f, restored)
        original_stack = original_features if original_features is not None else extract_features(f, original)
        for k in range(1, stages + 1):
            if weights[k] > 0:
                terms.append(l1_mean(restored_stack[k - 1], original_stack[k - 1]))
                used.append(weights[k])
    return weighted_sum(terms, used)


def _check_pair(original: FrameSequence, distorted: FrameSequence) -> None:
    if original.frame_count != distorted.frame_count:
        raise PairingError(
            f"Original has {original.frame_count} frames, distorted has {distorted.frame_count}"
        )
    if original.shape != distorted.shape:
        raise PairingError(f"Frame shapes differ: original {original.shape}, distorted {distorted.shape}")


class PairTrainer:
    """
    Fits the restorer G on one (original, distorted) pair.

    Each epoch visits frames t = 1..T in order and takes one Adam step per
    frame on perceptual_loss(G(D_t), O_t). The extractor F is built once and
    never updated.
    """

    def __init__(self, net_cfg: NetworkConfig, train_cfg: TrainConfig):
        self.net_cfg = net_cfg
        self.train_cfg = train_cfg
        if train_cfg.seed is not None:
            self.net_cfg = net_cfg.model_copy(update={"seed": train_cfg.seed})
        self.layer_weights = train_cfg.layer_weights_for(self.net_cfg.stages)
        logger.debug("Initialized PairTrainer with %s / %s", self.net_cfg, train_cfg)

    def train(self, original: FrameSequence, distorted: FrameSequence) -> Tuple[NetworkWeights, LossTrace]:
        _check_pair(original, distorted)
        factor = self.net_cfg.downsample_factor
        original, _ = pad_to_divisible(original, factor)
        distorted, _ = pad_to_divisible(distorted, factor)

        restorer = build_network(self.net_cfg, NetworkRole.RESTORER)
        extractor = build_network(self.net_cfg, NetworkRole.FEATURE_EXTRACTOR)
        params = restorer.parameters()
        state = OptimizerState.for_parameters(params, **self.train_cfg.optimizer_params())

        targets = [as_frame_tensor(frame) for frame in original.frames]
        inputs = [as_frame_tensor(frame) for frame in distorted.frames]
        target_stacks = [
            extract_features(extractor, target) if any(w > 0 for w in self.layer_weights[1:]) else None
            for target in targets
        ]

        trace = LossTrace()
        for epoch in range(1, self.train_cfg.epochs + 1):
            for t, (source, target, stack) in enumerate(zip(inputs, targets, target_stacks), start=1):
                restorer.zero_grad()
                loss = perceptual_loss(
                    restore_frame(restorer, source), target, extractor, self.layer_weights, stack
                )
                value = loss.item()
                if not math.isfinite(value):
                    raise DivergenceError(epoch, t, value)
                loss.backward()
                adam_step(params, state)
                trace.append(epoch, t, value)
                logger.debug("epoch %d frame %d loss %.6f", epoch, t, value)
            logger.info("Epoch %d/%d mean loss %.6f", epoch, self.train_cfg.epochs, trace.epoch_means()[epoch])

        return restorer, trace


def train_pair(
    original: FrameSequence,
    distorted: FrameSequence,
    net_cfg: NetworkConfig,
    train_cfg: TrainConfig,
) -> Tuple[NetworkWeights, LossTrace]:
    return PairTrainer(net_cfg, train_cfg).train(original, distorted)
