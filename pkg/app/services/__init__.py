from .distortion_lab import apply_distortion, severity_ladder
from .evaluation import evaluate_manifest, pearson_lcc, read_manifest, spearman_srocc, write_report
from .gradcheck import run_gradient_suite
from .prior_net import build_network, extract_features, restore_frame
from .scoring import psnr, restore_sequence, score_video
from .trainer import PairTrainer, perceptual_loss, train_pair
from .video_io import read_sequence, write_sequence
from .weights_io import load_weights, save_weights

__all__ = [
    "apply_distortion",
    "severity_ladder",
    "evaluate_manifest",
    "pearson_lcc",
    "read_manifest",
    "spearman_srocc",
    "write_report",
    "run_gradient_suite",
    "build_network",
    "extract_features",
    "restore_frame",
    "psnr",
    "restore_sequence",
    "score_video",
    "PairTrainer",
    "perceptual_loss",
    "train_pair",
    "read_sequence",
    "write_sequence",
    "load_weights",
    "save_weights",
]
