import logging
import math
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from pydantic import ValidationError
from scipy import stats

from app.exceptions import DegenerateVarianceError, DimensionError, ManifestError
from app.models.network import NetworkWeights
from app.models.video import ChannelMode, FrameSequence
from app.schemas.evaluation import CorrelationReport, CorrelationRow, ManifestEntry, ManifestRole
from app.schemas.network import NetworkConfig
from app.schemas.quality import QualityScore
from app.schemas.training import LossTrace, TrainConfig
from .scoring import score_video
from .trainer import train_pair
from .video_io import read_sequence

logger = logging.getLogger(__name__)

MANIFEST_COLUMNS = ["video_id", "path", "mos", "role"]

Trainer = Callable[[FrameSequence, FrameSequence, NetworkConfig, TrainConfig], Tuple[NetworkWeights, LossTrace]]
Scorer = Callable[..., QualityScore]


def _as_vector(values: Sequence[float], name: str) -> np.ndarray:
    vector = np.asarray(values, dtype=np.float64)
    if vector.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional, got shape {vector.shape}")
    return vector


def pearson_lcc(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation; a constant input is an error, not 0"""
    x, y = _as_vector(x, "x"), _as_vector(y, "y")
    if x.size != y.size or x.size < 2:
        raise DimensionError(f"pearson_lcc needs two equal-length vectors of length >= 2, got {x.size} and {y.size}")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise DegenerateVarianceError("pearson_lcc is undefined for a constant vector")
    r = stats.pearsonr(x, y).statistic
    return float(np.clip(r, -1.0, 1.0))


def spearman_srocc(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of average (fractional) ranks"""
    x, y = _as_vector(x, "x"), _as_vector(y, "y")
    if x.size != y.size or x.size < 2:
        raise DimensionError(f"spearman_srocc needs two equal-length vectors of length >= 2, got {x.size} and {y.size}")
    return pearson_lcc(stats.rankdata(x, method="average"), stats.rankdata(y, method="average"))


def read_manifest(path: Path) -> List[ManifestEntry]:
    """
    Manifest CSV: ``video_id,path,mos,role[,pair_path]``. Relative paths are
    resolved against the manifest's directory.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Manifest not found: {path}")
    frame = pd.read_csv(path, dtype={"video_id": str, "path": str, "role": str}, skipinitialspace=True)
    missing = [column for column in MANIFEST_COLUMNS if column not in frame.columns]
    if missing:
        raise ManifestError(f"{path}: missing columns {missing}")

    base = path.parent
    entries = []
    for row_number, row in enumerate(frame.to_dict(orient="records"), start=2):
        record = {key: (None if isinstance(value, float) and math.isnan(value) else value) for key, value in row.items()}
        for key in ("path", "pair_path"):
            if record.get(key):
                location = Path(str(record[key]))
                record[key] = str(location if location.is_absolute() else base / location)
        try:
            entries.append(ManifestEntry(**record))
        except ValidationError as exc:
            raise ManifestError(f"{path}, line {row_number}: {exc}") from exc
    return entries


def _split_manifest(entries: Sequence[ManifestEntry]) -> Tuple[ManifestEntry, List[ManifestEntry]]:
    train = [entry for entry in entries if entry.role is ManifestRole.TRAIN]
    test = [entry for entry in entries if entry.role is ManifestRole.TEST]
    if len(train) != 1:
        raise ManifestError(f"Manifest needs exactly one train row (original + pair_path), found {len(train)}")
    if len(test) < 2:
        raise ManifestError(f"Manifest needs at least 2 test rows, found {len(test)}")
    for entry in [train[0].path, train[0].pair_path] + [entry.path for entry in test]:
        if not Path(entry).exists():
            raise FileNotFoundError(f"Manifest references a missing video: {entry}")
    return train[0], test


def evaluate_manifest(
    manifest: Sequence[ManifestEntry] | Path,
    net_cfg: NetworkConfig,
    train_cfg: TrainConfig,
    channel_mode: ChannelMode = ChannelMode.LUMA,
    size: Optional[Tuple[int, int]] = None,
    threads: int = 1,
    trainer: Optional[Trainer] = None,
    scorer: Optional[Scorer] = None,
) -> CorrelationReport:
    """
    Train once on the manifest's train pair, score every test video and
    correlate the scores with MOS. Any failing video aborts the whole run.
    """
    entries = read_manifest(manifest) if isinstance(manifest, (str, Path)) else list(manifest)
    train_entry, test_entries = _split_manifest(entries)
    trainer = trainer or train_pair
    scorer = scorer or score_video

    original = read_sequence(Path(train_entry.path), channel_mode=channel_mode, size=size)
    distorted = read_sequence(Path(train_entry.pair_path), channel_mode=channel_mode, size=size)
    logger.info("Training on pair '%s' (%d frames)", train_entry.video_id, original.frame_count)
    restorer, trace = trainer(original, distorted, net_cfg, train_cfg)
    logger.info("Training finished, final-epoch mean loss %.6f", trace.final_epoch_mean())

    def _score(entry: ManifestEntry) -> QualityScore:
        video = read_sequence(Path(entry.path), channel_mode=channel_mode, size=size)
        return scorer(restorer, video, video_id=entry.video_id)

    # Scores come back in manifest order regardless of thread count.
    scores = Parallel(n_jobs=threads, backend="threading")(delayed(_score)(entry) for entry in test_entries)

    predicted = [score.score for score in scores]
    mos = [entry.mos for entry in test_entries]
    report = CorrelationReport(
        lcc=pearson_lcc(predicted, mos),
        srocc=spearman_srocc(predicted, mos),
        n=len(test_entries),
        rows=[
            CorrelationRow(video_id=entry.video_id, predicted=value, mos=entry.mos)
            for entry, value in zip(test_entries, predicted)
        ],
    )
    logger.info(
        "n=%d lcc=%.4f srocc=%.4f |lcc|=%.4f |srocc|=%.4f",
        report.n, report.lcc, report.srocc, abs(report.lcc), abs(report.srocc),
    )
    return report


def write_report(report: CorrelationReport, path: Path) -> None:
    """Per-video table followed by a blank line and the summary row"""
    path = Path(path)
    with path.open("w", newline="") as handle:
        report.to_frame().to_csv(handle, index=False)
        handle.write("\n")
        report.summary_frame().to_csv(handle, index=False)
