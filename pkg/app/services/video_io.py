import logging
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from PIL import Image

from app.exceptions import ConfigurationError, FormatError, SequenceSizeError
from app.models.video import ChannelMode, FrameSequence, VideoFormat

logger = logging.getLogger(__name__)

FRAME_PATTERN = "frame_{:06d}.png"
Y4M_SIGNATURE = b"YUV4MPEG2"
Y4M_FRAME_TAG = b"FRAME"
NEUTRAL_CHROMA = 128


def guess_format(path: Path) -> VideoFormat:
    path = Path(path)
    if path.is_dir() or path.suffix == "":
        return VideoFormat.PNG_DIR
    if path.suffix.lower() == ".y4m":
        return VideoFormat.Y4M
    if path.suffix.lower() == ".yuv":
        return VideoFormat.RAW_YUV
    raise FormatError(f"Cannot infer the video format of {path}; expected a directory, .y4m or .yuv")


def _normalize(samples: np.ndarray) -> np.ndarray:
    return samples.astype(np.float64) / 255.0


def _quantize(frame: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(frame * 255.0), 0, 255).astype(np.uint8)


def _chroma_size(width: int, height: int, layout: str) -> Tuple[int, int]:
    if layout in ("420", "420jpeg", "420paldv", "420mpeg2"):
        return (width + 1) // 2, (height + 1) // 2
    if layout == "444":
        return width, height
    if layout == "mono":
        return 0, 0
    raise FormatError(f"Unsupported chroma layout C{layout}; 8-bit 420, 444 and mono are supported")


def _planar_frame_bytes(width: int, height: int, layout: str) -> int:
    cw, ch = _chroma_size(width, height, layout)
    return width * height + 2 * cw * ch


# -- readers ---------------------------------------------------------------

def _read_png_dir(path: Path, channel_mode: ChannelMode) -> List[np.ndarray]:
    files = sorted(path.glob("*.png"))
    if not files:
        raise FormatError(f"No .png frames found in {path}")
    pil_mode = "L" if channel_mode is ChannelMode.LUMA else "RGB"
    frames, first_size = [], None
    for file in files:
        with Image.open(file) as image:
            if first_size is None:
                first_size = image.size
            elif image.size != first_size:
                raise FormatError(
                    f"{file.name} is {image.size[0]}x{image.size[1]}, "
                    f"earlier frames are {first_size[0]}x{first_size[1]}"
                )
            samples = np.asarray(image.convert(pil_mode))
        if samples.ndim == 2:
            samples = samples[None, :, :]
        else:
            samples = samples.transpose(2, 0, 1)
        frames.append(_normalize(samples)[None])
    return frames


def _split_planar(data: bytes, width: int, height: int, layout: str, source: str) -> List[np.ndarray]:
    frame_bytes = _planar_frame_bytes(width, height, layout)
    if len(data) == 0 or len(data) % frame_bytes:
        raise SequenceSizeError(source, frame_bytes, len(data))
    samples = np.frombuffer(data, dtype=np.uint8).reshape(-1, frame_bytes)
    luma = samples[:, : width * height].reshape(-1, 1, height, width)
    return [_normalize(plane)[None] for plane in luma]


def _parse_y4m_header(line: bytes, source: str) -> Tuple[int, int, str]:
    tokens = line.split()
    if not tokens or tokens[0] != Y4M_SIGNATURE:
        raise FormatError(f"{source}: missing {Y4M_SIGNATURE.decode()} signature")
    width = height = None
    layout = "420jpeg"
    for token in tokens[1:]:
        key, value = token[:1], token[1:].decode("ascii")
        if key == b"W":
            width = int(value)
        elif key == b"H":
            height = int(value)
        elif key == b"C":
            layout = value
    if width is None or height is None:
        raise FormatError(f"{source}: Y4M header lacks W/H")
    return width, height, layout


def _read_y4m(path: Path) -> List[np.ndarray]:
    data = path.read_bytes()
    header_end = data.find(b"\n")
    if header_end < 0:
        raise FormatError(f"{path}: no Y4M header line")
    width, height, layout = _parse_y4m_header(data[:header_end], str(path))
    frame_bytes = _planar_frame_bytes(width, height, layout)

    frames, cursor = [], header_end + 1
    while cursor < len(data):
        if data[cursor:cursor + len(Y4M_FRAME_TAG)] != Y4M_FRAME_TAG:
            raise FormatError(f"{path}: expected FRAME marker at byte {cursor}")
        line_end = data.find(b"\n", cursor)
        if line_end < 0:
            raise FormatError(f"{path}: unterminated FRAME header at byte {cursor}")
        cursor = line_end + 1
        payload = data[cursor:cursor + frame_bytes]
        if len(payload) != frame_bytes:
            raise SequenceSizeError(str(path), frame_bytes, len(payload))
        luma = np.frombuffer(payload, dtype=np.uint8, count=width * height).reshape(1, 1, height, width)
        frames.append(_normalize(luma))
        cursor += frame_bytes
    if not frames:
        raise FormatError(f"{path}: no frames")
    return frames


def read_sequence(
    path: Path,
    format: Optional[VideoFormat] = None,
    channel_mode: ChannelMode = ChannelMode.LUMA,
    size: Optional[Tuple[int, int]] = None,
) -> FrameSequence:
    """
    Load a video as a FrameSequence with samples mapped to [0, 1] by v / 255.

    ``size`` is ``(height, width)`` and is required for raw planar 4:2:0 input.
    YUV sources are read in luma mode only.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Video not found: {path}")
    format = VideoFormat(format) if format is not None else guess_format(path)

    if format is VideoFormat.PNG_DIR:
        frames = _read_png_dir(path, channel_mode)
    else:
        if channel_mode is not ChannelMode.LUMA:
            raise FormatError(f"{format.value} input is read in luma mode only (Y plane)")
        if format is VideoFormat.Y4M:
            frames = _read_y4m(path)
        else:
            if size is None:
                raise ConfigurationError("raw_yuv input needs its frame size (height, width)")
            height, width = size
            frames = _split_planar(path.read_bytes(), width, height, "420", str(path))

    sequence = FrameSequence(frames=frames, channel_mode=channel_mode)
    logger.debug("Read %d frames of %dx%d from %s", sequence.frame_count, sequence.width, sequence.height, path)
    return sequence


# -- writers ---------------------------------------------------------------

def _planar_bytes(frame: np.ndarray) -> bytes:
    _, _, height, width = frame.shape
    cw, ch = _chroma_size(width, height, "420")
    chroma = np.full(2 * cw * ch, NEUTRAL_CHROMA, dtype=np.uint8)
    return _quantize(frame[0, 0]).tobytes() + chroma.tobytes()


def write_sequence(seq: FrameSequence, path: Path, format: Optional[VideoFormat] = None) -> None:
    """Write 8-bit samples (round to nearest); YUV outputs carry neutral chroma"""
    path = Path(path)
    format = VideoFormat(format) if format is not None else guess_format(path)

    if format is VideoFormat.PNG_DIR:
        path.mkdir(parents=True, exist_ok=True)
        stale = sorted(path.glob("*.png"))
        for old in stale:
            old.unlink()
        if stale:
            logger.debug("Removed %d existing frames from %s", len(stale), path)
        for index, frame in enumerate(seq.frames):
            samples = _quantize(frame[0])
            image = Image.fromarray(samples[0] if samples.shape[0] == 1 else samples.transpose(1, 2, 0))
            image.save(path / FRAME_PATTERN.format(index))
    else:
        if seq.channel_mode is not ChannelMode.LUMA:
            raise FormatError(f"{format.value} output is written from luma sequences only")
        if format is VideoFormat.Y4M:
            header = f"YUV4MPEG2 W{seq.width} H{seq.height} F25:1 Ip A1:1 C420jpeg\n".encode("ascii")
            body = header + b"".join(Y4M_FRAME_TAG + b"\n" + _planar_bytes(frame) for frame in seq.frames)
        else:
            body = b"".join(_planar_bytes(frame) for frame in seq.frames)
        path.write_bytes(body)
    logger.debug("Wrote %d frames to %s (%s)", seq.frame_count, path, format.value)


# -- geometry --------------------------------------------------------------

def pad_to_divisible(seq: FrameSequence, factor: int) -> Tuple[FrameSequence, Tuple[int, int]]:
    """Edge-replicate to the next multiple of ``factor``; returns the padded sequence and the original (h, w)"""
    if factor < 1:
        raise ConfigurationError(f"pad factor must be >= 1, got {factor}")
    height, width = seq.height, seq.width
    pad_h = -height % factor
    pad_w = -width % factor
    if not pad_h and not pad_w:
        return seq, (height, width)
    frames = [np.pad(frame, ((0, 0), (0, 0), (0, pad_h), (0, pad_w)), mode="edge") for frame in seq.frames]
    return seq.with_frames(frames), (height, width)


def crop_to_size(seq: FrameSequence, size: Tuple[int, int]) -> FrameSequence:
    height, width = size
    if height > seq.height or width > seq.width:
        raise ConfigurationError(f"Cannot crop {seq.height}x{seq.width} frames to {height}x{width}")
    return seq.with_frames([frame[:, :, :height, :width] for frame in seq.frames])
