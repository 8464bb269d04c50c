"""
Unit tests for frame sequences and video readers/writers.

PNG directories, Y4M files and raw planar 4:2:0 are written from synthetic
sequences and read back; quantisation to 8 bits bounds the error at half a
code value.
"""

import numpy as np
import pytest
from PIL import Image

from app.exceptions import ConfigurationError, DimensionError, FormatError, SequenceSizeError
from app.models.video import ChannelMode, FrameSequence, VideoFormat
from app.services.video_io import (
    crop_to_size,
    guess_format,
    pad_to_divisible,
    read_sequence,
    write_sequence,
)
from tests.conftest import synthetic_sequence

HALF_CODE = 0.5 / 255 + 1e-12


def _y4m_bytes(width, height, layout, frames):
    """Y4M file with the given luma planes and mid-grey chroma"""
    header = f"YUV4MPEG2 W{width} H{height} F30:1 Ip A0:0 C{layout}\n".encode("ascii")
    if layout == "mono":
        chroma = b""
    elif layout == "444":
        chroma = bytes([128]) * (2 * width * height)
    else:
        chroma = bytes([128]) * (2 * ((width + 1) // 2) * ((height + 1) // 2))
    return header + b"".join(b"FRAME\n" + plane.astype(np.uint8).tobytes() + chroma for plane in frames)


@pytest.mark.unit
class TestFrameSequence:
    """Test FrameSequence invariants"""

    def test_empty_sequence(self):
        """Test a sequence needs a frame"""
        with pytest.raises(FormatError):
            FrameSequence(frames=[])

    def test_out_of_range_values(self):
        """Test intensities must lie in [0, 1]"""
        with pytest.raises(FormatError):
            FrameSequence(frames=[np.full((1, 1, 2, 2), 1.5)])

    def test_mixed_shapes(self):
        """Test all frames share one shape"""
        with pytest.raises(DimensionError):
            FrameSequence(frames=[np.zeros((1, 1, 2, 2)), np.zeros((1, 1, 2, 3))])

    def test_channel_mode_mismatch(self):
        """Test luma sequences carry one channel"""
        with pytest.raises(DimensionError):
            FrameSequence(frames=[np.zeros((1, 3, 2, 2))], channel_mode=ChannelMode.LUMA)

    def test_stacked(self, sample_sequence):
        """Test frames stack along the batch axis"""
        assert sample_sequence.stacked().shape == (4, 1, 16, 16)


@pytest.mark.unit
class TestPngDirectory:
    """Test PNG frame directories"""

    def test_roundtrip_luma(self, png_video, sample_sequence):
        """Test frames come back within half a code value"""
        loaded = read_sequence(png_video)

        assert loaded.frame_count == sample_sequence.frame_count
        assert (png_video / "frame_000000.png").exists()
        for a, b in zip(loaded.frames, sample_sequence.frames):
            assert np.max(np.abs(a - b)) <= HALF_CODE

    def test_roundtrip_rgb(self, tmp_path, rgb_sequence):
        """Test RGB frames keep three channels"""
        path = tmp_path / "rgb"
        write_sequence(rgb_sequence, path)
        loaded = read_sequence(path, channel_mode=ChannelMode.RGB)

        assert loaded.shape == (1, 3, 8, 8)
        assert np.max(np.abs(loaded.stacked() - rgb_sequence.stacked())) <= HALF_CODE

    def test_rewrite_drops_stale_frames(self, png_video, sample_sequence):
        """Test writing a shorter sequence over an existing directory leaves no extra frames"""
        shorter = sample_sequence.with_frames(sample_sequence.frames[:2])
        write_sequence(shorter, png_video)

        loaded = read_sequence(png_video)
        assert loaded.frame_count == 2
        assert sorted(p.name for p in png_video.glob("*.png")) == ["frame_000000.png", "frame_000001.png"]
        for a, b in zip(loaded.frames, shorter.frames):
            assert np.max(np.abs(a - b)) <= HALF_CODE

    def test_frame_size_mismatch_names_file(self, png_video):
        """Test a frame of another size is reported by name"""
        Image.fromarray(np.zeros((8, 8), dtype=np.uint8)).save(png_video / "frame_000099.png")
        with pytest.raises(FormatError, match="frame_000099.png"):
            read_sequence(png_video)

    def test_empty_directory(self, tmp_path):
        """Test a directory without frames"""
        (tmp_path / "empty").mkdir()
        with pytest.raises(FormatError):
            read_sequence(tmp_path / "empty")

    def test_missing_path(self, tmp_path):
        """Test a missing video is an OS error"""
        with pytest.raises(FileNotFoundError):
            read_sequence(tmp_path / "nowhere")


@pytest.mark.unit
class TestY4M:
    """Test Y4M reading and writing"""

    def test_roundtrip(self, y4m_video, sample_sequence):
        """Test the luma plane survives within half a code value"""
        loaded = read_sequence(y4m_video)

        assert y4m_video.read_bytes().startswith(b"YUV4MPEG2 W16 H16")
        assert loaded.frame_count == 4
        assert np.max(np.abs(loaded.stacked() - sample_sequence.stacked())) <= HALF_CODE

    @pytest.mark.parametrize("layout", ["420jpeg", "420mpeg2", "444", "mono"])
    def test_chroma_layouts(self, tmp_path, layout):
        """Test every supported layout yields the Y plane"""
        planes = [np.full((6, 10), 51), np.full((6, 10), 204)]
        path = tmp_path / f"{layout}.y4m"
        path.write_bytes(_y4m_bytes(10, 6, layout, planes))

        loaded = read_sequence(path)

        assert loaded.shape == (1, 1, 6, 10)
        np.testing.assert_allclose(loaded.frames[0], 0.2)
        np.testing.assert_allclose(loaded.frames[1], 0.8)

    def test_unsupported_layout(self, tmp_path):
        """Test 4:2:2 is reported as unsupported"""
        path = tmp_path / "c422.y4m"
        path.write_bytes(_y4m_bytes(4, 4, "422", []) + b"FRAME\n" + bytes(32))
        with pytest.raises(FormatError, match="C422"):
            read_sequence(path)

    def test_truncated_frame(self, tmp_path):
        """Test a short final frame reports expected and actual sizes"""
        path = tmp_path / "short.y4m"
        path.write_bytes(_y4m_bytes(4, 4, "420jpeg", [np.zeros((4, 4))])[:-3])
        with pytest.raises(SequenceSizeError) as excinfo:
            read_sequence(path)
        assert excinfo.value.frame_size == 24
        assert excinfo.value.actual == 21

    def test_missing_signature(self, tmp_path):
        """Test a file without the YUV4MPEG2 signature"""
        path = tmp_path / "bad.y4m"
        path.write_bytes(b"NOTY4M W4 H4\n")
        with pytest.raises(FormatError):
            read_sequence(path)

    def test_rgb_read_rejected(self, y4m_video):
        """Test YUV sources are luma only"""
        with pytest.raises(FormatError):
            read_sequence(y4m_video, channel_mode=ChannelMode.RGB)

    def test_rgb_write_rejected(self, tmp_path, rgb_sequence):
        """Test RGB sequences cannot be written as YUV"""
        with pytest.raises(FormatError):
            write_sequence(rgb_sequence, tmp_path / "rgb.y4m")


@pytest.mark.unit
class TestRawYuv:
    """Test headerless planar 4:2:0"""

    def test_roundtrip(self, tmp_path, sample_sequence):
        """Test raw frames read back with an explicit size"""
        path = tmp_path / "clip.yuv"
        write_sequence(sample_sequence, path)

        assert path.stat().st_size == 4 * (256 + 128)
        loaded = read_sequence(path, size=(16, 16))
        assert np.max(np.abs(loaded.stacked() - sample_sequence.stacked())) <= HALF_CODE

    def test_cif_frame_count(self, tmp_path):
        """Test two CIF frames (2 x 152064 bytes at 352x288) read as T=2"""
        path = tmp_path / "cif.yuv"
        path.write_bytes(bytes(2 * 152064))

        loaded = read_sequence(path, size=(288, 352))
        assert loaded.frame_count == 2
        assert loaded.shape == (1, 1, 288, 352)

    def test_size_required(self, tmp_path, sample_sequence):
        """Test raw input without a frame size"""
        path = tmp_path / "clip.yuv"
        write_sequence(sample_sequence, path)
        with pytest.raises(ConfigurationError):
            read_sequence(path)

    def test_size_not_multiple_of_frame(self, tmp_path):
        """Test a byte count that is not whole frames"""
        path = tmp_path / "odd.yuv"
        path.write_bytes(bytes(100))
        with pytest.raises(SequenceSizeError) as excinfo:
            read_sequence(path, size=(4, 4))
        assert excinfo.value.expected == 120
        assert excinfo.value.actual == 100


@pytest.mark.unit
class TestGeometry:
    """Test format guessing, padding and cropping"""

    @pytest.mark.parametrize(
        "name, expected",
        [("frames", VideoFormat.PNG_DIR), ("a.y4m", VideoFormat.Y4M), ("a.YUV", VideoFormat.RAW_YUV)],
    )
    def test_guess_format(self, tmp_path, name, expected):
        """Test formats are inferred from the path"""
        assert guess_format(tmp_path / name) is expected

    def test_guess_unknown_suffix(self, tmp_path):
        """Test an unknown suffix"""
        with pytest.raises(FormatError):
            guess_format(tmp_path / "clip.mp4")

    def test_pad_replicates_edges(self):
        """Test padding to a multiple of 4 copies the last row and column"""
        seq = synthetic_sequence(frames=2, height=10, width=14)
        padded, size = pad_to_divisible(seq, 4)

        assert size == (10, 14)
        assert padded.shape == (1, 1, 12, 16)
        np.testing.assert_array_equal(padded.frames[0][:, :, 11, :14], seq.frames[0][:, :, 9, :])
        np.testing.assert_array_equal(padded.frames[0][:, :, :10, 15], seq.frames[0][:, :, :, 13])

    def test_crop_inverts_pad(self):
        """Test crop_to_size restores the original frames"""
        seq = synthetic_sequence(frames=2, height=10, width=14)
        padded, size = pad_to_divisible(seq, 8)
        cropped = crop_to_size(padded, size)
        np.testing.assert_array_equal(cropped.stacked(), seq.stacked())

    def test_divisible_sequence_untouched(self, sample_sequence):
        """Test no padding when sides already divide"""
        padded, _ = pad_to_divisible(sample_sequence, 8)
        assert padded is sample_sequence

    def test_bad_factor(self, sample_sequence):
        """Test factor < 1"""
        with pytest.raises(ConfigurationError):
            pad_to_divisible(sample_sequence, 0)

    def test_crop_larger_than_frame(self, sample_sequence):
        """Test cropping cannot grow frames"""
        with pytest.raises(ConfigurationError):
            crop_to_size(sample_sequence, (32, 16))
