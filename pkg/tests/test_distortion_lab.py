"""
Unit tests for synthetic distortions and severity ladders.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from app.exceptions import ConfigurationError
from app.models.video import FrameSequence
from app.schemas.distortion import DistortionKind, DistortionSpec
from app.services.distortion_lab import apply_distortion, severity_ladder


def _mse(a: FrameSequence, b: FrameSequence) -> float:
    return float(np.mean((a.stacked() - b.stacked()) ** 2))


@pytest.mark.unit
class TestDistortionSpec:
    """Test the text form and validation of DistortionSpec"""

    def test_text_form(self):
        """Test kind,severity,seed text"""
        spec = DistortionSpec(kind=DistortionKind.AWGN, severity=0.05, seed=3)
        assert spec.to_text() == "awgn,0.05,3"
        assert DistortionSpec.from_text("awgn, 0.05, 3") == spec

    def test_seed_defaults_to_zero(self):
        """Test the seed may be omitted in text"""
        assert DistortionSpec.from_text("gaussian_blur,1.5").seed == 0

    @pytest.mark.parametrize("text", ["awgn", "fog,1.0", "awgn,x", "awgn,-0.1", "awgn,0.1,2,9"])
    def test_bad_text(self, text):
        """Test malformed specs are configuration errors"""
        with pytest.raises(ConfigurationError):
            DistortionSpec.from_text(text)

    def test_negative_severity(self):
        """Test severity must be >= 0"""
        with pytest.raises(ValidationError):
            DistortionSpec(kind=DistortionKind.AWGN, severity=-0.1)


@pytest.mark.unit
class TestApplyDistortion:
    """Test each distortion family"""

    @pytest.mark.parametrize("kind", list(DistortionKind))
    def test_zero_severity_is_identity(self, sample_sequence, kind):
        """Test severity 0 returns an equal copy"""
        out = apply_distortion(sample_sequence, DistortionSpec(kind=kind, severity=0.0))

        np.testing.assert_array_equal(out.stacked(), sample_sequence.stacked())
        assert out.frames[0] is not sample_sequence.frames[0]

    def test_awgn_is_seeded(self, sample_sequence):
        """Test same seed gives the same noise, another seed different noise"""
        spec = DistortionSpec(kind=DistortionKind.AWGN, severity=0.1, seed=9)
        first = apply_distortion(sample_sequence, spec)
        second = apply_distortion(sample_sequence, spec)
        other = apply_distortion(sample_sequence, spec.model_copy(update={"seed": 10}))

        np.testing.assert_array_equal(first.stacked(), second.stacked())
        assert not np.array_equal(first.stacked(), other.stacked())

    def test_awgn_frames_get_distinct_noise(self, sample_sequence):
        """Test each frame draws its own noise"""
        still = sample_sequence.with_frames([sample_sequence.frames[0]] * 2)
        out = apply_distortion(still, DistortionSpec(kind=DistortionKind.AWGN, severity=0.1, seed=1))
        assert not np.array_equal(out.frames[0], out.frames[1])

    def test_awgn_variance_matches_sigma(self):
        """Test sigma 0.1 on flat grey gives sample variance within 10% of 0.01"""
        flat = FrameSequence(frames=[np.full((1, 1, 64, 64), 0.5) for _ in range(8)])
        out = apply_distortion(flat, DistortionSpec(kind=DistortionKind.AWGN, severity=0.1, seed=4))

        assert out.stacked().var() == pytest.approx(0.01, rel=0.1)

    def test_output_stays_in_range(self, sample_sequence):
        """Test heavy noise is clipped to [0, 1]"""
        out = apply_distortion(sample_sequence, DistortionSpec(kind=DistortionKind.AWGN, severity=2.0))
        assert out.stacked().min() >= 0.0
        assert out.stacked().max() <= 1.0

    def test_blur_keeps_constant_frames(self):
        """Test a flat frame is a fixed point of the normalised kernel"""
        flat = FrameSequence(frames=[np.full((1, 1, 8, 8), 0.3)])
        out = apply_distortion(flat, DistortionSpec(kind=DistortionKind.GAUSSIAN_BLUR, severity=1.5))
        np.testing.assert_allclose(out.frames[0], 0.3)

    def test_blur_smooths(self, sample_sequence):
        """Test blurring lowers frame variance"""
        out = apply_distortion(sample_sequence, DistortionSpec(kind=DistortionKind.GAUSSIAN_BLUR, severity=2.0))
        assert out.stacked().var() < sample_sequence.stacked().var()

    def test_coarse_quantization_flattens_blocks(self, sample_sequence):
        """Test a step above twice the deviation leaves each 8x8 block at its mean"""
        out = apply_distortion(sample_sequence, DistortionSpec(kind=DistortionKind.BLOCK_QUANTIZE, severity=2.0))
        frame, source = out.frames[0][0, 0], sample_sequence.frames[0][0, 0]
        for top in (0, 8):
            for left in (0, 8):
                block = frame[top:top + 8, left:left + 8]
                np.testing.assert_allclose(block, source[top:top + 8, left:left + 8].mean())

    def test_fine_quantization_is_close(self, sample_sequence):
        """Test a small step moves samples by at most half a step"""
        step = 0.02
        out = apply_distortion(sample_sequence, DistortionSpec(kind=DistortionKind.BLOCK_QUANTIZE, severity=step))
        assert np.max(np.abs(out.stacked() - sample_sequence.stacked())) <= step / 2 + 1e-12


@pytest.mark.unit
class TestSeverityLadder:
    """Test ladders of increasing severity"""

    def test_rung_seeds(self, sample_sequence):
        """Test rung i uses seed base_seed + i"""
        ladder = severity_ladder(sample_sequence, DistortionKind.AWGN, [0.02, 0.05], base_seed=40)
        expected = apply_distortion(sample_sequence, DistortionSpec(kind=DistortionKind.AWGN, severity=0.05, seed=41))
        np.testing.assert_array_equal(ladder[1].stacked(), expected.stacked())

    def test_awgn_mse_increases(self, sample_sequence):
        """Test MSE against the source grows along the ladder"""
        severities = [0.0, 0.02, 0.05, 0.1, 0.2]
        ladder = severity_ladder(sample_sequence, DistortionKind.AWGN, severities, base_seed=7)
        errors = [_mse(rung, sample_sequence) for rung in ladder]
        assert errors[0] == 0.0
        assert all(b > a for a, b in zip(errors, errors[1:]))

    @pytest.mark.parametrize("severities", [[0.1, 0.05], [0.1, 0.1]])
    def test_non_increasing_severities(self, sample_sequence, severities):
        """Test severities must be strictly increasing"""
        with pytest.raises(ConfigurationError):
            severity_ladder(sample_sequence, DistortionKind.AWGN, severities)
