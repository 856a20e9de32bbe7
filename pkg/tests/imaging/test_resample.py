import numpy as np
import pytest

from lipres.errors import ResampleError, ShapeError
from lipres.geometry.shape import Shape
from lipres.imaging.image import Image, Resolution
from lipres.imaging.resample import (
    degrade,
    degrade_window,
    downsample_nearest,
    resolution_ladder,
    resting_lip_height,
    upsample_bilinear,
)


def _row(values: list) -> Image:
    return Image(np.array([values], dtype=np.float64))


def _random_cases(count: int, seed: int = 7):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        height, width = rng.integers(1, 9, size=2)
        img = Image(rng.random((height, width)))
        small = Resolution(int(rng.integers(1, width + 1)), int(rng.integers(1, height + 1)))
        yield img, small


class Tester:
    """Test Resolution Degradation."""

    def test_nearest_examples(self) -> None:
        """centre mapping with ties toward the lower index"""
        assert downsample_nearest(_row([0.2, 0.8]), Resolution(1, 1)).data.tolist() == [[0.2]]
        out = downsample_nearest(_row([1.0, 0.0, 1.0, 0.0]), Resolution(2, 1))
        assert out.data.tolist() == [[1.0, 1.0]]
        out = downsample_nearest(_row([0.0, 0.1, 0.2, 0.3, 0.4, 0.5]), Resolution(3, 1))
        assert out.data.tolist() == [[0.0, 0.2, 0.4]]

    def test_bilinear_examples(self) -> None:
        """hand evaluated bilinear samples"""
        out = upsample_bilinear(_row([0.0, 1.0]), Resolution(4, 1))
        assert out.data[0].tolist() == pytest.approx([0.0, 0.25, 0.75, 1.0])
        const = upsample_bilinear(_row([0.3]), Resolution(5, 4))
        assert np.all(const.data == 0.3)

    def test_wrong_direction(self) -> None:
        """each resampler refuses the other direction"""
        img = _row([0.0, 1.0])
        with pytest.raises(ResampleError):
            downsample_nearest(img, Resolution(3, 1))
        with pytest.raises(ResampleError):
            upsample_bilinear(img, Resolution(1, 1))
        with pytest.raises(ResampleError):
            degrade(img, Resolution(2, 2))

    def test_identity_properties(self) -> None:
        """same-size resampling and native degrade are exact"""
        for img, _ in _random_cases(1000):
            res = img.resolution
            assert np.array_equal(downsample_nearest(img, res).data, img.data)
            assert np.array_equal(upsample_bilinear(img, res).data, img.data)
            assert np.array_equal(degrade(img, res).data, img.data)

    def test_value_properties(self) -> None:
        """nearest picks source values, bilinear stays in range"""
        for img, small in _random_cases(1000, seed=11):
            down = downsample_nearest(img, small)
            assert np.isin(down.data, img.data).all()
            big = Resolution(img.width + 3, img.height + 2)
            up = upsample_bilinear(img, big)
            assert up.data.min() >= img.data.min()
            assert up.data.max() <= img.data.max()
            assert degrade(img, small).resolution == img.resolution

    def test_constant_degrade(self) -> None:
        """constants survive any target"""
        img = Image.constant(Resolution(16, 12), 0.42)
        for res in (Resolution(1, 1), Resolution(5, 3), Resolution(16, 12)):
            assert np.all(degrade(img, res).data == 0.42)

    def test_degrade_window(self) -> None:
        """window equals the crop of the full result"""
        rng = np.random.default_rng(3)
        img = Image(rng.random((30, 40)))
        full = degrade(img, Resolution(9, 7))
        window = degrade_window(img, Resolution(9, 7), (5, 4, 31, 22))
        assert np.array_equal(window, full.data[4:22, 5:31])
        native = degrade_window(img, img.resolution, (5, 4, 31, 22))
        assert np.array_equal(native, degrade(img, img.resolution).data[4:22, 5:31])
        with pytest.raises(ResampleError):
            degrade_window(img, Resolution(9, 7), (0, 0, 41, 5))

    def test_ladder(self) -> None:
        """the 18 ladder resolutions"""
        ladder = resolution_ladder()
        assert len(ladder) == 18
        assert ladder[0] == Resolution(1440, 1080)
        assert ladder[-1] == Resolution(42, 32)
        assert Resolution(65, 49) in ladder
        assert Resolution(69, 45) in ladder
        assert len(set(ladder)) == 18

    def test_resting_lip_height(self) -> None:
        """lip height scales with target rows"""
        points = np.array([[700.0, 600.0], [720.0, 587.0], [740.0, 600.0], [720.0, 613.0], [0.0, 0.0]])
        rest = Shape(points)
        lips = [0, 1, 2, 3]
        native = Resolution(1440, 1080)
        assert resting_lip_height(rest, native, native, lips) == pytest.approx(26.0)
        assert resting_lip_height(rest, native, Resolution(240, 180), lips) == pytest.approx(26 * 180 / 1080)
        with pytest.raises(ShapeError):
            resting_lip_height(rest, native, native, [])
