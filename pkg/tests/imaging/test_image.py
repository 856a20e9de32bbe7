from pathlib import Path

import numpy as np
import pytest
from PIL import Image as PILImage

from lipres.errors import FrameError
from lipres.imaging.image import (
    Image,
    Resolution,
    ResolutionPoint,
    load_frames,
    read_frame,
    save_pgm,
)


def _write_p5(file: Path, width: int, height: int, samples: bytes) -> Path:
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    file.write_bytes(header + samples)
    return file


class Tester:
    """Test Frames and Ingestion."""

    def test_image_invariants(self) -> None:
        """values must be finite and inside [0, 1]"""
        img = Image(np.zeros((2, 3)))
        assert img.width == 3
        assert img.height == 2
        assert img.resolution == Resolution(3, 2)
        assert not img.data.flags.writeable

        with pytest.raises(ValueError):
            Image(np.array([[0.0, 1.5]]))
        with pytest.raises(ValueError):
            Image(np.array([[np.nan]]))
        with pytest.raises(ValueError):
            Image(np.zeros(4))

    def test_resolution(self) -> None:
        """parse and format WxH"""
        res = Resolution.parse("60x45")
        assert res == Resolution(60, 45)
        assert str(res) == "60x45"
        with pytest.raises(ValueError):
            Resolution(0, 5)
        with pytest.raises(ValueError):
            Resolution.parse("60 by 45")
        with pytest.raises(ValueError):
            ResolutionPoint(Resolution(1, 1), 0.0)

    def test_read_p5(self, tmp_path: Path) -> None:
        """8-bit samples map by v/255"""
        file = _write_p5(tmp_path / "0001.pgm", 2, 2, bytes([0, 255, 128, 64]))
        img = read_frame(file)
        assert img.resolution == Resolution(2, 2)
        assert img.data.ravel().tolist() == [0.0, 1.0, 128 / 255, 64 / 255]

    def test_read_png_rgb(self, tmp_path: Path) -> None:
        """RGB frames are converted to luma"""
        file = tmp_path / "rgb.png"
        array = np.zeros((1, 3, 3), dtype=np.uint8)
        array[0, 0] = (255, 0, 0)
        array[0, 1] = (0, 255, 0)
        array[0, 2] = (255, 255, 255)
        PILImage.fromarray(array).save(file)
        img = read_frame(file)
        assert img.data[0, 0] == pytest.approx(0.299)
        assert img.data[0, 1] == pytest.approx(0.587)
        assert img.data[0, 2] == pytest.approx(1.0)

    def test_read_errors(self, tmp_path: Path) -> None:
        """bad files are reported by name"""
        file = tmp_path / "broken.pgm"
        file.write_bytes(b"not an image at all")
        with pytest.raises(FrameError, match="broken.pgm"):
            read_frame(file)
        with pytest.raises(FrameError, match="missing.pgm"):
            read_frame(tmp_path / "missing.pgm")

    def test_load_frames(self, tmp_path: Path) -> None:
        """frames come back in filename order"""
        for index in (3, 1, 2):
            _write_p5(tmp_path / f"{index:04d}.pgm", 1, 1, bytes([index]))
        frames = load_frames(tmp_path, "*.pgm")
        assert [f.data[0, 0] * 255 for f in frames] == pytest.approx([1, 2, 3])

        empty = tmp_path / "empty"
        empty.mkdir()
        with pytest.raises(FrameError, match="no frame"):
            load_frames(empty)
        with pytest.raises(FrameError, match="not found"):
            load_frames(tmp_path / "nowhere")

    def test_save_pgm(self, tmp_path: Path) -> None:
        """P5 output reads back to the same quantised values"""
        img = Image.from_bytes(3, 2, bytes([0, 10, 20, 200, 254, 255]))
        file = tmp_path / "out.pgm"
        assert save_pgm(img, file)
        assert file.read_bytes().startswith(b"P5")
        back = read_frame(file)
        assert np.array_equal(back.data, img.data)
