# -*- coding: utf-8 -*-

import numpy as np
import pytest

from lipres.aam.model import Aam, build_aam
from lipres.geometry.shape import Shape
from lipres.imaging.image import Image

FRAME_W, FRAME_H = 64, 52
# eight rim angles, nudged so no four rim points share a circle
ANGLES = np.deg2rad(np.arange(8) * 45.0 + np.array([0.0, 3.0, -2.0, 5.0, 1.0, -4.0, 2.0, -3.0]))


def mouth_shape(cx: float, cy: float, width: float, opening: float, angle: float) -> Shape:
    """Eight rim points and two inner points of a synthetic mouth."""
    rim = np.column_stack([12.0 * width * np.cos(ANGLES), 8.0 * opening * np.sin(ANGLES)])
    inner = np.array([[-4.0 * width, 0.5 * opening], [4.0 * width, -0.5 * opening]])
    local = np.vstack([rim, inner])
    c, s = np.cos(angle), np.sin(angle)
    return Shape(local @ np.array([[c, s], [-s, c]]) + np.array([cx, cy]))


def mouth_image(cx: float, cy: float, a: float, b: float) -> Image:
    """Smooth texture centred on the mouth."""
    ys, xs = np.mgrid[0:FRAME_H, 0:FRAME_W].astype(np.float64)
    u, v = xs - cx, ys - cy
    data = 0.5 + 0.15 * np.sin(u / 3.0) * np.cos(v / 4.0) + a * np.exp(-(u**2 + v**2) / 50.0) + b * u / 30.0
    return Image(np.clip(data, 0.0, 1.0))


@pytest.fixture(scope="session")
def training_frames() -> list[tuple[Image, Shape]]:
    rng = np.random.default_rng(7)
    frames = []
    for k in range(10):
        cx = 32.0 + rng.uniform(-2.0, 2.0)
        cy = 26.0 + rng.uniform(-2.0, 2.0)
        shape = mouth_shape(cx, cy, 1.0 + 0.15 * np.sin(k), 0.7 + 0.06 * k, rng.uniform(-0.05, 0.05))
        image = mouth_image(cx, cy, rng.uniform(-0.2, 0.2), rng.uniform(-0.1, 0.1))
        frames.append((image, shape))
    return frames


@pytest.fixture(scope="session")
def aam(training_frames: list[tuple[Image, Shape]]) -> Aam:
    return build_aam(training_frames, retain_shape=0.98, retain_appearance=0.98)
