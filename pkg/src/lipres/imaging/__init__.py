"""Grayscale Frames and Resolution Degradation.

# Features
- PGM (P5) and PNG ingestion, RGB converted to luma
- Nearest neighbour downsample, bilinear upsample, pixel-centre convention
- Windowed degradation for the mouth region only
- The 18-step resolution ladder and lip-height calibration

"""

from .image import Image, Resolution, ResolutionPoint, load_frames, read_frame, save_pgm
from .resample import (
    Box,
    degrade,
    degrade_window,
    downsample_nearest,
    resolution_ladder,
    resting_lip_height,
    upsample_bilinear,
)

__all__ = (
    "Box",
    "Image",
    "Resolution",
    "ResolutionPoint",
    "degrade",
    "degrade_window",
    "downsample_nearest",
    "load_frames",
    "read_frame",
    "resolution_ladder",
    "resting_lip_height",
    "save_pgm",
    "upsample_bilinear",
)
