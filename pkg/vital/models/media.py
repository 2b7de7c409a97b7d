from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..exceptions import InputException, ShapeException


@dataclass(frozen=True, eq=False)
class Image:
    """Raster with pixels in [0, 1], stored as [height x width x channels]."""
    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.array(self.pixels, dtype=np.float64)
        if pixels.ndim == 2:
            pixels = pixels[:, :, None]
        if pixels.ndim != 3 or pixels.shape[2] not in (1, 3):
            raise ShapeException(f"image must be HxW, HxWx1 or HxWx3, got shape {pixels.shape}")
        if pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise ShapeException("image must have at least one pixel")
        pixels = np.clip(np.nan_to_num(pixels, nan=0.0), 0.0, 1.0)
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]


@dataclass(frozen=True, eq=False)
class TactileClip:
    frames: Tuple[Image, ...]
    timestamps_ms: Tuple[int, ...]
    sensor_id: str = "gelsight-mini"

    def __post_init__(self):
        frames = tuple(self.frames)
        timestamps = tuple(int(t) for t in self.timestamps_ms)
        if len(frames) != len(timestamps):
            raise ShapeException(f"{len(frames)} frames but {len(timestamps)} timestamps")
        if any(b <= a for a, b in zip(timestamps, timestamps[1:])):
            raise InputException("tactile timestamps must be strictly increasing")
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "timestamps_ms", timestamps)

    def __len__(self) -> int:
        return len(self.frames)


@dataclass(frozen=True, eq=False)
class RegionGrid:
    grid_size: int
    regions: Tuple[Image, ...]  # row-major, grid_size ** 2 entries
