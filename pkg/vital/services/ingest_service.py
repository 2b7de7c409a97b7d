"""
IngestService - tactile clip loading and fixed-stride frame sampling.

A clip arrives as a directory of pre-extracted frames (sorted by file name),
a .npy stack shaped [T, H, W] or [T, H, W, C], or an explicit list of frame
files. Frame i is stamped round(i * 1000 / fps) milliseconds.
"""

from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .base_service import BaseService
from .encoder_service import EncoderService
from ..exceptions import ConfigException, InputException
from ..models.manifest import ObjectManifestEntry
from ..models.media import Image, TactileClip

FRAME_SUFFIXES = (".png", ".pgm", ".ppm", ".jpg", ".jpeg", ".bmp")
# absorbs float error in timestamps computed as i * 1000 / fps
TIME_EPSILON_MS = 1e-6


def synthetic_timestamps(fps: float, duration_ms: float) -> List[float]:
    if fps <= 0:
        raise ConfigException(f"fps must be positive, got {fps}")
    count = int(round(duration_ms * fps / 1000.0))
    return [i * 1000.0 / fps for i in range(count)]


def sample_frame_indices(timestamps_ms: Sequence[float], stride_ms: float) -> List[int]:
    """Indices kept at t0, t0 + stride, ...; a target between frames takes the earlier one."""
    if len(timestamps_ms) == 0:
        raise InputException("cannot sample an empty clip")
    if stride_ms <= 0:
        raise ConfigException(f"stride must be positive, got {stride_ms} ms")
    times = np.asarray(timestamps_ms, dtype=np.float64)
    if times.size > 1:
        period = float(np.min(np.diff(times)))
        if stride_ms < period - TIME_EPSILON_MS:
            raise ConfigException(f"stride {stride_ms} ms is shorter than the frame period {period:g} ms")

    start, last = times[0], times[-1]
    count = int(np.floor((last - start) / stride_ms + TIME_EPSILON_MS)) + 1
    targets = start + stride_ms * np.arange(count)
    picks = np.searchsorted(times, targets + TIME_EPSILON_MS, side="right") - 1

    indices: List[int] = []
    for index in picks:
        if not indices or indices[-1] != index:
            indices.append(int(index))
    return indices


def sample_frames(clip: TactileClip, stride_ms: float) -> TactileClip:
    indices = sample_frame_indices(clip.timestamps_ms, stride_ms)
    return TactileClip(
        frames=tuple(clip.frames[i] for i in indices),
        timestamps_ms=tuple(clip.timestamps_ms[i] for i in indices),
        sensor_id=clip.sensor_id,
    )


class IngestService(BaseService):
    """Loads object media referenced by a manifest."""

    def __init__(self, encoder: Optional[EncoderService] = None):
        super().__init__()
        self.encoder = encoder or EncoderService()

    def frame_files(self, directory: Path) -> List[Path]:
        files = sorted(p for p in directory.iterdir() if p.suffix.lower() in FRAME_SUFFIXES)
        if not files:
            raise InputException(f"no frame images in {directory}")
        return files

    def load_frame_stack(self, path: Path) -> List[Image]:
        try:
            stack = np.load(path)
        except (OSError, ValueError, EOFError) as e:
            raise InputException(f"{path.name}: not a readable .npy frame stack ({e})")
        if stack.ndim not in (3, 4) or stack.shape[0] == 0:
            raise InputException(f"{path.name}: expected a [T, H, W(, C)] frame stack, got shape {stack.shape}")
        if np.issubdtype(stack.dtype, np.integer):
            stack = stack.astype(np.float64) / 255.0
        return [Image(frame) for frame in stack]

    def load_tactile_clip(self, entry: ObjectManifestEntry, fps: float) -> TactileClip:
        if entry.tactile_frame_paths:
            frames = [self.encoder.load_image(p) for p in entry.tactile_frame_paths]
        elif entry.tactile_video_path is not None:
            source = Path(entry.tactile_video_path)
            if source.is_dir():
                frames = [self.encoder.load_image(p) for p in self.frame_files(source)]
            elif source.suffix.lower() == ".npy":
                frames = self.load_frame_stack(source)
            else:
                raise InputException(
                    f"{source.name}: video containers are not decoded; extract frames to a directory or .npy stack"
                )
        else:
            raise InputException(f"{entry.object_id} has no tactile input")

        timestamps = [int(round(i * 1000.0 / fps)) for i in range(len(frames))]
        self.log_debug(f"Loaded {len(frames)} tactile frames for {entry.object_id}")
        return TactileClip(frames=tuple(frames), timestamps_ms=tuple(timestamps))

    def load_object(self, entry: ObjectManifestEntry, fps: float, stride_ms: float, vision: bool = True,
                    tactile: bool = True) -> Tuple[Optional[Image], Optional[TactileClip]]:
        """(image, sampled clip) for one manifest entry; a modality that is switched off stays None."""
        image = self.encoder.load_image(entry.image_path) if vision else None
        clip = sample_frames(self.load_tactile_clip(entry, fps), stride_ms) if tactile else None
        return image, clip

