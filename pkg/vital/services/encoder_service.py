"""
EncoderService - toy vision and tactile encoders.

Vision: split the image into a G x G grid, featurize each region, run the
encoder MLP (penultimate features) and project into the shared space.
Tactile: featurize each frame, encode, project, then add the sinusoidal
position row for the frame's place in the clip.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Sequence, Union

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from .base_service import BaseService
from ..exceptions import ConfigException, InputException, ShapeException
from ..models.embedding import BOUNDARY_TOKEN_NAMES, BoundaryTokens, EmbeddingSequence, Modality
from ..models.media import Image, RegionGrid, TactileClip
from ..models.network import Activation, MlpParams
from ..utils.numerics import init_mlp, make_rng, mlp_forward_rows, sinusoidal_pe

HISTOGRAM_BINS = 8
FEATURES_PER_CHANNEL = 2 + HISTOGRAM_BINS


def feature_dim(channels: int) -> int:
    return FEATURES_PER_CHANNEL * channels


@dataclass(frozen=True, eq=False)
class EncoderWeights:
    """Seeded encoder/projector pairs for both modalities."""
    vision_encoder: MlpParams
    vision_projector: MlpParams
    tactile_encoder: MlpParams
    tactile_projector: MlpParams

    @classmethod
    def from_seed(cls, seed: int, dim: int, hidden_dim: int = 48,
                  vision_channels: int = 3, tactile_channels: int = 3) -> "EncoderWeights":
        rng = make_rng(seed)
        relu_then_identity = [Activation.RELU, Activation.IDENTITY]
        return cls(
            vision_encoder=init_mlp(rng, [feature_dim(vision_channels), hidden_dim, hidden_dim], relu_then_identity),
            vision_projector=init_mlp(rng, [hidden_dim, dim], [Activation.IDENTITY]),
            tactile_encoder=init_mlp(rng, [feature_dim(tactile_channels), hidden_dim, hidden_dim], relu_then_identity),
            tactile_projector=init_mlp(rng, [hidden_dim, dim], [Activation.IDENTITY]),
        )


class EncoderService(BaseService):
    """Turns images and tactile clips into embedding sequences."""

    def __init__(self):
        super().__init__()

    # --- raster I/O ---

    def load_image(self, path: Union[str, Path]) -> Image:
        """Read an 8-bit grayscale or RGB raster (PGM/PPM/PNG), scaled by 1/255."""
        path = Path(path)
        if not path.exists():
            raise InputException(f"image not found: {path}")
        try:
            with PILImage.open(path) as raster:
                if raster.mode not in ("L", "RGB"):
                    raster = raster.convert("RGB")
                pixels = np.asarray(raster, dtype=np.float64) / 255.0
        except (UnidentifiedImageError, OSError) as e:
            raise InputException(f"cannot decode image {path.name}: {e}")
        return Image(pixels)

    def to_channels(self, img: Image, channels: int) -> Image:
        """Replicate grayscale to RGB or average RGB down to grayscale."""
        if img.channels == channels:
            return img
        if channels == 3:
            return Image(np.repeat(img.pixels, 3, axis=2))
        if channels == 1:
            return Image(img.pixels.mean(axis=2, keepdims=True))
        raise ConfigException(f"unsupported channel count {channels}")

    # --- vision ---

    def segment_image(self, img: Image, grid_size: int) -> RegionGrid:
        if grid_size < 1:
            raise ConfigException(f"grid size must be at least 1, got {grid_size}")
        if grid_size > min(img.width, img.height):
            raise ConfigException(
                f"grid size {grid_size} exceeds the smaller image side ({img.width}x{img.height})"
            )
        row_edges = self._edges(img.height, grid_size)
        col_edges = self._edges(img.width, grid_size)
        regions = []
        for r in range(grid_size):
            for c in range(grid_size):
                block = img.pixels[row_edges[r]:row_edges[r + 1], col_edges[c]:col_edges[c + 1], :]
                regions.append(Image(block))
        return RegionGrid(grid_size=grid_size, regions=tuple(regions))

    @staticmethod
    def _edges(length: int, parts: int) -> List[int]:
        # the last part absorbs the remainder
        step = length // parts
        return [k * step for k in range(parts)] + [length]

    def region_features(self, img: Image) -> np.ndarray:
        """Per channel: mean, std, then an 8-bin histogram on [0, 1] as fractions."""
        features = []
        for channel in range(img.channels):
            values = img.pixels[:, :, channel].ravel()
            counts, _ = np.histogram(values, bins=HISTOGRAM_BINS, range=(0.0, 1.0))
            features.append(values.mean())
            features.append(values.std())
            features.extend(counts / values.size)
        return np.asarray(features, dtype=np.float64)

    def encode_vision(self, img: Image, grid_size: int, encoder: MlpParams, projector: MlpParams) -> EmbeddingSequence:
        grid = self.segment_image(img, grid_size)
        features = np.stack([self.region_features(region) for region in grid.regions])
        projected = self._encode_and_project(features, encoder, projector)
        return EmbeddingSequence(projected, projector.out_dim, Modality.VISION)

    # --- tactile ---

    def encode_tactile(self, clip: TactileClip, encoder: MlpParams, projector: MlpParams,
                       add_positions: bool = True) -> EmbeddingSequence:
        if len(clip) == 0:
            raise InputException("cannot encode an empty tactile clip")
        features = np.stack([self.region_features(frame) for frame in clip.frames])
        projected = self._encode_and_project(features, encoder, projector)
        if add_positions:
            projected = projected + sinusoidal_pe(len(clip), projector.out_dim)
        return EmbeddingSequence(projected, projector.out_dim, Modality.TACTILE)

    def _encode_and_project(self, features: np.ndarray, encoder: MlpParams, projector: MlpParams) -> np.ndarray:
        if encoder.out_dim != projector.in_dim:
            raise ShapeException(
                f"encoder outputs {encoder.out_dim} features but projector expects {projector.in_dim}"
            )
        penultimate = mlp_forward_rows(encoder, features)
        return mlp_forward_rows(projector, penultimate)

    # --- boundary markers ---

    def init_boundary_tokens(self, phrase_embeddings: Mapping[str, Sequence[Sequence[float]]]) -> BoundaryTokens:
        """Each marker is the arithmetic mean of its phrase embeddings, frozen afterwards."""
        tokens: Dict[str, np.ndarray] = {}
        dims = set()
        for name in BOUNDARY_TOKEN_NAMES:
            phrases = phrase_embeddings.get(name)
            if not phrases:
                raise ConfigException(f"boundary token {name} needs at least one phrase embedding")
            lengths = {len(vector) for vector in phrases}
            if len(lengths) != 1:
                raise ShapeException(f"phrase embeddings for {name} have mixed dims {sorted(lengths)}")
            dims |= lengths
            tokens[name] = np.mean(np.asarray(phrases, dtype=np.float64), axis=0)
        if len(dims) != 1:
            raise ShapeException(f"boundary phrase embeddings have mixed dims {sorted(dims)}")
        self.log_debug(f"Boundary tokens initialized with dim {dims.pop()}")
        return BoundaryTokens(**tokens)
