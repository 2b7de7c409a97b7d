"""
Embedding containers: per-modality sequences, boundary markers,
token ids and the assembled multimodal input.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Tuple

import numpy as np

from ..exceptions import RangeException, ShapeException


class Modality(Enum):
    VISION = "vision"
    TACTILE = "tactile"
    TEXT = "text"


class ItemTag(Enum):
    TEXT = "text"
    IMG_MARKER = "img_marker"
    VISION = "vision"
    TACT_MARKER = "tact_marker"
    TACTILE = "tactile"


def _frozen_rows(vectors, dim: int) -> np.ndarray:
    array = np.array(vectors, dtype=np.float64)
    if array.size == 0:
        array = np.zeros((0, dim), dtype=np.float64)
    if array.ndim != 2 or array.shape[1] != dim:
        raise ShapeException(f"expected rows of length {dim}, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ShapeException("embeddings contain NaN or Inf")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class EmbeddingSequence:
    vectors: np.ndarray  # [length x dim]
    dim: int
    modality: Modality

    def __post_init__(self):
        object.__setattr__(self, "vectors", _frozen_rows(self.vectors, self.dim))

    @property
    def length(self) -> int:
        return self.vectors.shape[0]

    def __len__(self) -> int:
        return self.length


BOUNDARY_TOKEN_NAMES = ("img_start", "img_end", "tact_start", "tact_end")


@dataclass(frozen=True, eq=False)
class BoundaryTokens:
    img_start: np.ndarray
    img_end: np.ndarray
    tact_start: np.ndarray
    tact_end: np.ndarray
    frozen: bool = field(default=True, init=False)

    def __post_init__(self):
        dims = set()
        for name in BOUNDARY_TOKEN_NAMES:
            vector = np.array(getattr(self, name), dtype=np.float64)
            if vector.ndim != 1 or not np.all(np.isfinite(vector)):
                raise ShapeException(f"boundary token {name} must be a finite vector")
            vector.setflags(write=False)
            object.__setattr__(self, name, vector)
            dims.add(vector.shape[0])
        if len(dims) != 1:
            raise ShapeException(f"boundary tokens have mixed dims {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.img_start.shape[0]


@dataclass(frozen=True)
class TokenSequence:
    token_ids: Tuple[int, ...]
    vocab_size: int

    def __post_init__(self):
        ids = tuple(int(t) for t in self.token_ids)
        for position, token_id in enumerate(ids):
            if not 0 <= token_id < self.vocab_size:
                raise RangeException(f"token id {token_id} at position {position} outside [0, {self.vocab_size})")
        object.__setattr__(self, "token_ids", ids)

    def __len__(self) -> int:
        return len(self.token_ids)


@dataclass(frozen=True, eq=False)
class MultimodalSequence:
    vectors: np.ndarray  # [length x dim]
    tags: Tuple[ItemTag, ...]
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "vectors", _frozen_rows(self.vectors, self.dim))
        tags = tuple(self.tags)
        if len(tags) != self.vectors.shape[0]:
            raise ShapeException(f"{len(tags)} tags for {self.vectors.shape[0]} vectors")
        object.__setattr__(self, "tags", tags)

    def __len__(self) -> int:
        return len(self.tags)

    def spans(self) -> Dict[str, Tuple[int, int]]:
        """Half-open index range of the vision and tactile spans, markers excluded."""
        result = {}
        for marker, name in ((ItemTag.IMG_MARKER, "vision"), (ItemTag.TACT_MARKER, "tactile")):
            positions = [i for i, tag in enumerate(self.tags) if tag is marker]
            if len(positions) == 2:
                result[name] = (positions[0] + 1, positions[1])
        return result
