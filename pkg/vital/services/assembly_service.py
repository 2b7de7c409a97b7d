"""
AssemblyService - byte tokenizer, token embedding and multimodal assembly.

The assembled sequence follows a layout: an ordered list of segments in
which each enabled modality span (vision, tactile or both) appears once,
wrapped in its boundary markers, and the text appears either whole or
split into a prefix and a suffix.
"""

from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .base_service import BaseService
from ..exceptions import ConfigException, RangeException, ShapeException
from ..models.embedding import BoundaryTokens, EmbeddingSequence, ItemTag, Modality, MultimodalSequence, TokenSequence

BYTE_VOCAB = 256
EOS_ID = 256
BOS_ID = 257
VOCAB_SIZE = 258


class LayoutSegment(Enum):
    TEXT = "text"
    TEXT_PREFIX = "text_prefix"
    VISION = "vision"
    TACTILE = "tactile"
    TEXT_SUFFIX = "text_suffix"


LAYOUT_PRESETS: Dict[str, Tuple[LayoutSegment, ...]] = {
    "interleaved": (LayoutSegment.TEXT_PREFIX, LayoutSegment.VISION, LayoutSegment.TACTILE, LayoutSegment.TEXT_SUFFIX),
    "prepend": (LayoutSegment.VISION, LayoutSegment.TACTILE, LayoutSegment.TEXT),
}
DEFAULT_LAYOUT = LAYOUT_PRESETS["interleaved"]

MODALITY_SPANS: Dict[str, Tuple[LayoutSegment, ...]] = {
    "vision_tactile": (LayoutSegment.VISION, LayoutSegment.TACTILE),
    "vision": (LayoutSegment.VISION,),
    "tactile": (LayoutSegment.TACTILE,),
}
FUSED_SPANS = MODALITY_SPANS["vision_tactile"]


def parse_layout(names: Sequence[str]) -> Tuple[LayoutSegment, ...]:
    """Turn config strings (or a single preset name) into layout segments."""
    if len(names) == 1 and names[0] in LAYOUT_PRESETS:
        return LAYOUT_PRESETS[names[0]]
    try:
        layout = tuple(LayoutSegment(name) for name in names)
    except ValueError as e:
        allowed = ", ".join(s.value for s in LayoutSegment)
        raise ConfigException(f"unknown layout segment ({e}); allowed: {allowed}") from e
    validate_layout(layout)
    return layout


def modality_spans(modalities: str) -> Tuple[LayoutSegment, ...]:
    try:
        return MODALITY_SPANS[modalities]
    except KeyError:
        allowed = ", ".join(MODALITY_SPANS)
        raise ConfigException(f"unknown modalities {modalities!r}; use one of {allowed}") from None


def validate_layout(layout: Sequence[LayoutSegment], spans: Sequence[LayoutSegment] = FUSED_SPANS) -> None:
    """Enabled spans appear exactly once, disabled spans not at all."""
    if not spans:
        raise ConfigException("at least one of the vision and tactile spans must be enabled")
    counts = {segment: list(layout).count(segment) for segment in LayoutSegment}
    for span in FUSED_SPANS:
        if span not in spans:
            if counts[span]:
                raise ConfigException(f"layout references the {span.value} span, which is disabled")
            continue
        if counts[span] != 1:
            raise ConfigException(f"layout must reference the {span.value} span exactly once, found {counts[span]}")
    whole = counts[LayoutSegment.TEXT]
    prefix, suffix = counts[LayoutSegment.TEXT_PREFIX], counts[LayoutSegment.TEXT_SUFFIX]
    if whole == 1 and prefix == 0 and suffix == 0:
        return
    if whole == 0 and prefix == 1 and suffix == 1:
        if list(layout).index(LayoutSegment.TEXT_PREFIX) > list(layout).index(LayoutSegment.TEXT_SUFFIX):
            raise ConfigException("text_prefix must come before text_suffix")
        return
    raise ConfigException("layout must reference the text once, either as 'text' or as 'text_prefix' + 'text_suffix'")


def restrict_layout(layout: Sequence[LayoutSegment], modalities: str) -> Tuple[LayoutSegment, ...]:
    """Drop the spans of modalities left out of the run."""
    spans = modality_spans(modalities)
    kept = tuple(segment for segment in layout if segment not in FUSED_SPANS or segment in spans)
    validate_layout(kept, spans)
    return kept


class AssemblyService(BaseService):
    """Tokenizes text and builds the model-ready multimodal sequence."""

    def __init__(self):
        super().__init__()

    def tokenize_text(self, s: str) -> TokenSequence:
        return TokenSequence(tuple(s.encode("utf-8")), VOCAB_SIZE)

    def detokenize(self, tokens: TokenSequence) -> str:
        return bytes(t for t in tokens.token_ids if t < BYTE_VOCAB).decode("utf-8", errors="replace")

    def embed_tokens(self, tokens: TokenSequence, table: np.ndarray) -> EmbeddingSequence:
        table = np.asarray(table, dtype=np.float64)
        if table.ndim != 2:
            raise ShapeException(f"embedding table must be 2-D, got shape {table.shape}")
        ids = np.asarray(tokens.token_ids, dtype=np.int64)
        if ids.size and ids.max() >= table.shape[0]:
            raise RangeException(f"token id {int(ids.max())} outside table of {table.shape[0]} rows")
        return EmbeddingSequence(table[ids], table.shape[1], Modality.TEXT)

    def embed_phrase(self, phrase: str, table: np.ndarray) -> np.ndarray:
        """Mean-pooled token embedding of a phrase."""
        embedded = self.embed_tokens(self.tokenize_text(phrase), table)
        if embedded.length == 0:
            raise ConfigException("cannot embed an empty phrase")
        return embedded.vectors.mean(axis=0)

    def assemble_sequence(self, text: EmbeddingSequence, vision: Optional[EmbeddingSequence],
                          tactile: Optional[EmbeddingSequence],
                          boundary: BoundaryTokens, layout: Sequence[LayoutSegment] = DEFAULT_LAYOUT,
                          text_split: Optional[int] = None) -> MultimodalSequence:
        """Lay out [vision; tactile; text] spans with their markers.

        text_split is the number of text items placed in text_prefix (default 0);
        it is ignored for layouts that use a single text segment. Pass None for
        a modality left out of the run; its span must then be absent from the layout.
        """
        spans = tuple(span for span, sequence in zip(FUSED_SPANS, (vision, tactile)) if sequence is not None)
        validate_layout(layout, spans)
        dim = boundary.dim
        for name, sequence in (("text", text), ("vision", vision), ("tactile", tactile)):
            if sequence is not None and sequence.dim != dim:
                raise ShapeException(f"{name} embeddings have dim {sequence.dim}, boundary tokens have {dim}")

        split = 0 if text_split is None else text_split
        if not 0 <= split <= text.length:
            raise ConfigException(f"text_split {split} outside [0, {text.length}]")

        blocks: List[np.ndarray] = []
        tags: List[ItemTag] = []

        def emit(vectors: np.ndarray, tag: ItemTag) -> None:
            blocks.append(vectors.reshape(-1, dim))
            tags.extend([tag] * (vectors.size // dim))

        for segment in layout:
            if segment is LayoutSegment.TEXT:
                emit(text.vectors, ItemTag.TEXT)
            elif segment is LayoutSegment.TEXT_PREFIX:
                emit(text.vectors[:split], ItemTag.TEXT)
            elif segment is LayoutSegment.TEXT_SUFFIX:
                emit(text.vectors[split:], ItemTag.TEXT)
            elif segment is LayoutSegment.VISION:
                emit(boundary.img_start, ItemTag.IMG_MARKER)
                emit(vision.vectors, ItemTag.VISION)
                emit(boundary.img_end, ItemTag.IMG_MARKER)
            else:
                emit(boundary.tact_start, ItemTag.TACT_MARKER)
                emit(tactile.vectors, ItemTag.TACTILE)
                emit(boundary.tact_end, ItemTag.TACT_MARKER)

        vectors = np.concatenate(blocks, axis=0) if blocks else np.zeros((0, dim))
        return MultimodalSequence(vectors, tuple(tags), dim)
