"""
ToyLM - a two-layer decoder that reads assembled multimodal embeddings.

Each layer is single-head scaled dot-product attention under a causal mask
followed by a ReLU feed-forward block, both residual. Sinusoidal positions
are added to the input stream. Decoding runs over the byte vocabulary with
a key/value cache; greedy at temperature 0 (ties go to the lowest id),
seeded sampling otherwise.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .assembly_service import BOS_ID, BYTE_VOCAB, EOS_ID, VOCAB_SIZE
from .backend_service import LanguageBackend
from ..config.run_config import BackendKind
from ..exceptions import ConfigException, ShapeException
from ..models.embedding import MultimodalSequence
from ..models.generation import FinishReason, GenerationRequest, GenerationResult, RequestKind
from ..models.network import Activation, MlpParams, as_matrix
from ..utils.numerics import init_mlp, make_rng, mlp_forward_rows, seeded_init, sinusoidal_pe, softmax_rows

EMBEDDING_SCALE = 0.5
NUM_LAYERS = 2


@dataclass(frozen=True, eq=False)
class DecoderLayer:
    wq: np.ndarray  # [d x d]
    wk: np.ndarray
    wv: np.ndarray
    wo: np.ndarray
    ffn: MlpParams  # d -> 2d (ReLU) -> d

    def __post_init__(self):
        for name in ("wq", "wk", "wv", "wo"):
            matrix = as_matrix(getattr(self, name))
            if matrix.shape[0] != matrix.shape[1]:
                raise ShapeException(f"{name} must be square, got {matrix.shape}")
            object.__setattr__(self, name, matrix)

    @property
    def dim(self) -> int:
        return self.wq.shape[0]


@dataclass(frozen=True, eq=False)
class ToyLMWeights:
    token_embedding: np.ndarray  # [V x d], shared with the text tokenizer
    layers: Tuple[DecoderLayer, ...]
    head: np.ndarray  # [d x V]

    def __post_init__(self):
        object.__setattr__(self, "token_embedding", as_matrix(self.token_embedding))
        object.__setattr__(self, "head", as_matrix(self.head))
        dim = self.token_embedding.shape[1]
        if self.token_embedding.shape[0] != VOCAB_SIZE or self.head.shape != (dim, VOCAB_SIZE):
            raise ShapeException(
                f"embedding {self.token_embedding.shape} and head {self.head.shape} do not match vocab {VOCAB_SIZE}"
            )
        for index, layer in enumerate(self.layers):
            if layer.dim != dim or layer.ffn.in_dim != dim or layer.ffn.out_dim != dim:
                raise ShapeException(f"layer {index} does not match model dim {dim}")

    @property
    def dim(self) -> int:
        return self.token_embedding.shape[1]

    @classmethod
    def from_seed(cls, seed: int, dim: int, num_layers: int = NUM_LAYERS) -> "ToyLMWeights":
        if dim <= 0 or dim % 2:
            raise ConfigException(f"model dim must be even and positive, got {dim}")
        rng = make_rng(seed)
        attention_scale = 1.0 / np.sqrt(dim)
        token_embedding = seeded_init(rng, VOCAB_SIZE, dim, EMBEDDING_SCALE)
        layers = []
        for _ in range(num_layers):
            wq, wk, wv, wo = (seeded_init(rng, dim, dim, attention_scale) for _ in range(4))
            ffn = init_mlp(rng, [dim, 2 * dim, dim], [Activation.RELU, Activation.IDENTITY], attention_scale)
            layers.append(DecoderLayer(wq, wk, wv, wo, ffn))
        head = seeded_init(rng, dim, VOCAB_SIZE, EMBEDDING_SCALE)
        return cls(token_embedding, tuple(layers), head)


@dataclass(frozen=True, eq=False)
class ForwardTrace:
    """Debug view of one full forward pass."""
    logits: np.ndarray  # [length x V]
    attentions: Tuple[np.ndarray, ...]  # one [length x length] matrix per layer


class _KVCache:
    def __init__(self, num_layers: int):
        self.keys: List[Optional[np.ndarray]] = [None] * num_layers
        self.values: List[Optional[np.ndarray]] = [None] * num_layers

    def extend(self, index: int, k: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        if self.keys[index] is None:
            self.keys[index], self.values[index] = k, v
        else:
            self.keys[index] = np.vstack([self.keys[index], k])
            self.values[index] = np.vstack([self.values[index], v])
        return self.keys[index], self.values[index]


def _run_layers(weights: ToyLMWeights, x: np.ndarray, start: int, cache: _KVCache) -> Tuple[np.ndarray, List[np.ndarray]]:
    """Push rows x (positions start..start+n-1, PE already added) through every layer."""
    n = x.shape[0]
    scale = 1.0 / np.sqrt(weights.dim)
    attentions = []
    for index, layer in enumerate(weights.layers):
        q = x @ layer.wq
        keys, values = cache.extend(index, x @ layer.wk, x @ layer.wv)
        scores = (q @ keys.T) * scale
        query_pos = np.arange(start, start + n)[:, None]
        key_pos = np.arange(keys.shape[0])[None, :]
        scores = np.where(key_pos <= query_pos, scores, -np.inf)
        attention = softmax_rows(scores)
        attentions.append(attention)
        h = x + (attention @ values) @ layer.wo
        x = h + mlp_forward_rows(layer.ffn, h)
    return x, attentions


def toy_forward(weights: ToyLMWeights, sequence: MultimodalSequence) -> ForwardTrace:
    if sequence.dim != weights.dim:
        raise ShapeException(f"sequence dim {sequence.dim} does not match model dim {weights.dim}")
    if len(sequence) == 0:
        raise ShapeException("cannot run the decoder on an empty sequence")
    x = sequence.vectors + sinusoidal_pe(len(sequence), weights.dim)
    hidden, attentions = _run_layers(weights, x, 0, _KVCache(len(weights.layers)))
    return ForwardTrace(logits=hidden @ weights.head, attentions=tuple(attentions))


def _pick(logits: np.ndarray, step: int, temperature: float, rng: np.random.Generator) -> int:
    masked = logits.copy()
    masked[BOS_ID] = -np.inf
    if step == 0:
        masked[EOS_ID] = -np.inf
    if temperature == 0:
        return int(np.argmax(masked))
    probabilities = softmax_rows((masked / temperature)[None, :])[0]
    return int(rng.choice(VOCAB_SIZE, p=probabilities))


def toy_generate(request: GenerationRequest, weights: ToyLMWeights, seed: int) -> GenerationResult:
    """Decode up to max_tokens bytes after the assembled sequence."""
    sequence = request.sequence
    if sequence is None:
        raise ConfigException("the toy decoder needs an assembled sequence")
    if sequence.dim != weights.dim:
        raise ShapeException(f"sequence dim {sequence.dim} does not match model dim {weights.dim}")
    if len(sequence) == 0:
        raise ShapeException("cannot run the decoder on an empty sequence")

    rng = make_rng(seed)
    total = len(sequence) + request.max_tokens
    positions = sinusoidal_pe(total, weights.dim)
    cache = _KVCache(len(weights.layers))

    hidden, _ = _run_layers(weights, sequence.vectors + positions[:len(sequence)], 0, cache)
    logits = hidden[-1] @ weights.head

    generated: List[int] = []
    finish = FinishReason.LENGTH
    for step in range(request.max_tokens):
        token = _pick(logits, step, request.temperature, rng)
        if token == EOS_ID:
            finish = FinishReason.STOP
            break
        generated.append(token)
        position = len(sequence) + step
        x = weights.token_embedding[token][None, :] + positions[position][None, :]
        hidden, _ = _run_layers(weights, x, position, cache)
        logits = hidden[-1] @ weights.head

    text = bytes(t for t in generated if t < BYTE_VOCAB).decode("utf-8", errors="replace")
    return GenerationResult(text=text, finish_reason=finish)


class ToyLanguageBackend(LanguageBackend):
    """Deterministic decoder over assembled embeddings."""

    kind = BackendKind.TOY
    request_kind = RequestKind.SEQUENCE

    def __init__(self, weights: ToyLMWeights, seed: int = 0):
        super().__init__()
        self.weights = weights
        self.seed = seed

    @property
    def model_id(self) -> str:
        return f"toylm-d{self.weights.dim}-l{len(self.weights.layers)}"

    @property
    def token_embedding(self) -> np.ndarray:
        return self.weights.token_embedding

    def forward(self, sequence: MultimodalSequence) -> ForwardTrace:
        """Debug hook: logits and attention matrices for every position."""
        return toy_forward(self.weights, sequence)

    async def _generate(self, request: GenerationRequest) -> GenerationResult:
        result = toy_generate(request, self.weights, self.seed)
        self.log_debug(f"ToyLM produced {len(result.text)} chars ({result.finish_reason.value})")
        return result
