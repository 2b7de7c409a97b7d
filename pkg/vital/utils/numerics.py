"""
Numeric substrate: MLP forward pass, row softmax, sinusoidal positions,
seeded initialization and a finite-difference gradient check.

All functions are pure; arrays are float64.
"""

from typing import Sequence

import numpy as np

from ..exceptions import ConfigException, ShapeException
from ..models.network import Activation, Matrix, MlpLayer, MlpParams, Vector, as_matrix

DEFAULT_INIT_SCALE = 0.08
PE_BASE = 10000.0


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator; the same seed gives the same draws on every platform."""
    return np.random.Generator(np.random.PCG64(seed))


def _apply_layers(params: MlpParams, x: np.ndarray) -> np.ndarray:
    # x is [in] or [rows x in]
    h = x
    for layer in params.layers:
        h = h @ layer.weight.T + layer.bias
        if layer.activation is Activation.RELU:
            h = np.maximum(h, 0.0)
    return h


def mlp_forward(params: MlpParams, input: Sequence[float]) -> Vector:
    x = np.asarray(input, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != params.in_dim:
        raise ShapeException(f"MLP expects a vector of length {params.in_dim}, got shape {x.shape}")
    return _apply_layers(params, x)


def mlp_forward_rows(params: MlpParams, rows: np.ndarray) -> Matrix:
    """Apply the MLP to every row of a [n x in] matrix."""
    x = np.asarray(rows, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != params.in_dim:
        raise ShapeException(f"MLP expects rows of length {params.in_dim}, got shape {x.shape}")
    return _apply_layers(params, x)


def mlp_jvp(params: MlpParams, input: Sequence[float], direction: Sequence[float]) -> Vector:
    """Forward-mode directional derivative J(x) @ v."""
    h = np.asarray(input, dtype=np.float64)
    dh = np.asarray(direction, dtype=np.float64)
    if h.shape != (params.in_dim,) or dh.shape != (params.in_dim,):
        raise ShapeException(f"input and direction must both have length {params.in_dim}")
    for layer in params.layers:
        z = layer.weight @ h + layer.bias
        dz = layer.weight @ dh
        if layer.activation is Activation.RELU:
            active = z > 0.0
            h = np.where(active, z, 0.0)
            dh = np.where(active, dz, 0.0)
        else:
            h, dh = z, dz
    return dh


def finite_diff_check(params: MlpParams, input: Sequence[float], direction: Sequence[float],
                      h: float = 1e-5, eps: float = 1e-12) -> float:
    """Relative error between the analytic directional derivative and a central difference."""
    if h <= 0:
        raise ConfigException("finite-difference step must be positive")
    x = np.asarray(input, dtype=np.float64)
    v = np.asarray(direction, dtype=np.float64)
    if not np.any(v):
        raise ConfigException("finite-difference direction must be nonzero")

    analytic = mlp_jvp(params, x, v)
    central = (mlp_forward(params, x + h * v) - mlp_forward(params, x - h * v)) / (2.0 * h)
    return float(np.linalg.norm(analytic - central) / (np.linalg.norm(central) + eps))


def softmax_rows(m) -> Matrix:
    x = np.asarray(m, dtype=np.float64)
    if x.ndim != 2 or x.size == 0:
        raise ShapeException(f"softmax needs a nonempty 2-D matrix, got shape {x.shape}")
    shifted = x - x.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def sinusoidal_pe(positions: int, dim: int) -> Matrix:
    """Fixed sin/cos position table, entry (p, 2i) = sin(p / 10000^(2i/d))."""
    if dim <= 0 or dim % 2:
        raise ConfigException(f"positional encoding dimension must be even and positive, got {dim}")
    if positions < 1:
        raise ConfigException(f"need at least one position, got {positions}")
    pos = np.arange(positions, dtype=np.float64)[:, None]
    freq = PE_BASE ** (np.arange(0, dim, 2, dtype=np.float64) / dim)
    angles = pos / freq
    table = np.empty((positions, dim), dtype=np.float64)
    table[:, 0::2] = np.sin(angles)
    table[:, 1::2] = np.cos(angles)
    return table


def seeded_init(rng: np.random.Generator, rows: int, cols: int, scale: float = DEFAULT_INIT_SCALE) -> Matrix:
    if scale <= 0:
        raise ConfigException(f"init scale must be positive, got {scale}")
    return as_matrix(rng.uniform(-scale, scale, size=(rows, cols)))


def init_mlp(rng: np.random.Generator, dims: Sequence[int], activations: Sequence[Activation],
             scale: float = DEFAULT_INIT_SCALE) -> MlpParams:
    """Build a chained MLP: dims [in, h1, ..., out], one activation per layer."""
    if len(dims) < 2 or len(activations) != len(dims) - 1:
        raise ConfigException("need len(dims) - 1 activations and at least two dims")
    layers = []
    for fan_in, fan_out, activation in zip(dims, dims[1:], activations):
        weight = seeded_init(rng, fan_out, fan_in, scale)
        bias = seeded_init(rng, 1, fan_out, scale)[0]
        layers.append(MlpLayer(weight, bias, activation))
    return MlpParams(tuple(layers))


def derive_seed(seed: int, stream: int) -> int:
    """Independent child seed for a named stream (encoders, decoder, a property...)."""
    return int(np.random.SeedSequence([seed, stream]).generate_state(1)[0])
