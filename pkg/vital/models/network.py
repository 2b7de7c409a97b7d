"""
Network parameter models - dense layers chained into small MLPs.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
from numpy.typing import NDArray

from ..exceptions import ShapeException

# Dense row-major float64 matrix; the carrier for every feature array.
Matrix = NDArray[np.float64]
Vector = NDArray[np.float64]


class Activation(Enum):
    RELU = "relu"
    IDENTITY = "identity"


def as_matrix(data, name: str = "matrix") -> Matrix:
    """Coerce to a read-only 2-D float64 array, rejecting non-finite entries."""
    array = np.array(data, dtype=np.float64)
    if array.ndim != 2:
        raise ShapeException(f"{name} must be 2-D, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ShapeException(f"{name} contains NaN or Inf")
    array.setflags(write=False)
    return array


def as_vector(data, name: str = "vector") -> Vector:
    array = np.array(data, dtype=np.float64)
    if array.ndim != 1:
        raise ShapeException(f"{name} must be 1-D, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ShapeException(f"{name} contains NaN or Inf")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class MlpLayer:
    """One dense layer: activation(weight @ x + bias), weight is [out x in]."""
    weight: Matrix
    bias: Vector
    activation: Activation = Activation.IDENTITY

    def __post_init__(self):
        object.__setattr__(self, "weight", as_matrix(self.weight, "weight"))
        object.__setattr__(self, "bias", as_vector(self.bias, "bias"))
        if self.bias.shape[0] != self.weight.shape[0]:
            raise ShapeException(
                f"bias length {self.bias.shape[0]} does not match weight rows {self.weight.shape[0]}"
            )

    @property
    def in_dim(self) -> int:
        return self.weight.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weight.shape[0]


@dataclass(frozen=True, eq=False)
class MlpParams:
    layers: Tuple[MlpLayer, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ShapeException("an MLP needs at least one layer")
        for k, (current, following) in enumerate(zip(layers, layers[1:])):
            if current.out_dim != following.in_dim:
                raise ShapeException(
                    f"layer {k} outputs {current.out_dim} values but layer {k + 1} expects {following.in_dim}"
                )
        object.__setattr__(self, "layers", layers)

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.layers[-1].out_dim
