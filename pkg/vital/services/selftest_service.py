"""
SelftestService - numeric and statistical oracle checks runnable from the CLI.
"""

from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from .base_service import BaseService
from .evaluation_service import exact_p_value, spearman_closed_form, spearman_rho
from .ingest_service import sample_frame_indices, synthetic_timestamps
from .prompt_service import render_contract
from .response_parser_service import parse_strict
from ..models.network import Activation
from ..models.scoring import PhysicalProperty, PropertyScores
from ..utils.numerics import finite_diff_check, init_mlp, make_rng, mlp_forward, sinusoidal_pe, softmax_rows

GRADIENT_TOLERANCE = 1e-5


@dataclass(frozen=True)
class SelftestResult:
    name: str
    passed: bool
    detail: str = ""


def _naive_matvec(weight: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.zeros(weight.shape[0])
    for i in range(weight.shape[0]):
        for j in range(weight.shape[1]):
            out[i] += weight[i, j] * x[j]
    return out


def check_mlp_forward() -> Tuple[bool, str]:
    rng = make_rng(7)
    params = init_mlp(rng, [5, 4, 3], [Activation.RELU, Activation.IDENTITY])
    x = rng.uniform(-1, 1, size=5)
    h = x
    for layer in params.layers:
        h = _naive_matvec(layer.weight, h) + layer.bias
        if layer.activation is Activation.RELU:
            h = np.maximum(h, 0.0)
    error = float(np.max(np.abs(mlp_forward(params, x) - h)))
    return error < 1e-12, f"max abs error {error:.2e}"


def check_softmax() -> Tuple[bool, str]:
    m = make_rng(3).normal(size=(6, 9)) * 50
    sums = softmax_rows(m).sum(axis=1)
    error = float(np.max(np.abs(sums - 1.0)))
    return error < 1e-12, f"row-sum error {error:.2e}"


def check_positions() -> Tuple[bool, str]:
    table = sinusoidal_pe(2, 4)
    row0_ok = np.array_equal(table[0], np.array([0.0, 1.0, 0.0, 1.0]))
    expected = np.array([0.841471, 0.540302, 0.010000, 0.999950])
    row1_ok = bool(np.max(np.abs(table[1] - expected)) < 1e-5)
    return row0_ok and row1_ok, "row 0 and pos=1, d=4 reference values"


def check_gradients() -> Tuple[bool, str]:
    worst = 0.0
    for seed in range(50):
        rng = make_rng(seed)
        params = init_mlp(rng, [6, 5, 4], [Activation.IDENTITY, Activation.IDENTITY], scale=0.5)
        x = rng.normal(size=6)
        v = rng.normal(size=6)
        worst = max(worst, finite_diff_check(params, x, v, h=1e-5))
    return worst < GRADIENT_TOLERANCE, f"worst relative error {worst:.2e} over 50 networks"


def check_spearman_closed_form() -> Tuple[bool, str]:
    rng = make_rng(11)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(3, 36))
        x = rng.permutation(n).astype(float)
        y = rng.permutation(n).astype(float)
        worst = max(worst, abs(spearman_rho(x, y) - spearman_closed_form(x, y)))
    return worst < 1e-12, f"worst disagreement {worst:.2e}"


def check_exact_p() -> Tuple[bool, str]:
    p3 = exact_p_value([1, 2, 3], [1, 2, 3])
    p4 = exact_p_value([1, 2, 3, 4], [1, 2, 3, 4])
    return p3 == 2 / 6 and p4 == 2 / 24, f"n=3 -> {p3:.6f}, n=4 -> {p4:.6f}"


def check_frame_sampling() -> Tuple[bool, str]:
    indices = sample_frame_indices(synthetic_timestamps(20, 6000), 250)
    return indices == list(range(0, 120, 5)), f"{len(indices)} frames kept"


def check_contract_round_trip() -> Tuple[bool, str]:
    rng = make_rng(5)
    for _ in range(100):
        h, e, r = (int(v) for v in rng.integers(1, 11, size=3))
        scores = PropertyScores("sample object", "rubber", h, e, r,
                                {p: f"reason {p.value}" for p in PhysicalProperty})
        if parse_strict(render_contract(scores)) != scores:
            return False, f"round trip failed for {(h, e, r)}"
    return True, "100 score triples"


CHECKS: Tuple[Tuple[str, Callable[[], Tuple[bool, str]]], ...] = (
    ("mlp_forward matches naive loops", check_mlp_forward),
    ("softmax rows sum to one", check_softmax),
    ("sinusoidal positions reference values", check_positions),
    ("finite-difference gradient check", check_gradients),
    ("spearman equals tie-free closed form", check_spearman_closed_form),
    ("exact permutation p-values", check_exact_p),
    ("20 fps / 250 ms frame sampling", check_frame_sampling),
    ("answer contract round trip", check_contract_round_trip),
)


class SelftestService(BaseService):
    def run(self) -> List[SelftestResult]:
        results = []
        for name, check in CHECKS:
            try:
                passed, detail = check()
            except Exception as e:
                passed, detail = False, f"{e.__class__.__name__}: {e}"
            results.append(SelftestResult(name, passed, detail))
            if passed:
                self.log_info(f"✅ {name}: {detail}")
            else:
                self.log_error(f"❌ {name}: {detail}")
        return results
