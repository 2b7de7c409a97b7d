"""
EvaluationService - Spearman rank correlation between model scores and
instrument measurements, with permutation p-values.

Ties get average ranks; rho is the Pearson correlation of the ranks.
p-values come from a two-sided permutation test over y: exhaustive for
small n, seeded Monte-Carlo with the +1/+1 correction otherwise. The
t-approximation is kept alongside as a diagnostic only.
"""

import itertools
import math
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.stats import rankdata
from scipy.stats import t as t_dist

from .base_service import BaseService
from ..exceptions import (
    ConfigException,
    DataException,
    DegenerateInputException,
    InputException,
    InsufficientDataException,
    ValidationException,
)
from ..models.evaluation import (
    CorrelationResult,
    GroundTruthRecord,
    MaterialCategory,
    PValueMethod,
    ScoreTable,
)
from ..models.scoring import PhysicalProperty
from ..utils.numerics import derive_seed, make_rng

EXACT_MAX_N = 8
EXACT_LIMIT_N = 10
MIN_JOINED = 3
DEFAULT_RESAMPLES = 200_000
TIE_TOLERANCE = 1e-12
PERMUTATION_CHUNK = 50_000
RESAMPLE_BATCH = 20_000
PROPERTY_SEED_BASE = 100

# properties whose instrument scale runs opposite to the rating scale
ABSOLUTE_RHO_PROPERTIES = frozenset({PhysicalProperty.ELASTICITY})

GROUND_TRUTH_COLUMNS = ("object_id", "material_category", "shore_hardness", "elastic_modulus_mpa", "roughness_ra_um")


def fractional_ranks(x: Sequence[float]) -> List[float]:
    """Ranks 1..n, tied values sharing the mean of their ordinal positions."""
    values = np.asarray(x, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise InputException("need a nonempty list to rank")
    return [float(r) for r in rankdata(values, method="average")]


def _centred_ranks(values: Sequence[float], name: str) -> np.ndarray:
    ranks = np.asarray(fractional_ranks(values))
    centred = ranks - ranks.mean()
    if not np.any(centred):
        raise DegenerateInputException(f"{name} has no rank variance (all values tied)")
    return centred


def _paired(x: Sequence[float], y: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    if len(x) != len(y):
        raise InputException(f"series lengths differ: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise InputException(f"need at least 2 pairs, got {len(x)}")
    return _centred_ranks(x, "x"), _centred_ranks(y, "y")


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    rx, ry = _paired(x, y)
    rho = float(np.dot(rx, ry) / math.sqrt(np.dot(rx, rx) * np.dot(ry, ry)))
    return max(-1.0, min(1.0, rho))


def spearman_closed_form(x: Sequence[float], y: Sequence[float]) -> float:
    """1 - 6 sum(d^2) / (n (n^2 - 1)); only valid without ties."""
    n = len(x)
    d = np.asarray(fractional_ranks(x)) - np.asarray(fractional_ranks(y))
    return 1.0 - 6.0 * float(np.dot(d, d)) / (n * (n * n - 1))


def min_max_normalize(values: Sequence[float]) -> List[float]:
    """Scale to [0, 1]; a constant series maps to zeros. Never changes ranks."""
    array = np.asarray(values, dtype=np.float64)
    if array.size == 0:
        return []
    low, high = array.min(), array.max()
    if high == low:
        return [0.0] * array.size
    return [float(v) for v in (array - low) / (high - low)]


def resolve_method(method: PValueMethod, n: int) -> PValueMethod:
    """auto picks exact up to EXACT_MAX_N; Monte-Carlo at small n is promoted to exact."""
    if method is PValueMethod.EXACT:
        if n > EXACT_LIMIT_N:
            raise ConfigException(f"exact permutation test refused for n={n} (limit {EXACT_LIMIT_N}, n! permutations)")
        return PValueMethod.EXACT
    return PValueMethod.EXACT if n <= EXACT_MAX_N else PValueMethod.MONTE_CARLO


def _permutation_batches(n: int) -> Iterable[np.ndarray]:
    permutations = itertools.permutations(range(n))
    while True:
        chunk = list(itertools.islice(permutations, PERMUTATION_CHUNK))
        if not chunk:
            return
        yield np.asarray(chunk, dtype=np.int64)


def exact_p_value(x: Sequence[float], y: Sequence[float]) -> float:
    """Share of all n! orderings of y whose |rho| reaches the observed |rho|."""
    rx, ry = _paired(x, y)
    n = rx.size
    if n > EXACT_LIMIT_N:
        raise ConfigException(f"exact permutation test refused for n={n} (limit {EXACT_LIMIT_N})")
    scale = math.sqrt(np.dot(rx, rx) * np.dot(ry, ry))
    observed = abs(float(np.dot(rx, ry)) / scale)
    hits = 0
    for batch in _permutation_batches(n):
        rhos = np.abs(ry[batch] @ rx) / scale
        hits += int(np.count_nonzero(rhos >= observed - TIE_TOLERANCE))
    return hits / math.factorial(n)


def monte_carlo_p_value(x: Sequence[float], y: Sequence[float], seed: int,
                        resamples: int = DEFAULT_RESAMPLES) -> float:
    """(hits + 1) / (resamples + 1) over seeded random shuffles of y."""
    if resamples < 1:
        raise ConfigException("need at least one resample")
    rx, ry = _paired(x, y)
    scale = math.sqrt(np.dot(rx, rx) * np.dot(ry, ry))
    observed = abs(float(np.dot(rx, ry)) / scale)
    rng = make_rng(seed)
    hits = 0
    remaining = resamples
    while remaining:
        size = min(RESAMPLE_BATCH, remaining)
        shuffled = rng.permuted(np.tile(ry, (size, 1)), axis=1)
        rhos = np.abs(shuffled @ rx) / scale
        hits += int(np.count_nonzero(rhos >= observed - TIE_TOLERANCE))
        remaining -= size
    return (hits + 1) / (resamples + 1)


def p_value(x: Sequence[float], y: Sequence[float], method: PValueMethod = PValueMethod.AUTO,
            seed: int = 0, resamples: int = DEFAULT_RESAMPLES) -> float:
    """Two-sided permutation p-value of Spearman's rho."""
    if resolve_method(method, len(x)) is PValueMethod.EXACT:
        return exact_p_value(x, y)
    return monte_carlo_p_value(x, y, seed, resamples)


def t_approx_p_value(rho: float, n: int) -> Optional[float]:
    """Student-t approximation with n - 2 degrees of freedom (diagnostic only)."""
    if n < 3:
        return None
    if abs(rho) >= 1.0:
        return 0.0
    t_stat = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    return float(2.0 * t_dist.sf(abs(t_stat), n - 2))


def property_seed(seed: int, prop: PhysicalProperty) -> int:
    """Private generator seed per property, independent of evaluation order."""
    return derive_seed(seed, PROPERTY_SEED_BASE + list(PhysicalProperty).index(prop))


def join_property(scores: ScoreTable, truth: Sequence[GroundTruthRecord],
                  prop: PhysicalProperty) -> Tuple[List[float], List[float]]:
    """(model scores, measurements) for the objects present in both tables."""
    by_id = {record.object_id: record for record in truth}
    model_values: List[float] = []
    measured: List[float] = []
    for object_id, object_scores in scores.rows:
        record = by_id.get(object_id)
        if record is None:
            continue
        measurement = record.measurement(prop)
        if measurement is None:
            raise DataException(f"{object_id} has no {prop.value} measurement")
        model_values.append(float(object_scores.score(prop)))
        measured.append(float(measurement))
    return model_values, measured


def evaluate_property(scores: ScoreTable, truth: Sequence[GroundTruthRecord], prop: PhysicalProperty,
                      method: PValueMethod = PValueMethod.AUTO, seed: int = 0,
                      resamples: int = DEFAULT_RESAMPLES) -> CorrelationResult:
    model_values, measured = join_property(scores, truth, prop)
    n = len(model_values)
    if n < MIN_JOINED:
        raise InsufficientDataException(
            f"only {n} scored object(s) match the ground truth for {prop.value}; need at least {MIN_JOINED}", n
        )
    for values, source in ((model_values, "model score"), (measured, "measurement")):
        if len(set(values)) < 2:
            raise DegenerateInputException(f"every {prop.value} {source} is {values[0]:g}; no rank variance")

    model_values = min_max_normalize(model_values)
    measured = min_max_normalize(measured)
    rho = spearman_rho(model_values, measured)
    used = resolve_method(method, n)
    seed_used = property_seed(seed, prop) if used is PValueMethod.MONTE_CARLO else None
    p = exact_p_value(model_values, measured) if used is PValueMethod.EXACT else \
        monte_carlo_p_value(model_values, measured, seed_used, resamples)
    rho_reported = abs(rho) if prop in ABSOLUTE_RHO_PROPERTIES else rho
    return CorrelationResult(
        property=prop,
        rho=rho,
        rho_reported=rho_reported,
        p_value=p,
        n=n,
        method=used,
        seed=seed_used,
        t_approx_p_value=t_approx_p_value(rho, n),
    )


def _optional_positive(value, column: str, line: int) -> Optional[float]:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return None
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ValidationException(f"{column} value {value!r} is not a number", line)
    if number <= 0:
        raise ValidationException(f"{column} must be positive, got {number}", line)
    return number


def parse_category(value: str, line: Optional[int] = None) -> MaterialCategory:
    try:
        return MaterialCategory(str(value).strip().lower())
    except ValueError:
        allowed = ", ".join(c.value for c in MaterialCategory)
        raise ValidationException(f"unknown material_category {value!r}; allowed: {allowed}", line)


def load_ground_truth_table(path: Union[str, Path]) -> List[GroundTruthRecord]:
    """Read the delimited ground-truth table (one row per object)."""
    path = Path(path)
    if not path.exists():
        raise ValidationException(f"ground-truth table not found: {path}")
    frame = pd.read_csv(path, sep=None, engine="python", dtype={"object_id": str, "material_category": str})
    missing = [c for c in GROUND_TRUTH_COLUMNS if c not in frame.columns]
    if missing:
        raise ValidationException(f"ground-truth table {path.name} lacks columns: {', '.join(missing)}", 1)

    records: List[GroundTruthRecord] = []
    seen = set()
    for offset, row in enumerate(frame.itertuples(index=False)):
        line = offset + 2  # header is line 1
        object_id = str(row.object_id).strip()
        if not object_id or object_id == "nan":
            raise ValidationException("object_id is empty", line)
        if object_id in seen:
            raise ValidationException(f"duplicate object_id {object_id!r}", line)
        seen.add(object_id)
        records.append(GroundTruthRecord(
            object_id=object_id,
            material_category=parse_category(row.material_category, line),
            shore_hardness=_optional_positive(row.shore_hardness, "shore_hardness", line),
            elastic_modulus=_optional_positive(row.elastic_modulus_mpa, "elastic_modulus_mpa", line),
            roughness_ra=_optional_positive(row.roughness_ra_um, "roughness_ra_um", line),
        ))
    return records


class EvaluationService(BaseService):
    """Evaluates every property and logs the outcome."""

    def __init__(self, method: PValueMethod = PValueMethod.AUTO, seed: int = 0,
                 resamples: int = DEFAULT_RESAMPLES):
        super().__init__()
        self.method = method
        self.seed = seed
        self.resamples = resamples

    def degenerate_result(self, scores: ScoreTable, truth: Sequence[GroundTruthRecord],
                          prop: PhysicalProperty, reason: str) -> CorrelationResult:
        n = len(join_property(scores, truth, prop)[0])
        return CorrelationResult(property=prop, rho=None, rho_reported=None, p_value=None, n=n,
                                 method=self.method, degenerate=reason)

    def evaluate(self, scores: ScoreTable, truth: Sequence[GroundTruthRecord]) -> Tuple[CorrelationResult, ...]:
        """One result per property; a tied property is reported as degenerate, not raised."""
        results = []
        for prop in PhysicalProperty:
            try:
                result = evaluate_property(scores, truth, prop, self.method, self.seed, self.resamples)
            except DegenerateInputException as e:
                self.log_warning(f"⚠️ {prop.value}: no correlation ({e})")
                results.append(self.degenerate_result(scores, truth, prop, str(e)))
                continue
            if self.method is PValueMethod.MONTE_CARLO and result.method is PValueMethod.EXACT:
                self.log_info(f"Monte-Carlo requested for {prop.value} at n={result.n}; used the exact test")
            self.log_info(
                f"📊 {prop.value}: rho={result.rho:.3f} reported={result.rho_reported:.3f} "
                f"p={result.p_value:.3g} n={result.n} ({result.method.value})"
            )
            results.append(result)
        return tuple(results)
