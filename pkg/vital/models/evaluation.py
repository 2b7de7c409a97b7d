from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from .scoring import PhysicalProperty, PropertyScores
from ..exceptions import DataException


class MaterialCategory(Enum):
    PLASTIC = "plastic"
    RUBBER = "rubber"
    METAL = "metal"
    WOOD = "wood"
    CERAMIC = "ceramic"
    GLASS = "glass"
    FOAM = "foam"
    PAPER = "paper"
    TEXTILE = "textile"


class PValueMethod(Enum):
    AUTO = "auto"
    EXACT = "exact"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class GroundTruthRecord:
    object_id: str
    material_category: MaterialCategory
    shore_hardness: Optional[float] = None  # Shore units
    elastic_modulus: Optional[float] = None  # MPa
    roughness_ra: Optional[float] = None  # micrometres

    def measurement(self, prop: PhysicalProperty) -> Optional[float]:
        return {
            PhysicalProperty.HARDNESS: self.shore_hardness,
            PhysicalProperty.ELASTICITY: self.elastic_modulus,
            PhysicalProperty.ROUGHNESS: self.roughness_ra,
        }[prop]


@dataclass
class ScoreTable:
    rows: List[Tuple[str, PropertyScores]] = field(default_factory=list)

    def add(self, object_id: str, scores: PropertyScores) -> None:
        if any(existing == object_id for existing, _ in self.rows):
            raise DataException(f"object {object_id} already scored")
        self.rows.append((object_id, scores))

    def object_ids(self) -> List[str]:
        return [object_id for object_id, _ in self.rows]


@dataclass(frozen=True)
class CorrelationResult:
    """rho, rho_reported and p_value are None when the property is degenerate."""
    property: PhysicalProperty
    rho: Optional[float]
    rho_reported: Optional[float]
    p_value: Optional[float]
    n: int
    method: PValueMethod
    seed: Optional[int] = None
    t_approx_p_value: Optional[float] = None
    degenerate: Optional[str] = None  # why no correlation could be computed


@dataclass(frozen=True)
class CorrelationReport:
    results: Tuple[CorrelationResult, ...]
    dataset_id: str
    model_id: str
    format_compliance: float = 1.0
    attempted: int = 0
    failed_objects: Tuple[str, ...] = ()

    def result(self, prop: PhysicalProperty) -> CorrelationResult:
        for result in self.results:
            if result.property is prop:
                return result
        raise KeyError(prop)
