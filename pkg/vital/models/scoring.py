"""
Scoring models - rating scales, prompt spec and parsed property scores.
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Tuple

from ..exceptions import ConfigException, DataException

DEFAULT_PROMPT_SPEC_PATH = Path(__file__).resolve().parent.parent / "config" / "default_prompt_spec.json"


class PhysicalProperty(Enum):
    HARDNESS = "hardness"
    ELASTICITY = "elasticity"
    ROUGHNESS = "roughness"

    @property
    def label(self) -> str:
        return self.value.upper()


class ParseMode(Enum):
    STRICT = "strict"
    LENIENT = "lenient"


SCORE_MIN = 1
SCORE_MAX = 10
BAND_BOUNDS = ((1, 2), (3, 4), (5, 6), (7, 8), (9, 10))


@dataclass(frozen=True)
class ScaleBand:
    lo: int
    hi: int
    characterization: str
    examples: str

    def contains(self, score: int) -> bool:
        return self.lo <= score <= self.hi


@dataclass(frozen=True)
class RatingScale:
    property: PhysicalProperty
    bands: Tuple[ScaleBand, ...]


@dataclass(frozen=True)
class PromptSpec:
    goal: str
    phase1_instructions: str
    phase2_instructions: str
    scales: Tuple[RatingScale, ...]
    constraints: Tuple[str, ...]
    output_contract: str
    version: str = "1"

    @classmethod
    def default(cls) -> "PromptSpec":
        """The shipped, versioned prompt fixture."""
        return cls.from_file(DEFAULT_PROMPT_SPEC_PATH)

    @classmethod
    def from_file(cls, path) -> "PromptSpec":
        path = Path(path)
        if not path.exists():
            raise ConfigException(f"prompt spec not found: {path}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigException(f"prompt spec {path} is not valid JSON: {e}") from e
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PromptSpec":
        try:
            scales = tuple(
                RatingScale(
                    property=PhysicalProperty(scale["property"]),
                    bands=tuple(
                        ScaleBand(int(b["lo"]), int(b["hi"]), str(b["characterization"]), str(b["examples"]))
                        for b in scale["bands"]
                    ),
                )
                for scale in data["scales"]
            )
            return cls(
                goal=str(data["goal"]),
                phase1_instructions=str(data["phase1_instructions"]),
                phase2_instructions=str(data["phase2_instructions"]),
                scales=scales,
                constraints=tuple(str(c) for c in data.get("constraints", ())),
                output_contract=str(data["output_contract"]),
                version=str(data.get("version", "1")),
            )
        except KeyError as e:
            raise ConfigException(f"prompt spec is missing field {e}") from e
        except (TypeError, ValueError) as e:
            raise ConfigException(f"prompt spec is malformed: {e}") from e

    def to_dict(self) -> Dict[str, Any]:
        return {
            "version": self.version,
            "goal": self.goal,
            "phase1_instructions": self.phase1_instructions,
            "phase2_instructions": self.phase2_instructions,
            "scales": [
                {
                    "property": scale.property.value,
                    "bands": [
                        {"lo": b.lo, "hi": b.hi, "characterization": b.characterization, "examples": b.examples}
                        for b in scale.bands
                    ],
                }
                for scale in self.scales
            ],
            "constraints": list(self.constraints),
            "output_contract": self.output_contract,
        }

    def with_constraints(self, *extra: str) -> "PromptSpec":
        return PromptSpec(self.goal, self.phase1_instructions, self.phase2_instructions, self.scales,
                          self.constraints + tuple(extra), self.output_contract, self.version)


@dataclass
class PropertyScores:
    object_name: str
    material: str
    hardness: int
    elasticity: int
    roughness: int
    rationales: Dict[PhysicalProperty, str] = field(default_factory=dict)

    def score(self, prop: PhysicalProperty) -> int:
        return getattr(self, prop.value)

    def to_dict(self) -> dict:
        return {
            "object_name": self.object_name,
            "material": self.material,
            "hardness": self.hardness,
            "elasticity": self.elasticity,
            "roughness": self.roughness,
            "rationales": {p.value: self.rationales.get(p, "") for p in PhysicalProperty},
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PropertyScores":
        """Inverse of to_dict; empty rationales are dropped."""
        try:
            rationales = {p: data["rationales"][p.value] for p in PhysicalProperty
                          if data.get("rationales", {}).get(p.value)}
            return cls(
                object_name=data["object_name"],
                material=data["material"],
                hardness=int(data["hardness"]),
                elasticity=int(data["elasticity"]),
                roughness=int(data["roughness"]),
                rationales=rationales,
            )
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            raise DataException(f"saved scores are malformed: {e!r}") from e


@dataclass
class ParsedResponse:
    scores: PropertyScores
    mode: ParseMode
    warnings: List[str] = field(default_factory=list)

    @property
    def compliant(self) -> bool:
        return not self.warnings
