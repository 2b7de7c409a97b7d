"""
PromptService - renders the two-phase rating prompt and looks up scale bands.
"""

import hashlib
from typing import Optional

from .base_service import BaseService
from ..exceptions import ConfigException, RangeException
from ..models.scoring import (
    BAND_BOUNDS,
    SCORE_MAX,
    SCORE_MIN,
    PhysicalProperty,
    PromptSpec,
    PropertyScores,
    ScaleBand,
)

CONTRACT_KEYS = ("OBJECT", "MATERIAL", "HARDNESS", "ELASTICITY", "ROUGHNESS")


def validate_spec(spec: PromptSpec) -> None:
    for name in ("goal", "phase1_instructions", "phase2_instructions", "output_contract"):
        if not getattr(spec, name).strip():
            raise ConfigException(f"prompt spec field {name} is empty")
    seen = [scale.property for scale in spec.scales]
    if sorted(p.value for p in seen) != sorted(p.value for p in PhysicalProperty):
        raise ConfigException(
            f"prompt spec needs exactly one scale per property, got {[p.value for p in seen]}"
        )
    for scale in spec.scales:
        bounds = tuple((band.lo, band.hi) for band in scale.bands)
        if bounds != BAND_BOUNDS:
            raise ConfigException(f"{scale.property.value} bands {bounds} do not partition 1..10 as {BAND_BOUNDS}")
        for band in scale.bands:
            if not band.characterization.strip():
                raise ConfigException(f"{scale.property.value} band {band.lo}-{band.hi} has no characterization")
    for key in CONTRACT_KEYS:
        if f"{key}:" not in spec.output_contract:
            raise ConfigException(f"output contract does not define the {key} line")


def scale_band(spec: PromptSpec, prop: PhysicalProperty, score: int) -> ScaleBand:
    if not SCORE_MIN <= score <= SCORE_MAX:
        raise RangeException(f"score {score} outside [{SCORE_MIN}, {SCORE_MAX}]")
    for scale in spec.scales:
        if scale.property is prop:
            for band in scale.bands:
                if band.contains(score):
                    return band
    raise ConfigException(f"no {prop.value} band covers {score}")


def scale_lookup(prop: PhysicalProperty, score: int, spec: Optional[PromptSpec] = None) -> str:
    """Characterization of the band containing score."""
    return scale_band(spec or PromptSpec.default(), prop, score).characterization


def render_contract(scores: PropertyScores) -> str:
    """PropertyScores written in the answer grammar, one line per key, values stripped."""
    lines = [f"OBJECT: {scores.object_name.strip()}", f"MATERIAL: {scores.material.strip()}"]
    for prop in PhysicalProperty:
        lines.append(f"{prop.label}: {scores.score(prop)} | {scores.rationales.get(prop, '').strip()}")
    return "\n".join(lines)


class PromptService(BaseService):
    """Builds prompts from a PromptSpec."""

    def __init__(self, spec: Optional[PromptSpec] = None):
        super().__init__()
        self.spec = spec or PromptSpec.default()
        validate_spec(self.spec)

    def build_prompt(self, object_hint: Optional[str] = None) -> str:
        return build_prompt(self.spec, object_hint)

    def checksum(self) -> str:
        """SHA-256 of the rendered prompt (no hint), used to pin the fixture wording."""
        return hashlib.sha256(self.build_prompt().encode("utf-8")).hexdigest()


def build_prompt(spec: PromptSpec, object_hint: Optional[str] = None) -> str:
    validate_spec(spec)
    sections = ["GOAL", spec.goal.strip()]
    if object_hint:
        sections.append(f"Hint: the object is probably a {object_hint.strip()}.")

    sections += ["", "PHASE 1 - VISUAL IDENTIFICATION", spec.phase1_instructions.strip()]
    sections += ["", "PHASE 2 - MATERIAL AND TACTILE EVALUATION", spec.phase2_instructions.strip()]

    sections += ["", "RATING SCALES (1-10)"]
    for prop in PhysicalProperty:
        scale = next(s for s in spec.scales if s.property is prop)
        sections.append(prop.label)
        for band in scale.bands:
            sections.append(f"  {band.lo}-{band.hi}: {band.characterization} (e.g. {band.examples})")

    if spec.constraints:
        sections += ["", "CONSTRAINTS"]
        sections += [f"- {constraint}" for constraint in spec.constraints]

    sections += ["", "Answer with exactly these five lines and nothing else:", spec.output_contract]
    return "\n".join(sections) + "\n"
