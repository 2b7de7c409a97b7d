import json
import os
import sys

import pytest

# Add the project root to the path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from vital.exceptions import ConfigException, RangeException
from vital.models.scoring import PhysicalProperty, PromptSpec
from vital.services.prompt_service import PromptService, build_prompt, scale_lookup, validate_spec

BAND_LABELS = {
    PhysicalProperty.HARDNESS: ["Extremely soft", "Soft", "Medium", "Hard", "Extremely hard"],
    PhysicalProperty.ELASTICITY: ["Minimal elasticity", "Low elasticity", "Medium elasticity",
                                  "High elasticity", "Maximum elasticity"],
    PhysicalProperty.ROUGHNESS: ["Extremely smooth", "Smooth", "Medium texture", "Rough", "Extremely rough"],
}


class TestPromptSpec:
    """Test suite for the shipped prompt spec"""

    def test_default_spec_is_valid(self):
        spec = PromptSpec.default()
        validate_spec(spec)
        assert spec.version == "1"
        assert len(spec.scales) == 3

    def test_dict_round_trip(self):
        spec = PromptSpec.default()
        assert PromptSpec.from_dict(spec.to_dict()) == spec

    def test_missing_field(self):
        data = PromptSpec.default().to_dict()
        del data["goal"]
        with pytest.raises(ConfigException):
            PromptSpec.from_dict(data)

    def test_unknown_property(self):
        data = PromptSpec.default().to_dict()
        data["scales"][0]["property"] = "stickiness"
        with pytest.raises(ConfigException):
            PromptSpec.from_dict(data)

    def test_from_file(self, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(PromptSpec.default().to_dict()), encoding="utf-8")
        assert PromptSpec.from_file(path) == PromptSpec.default()

    def test_bands_must_partition_scale(self):
        data = PromptSpec.default().to_dict()
        data["scales"][1]["bands"][0]["hi"] = 3
        with pytest.raises(ConfigException):
            validate_spec(PromptSpec.from_dict(data))


class TestBuildPrompt:
    """Test suite for prompt rendering"""

    @pytest.fixture
    def spec(self):
        return PromptSpec.default()

    def test_contains_output_contract(self, spec):
        assert "ROUGHNESS: <1-10>" in build_prompt(spec)

    def test_contains_rating_bands(self, spec):
        prompt = build_prompt(spec)
        assert "Extremely soft" in prompt
        assert "Cotton, sponge" in prompt

    def test_phases_in_order(self, spec):
        prompt = build_prompt(spec)
        assert prompt.index("PHASE 1") < prompt.index("PHASE 2") < prompt.index("RATING SCALES")
        assert prompt.rstrip().endswith("ROUGHNESS: <1-10> | <rationale>")

    def test_extra_constraint_appears_once(self, spec):
        prompt = build_prompt(spec.with_constraints("use the full score range"))
        assert prompt.count("use the full score range") == 1

    def test_object_hint(self, spec):
        assert "Hint: the object is probably a rubber duck." in build_prompt(spec, "rubber duck")
        assert "Hint:" not in build_prompt(spec)

    def test_invalid_spec(self, spec):
        broken = PromptSpec("", spec.phase1_instructions, spec.phase2_instructions, spec.scales,
                            spec.constraints, spec.output_contract)
        with pytest.raises(ConfigException):
            build_prompt(broken)

    def test_checksum_is_stable(self, spec):
        assert PromptService(spec).checksum() == PromptService(PromptSpec.default()).checksum()
        assert PromptService(spec.with_constraints("extra")).checksum() != PromptService(spec).checksum()


class TestScaleLookup:
    """Test suite for rating band lookup"""

    def test_reference_labels(self):
        assert scale_lookup(PhysicalProperty.HARDNESS, 9) == "Extremely hard"
        assert scale_lookup(PhysicalProperty.ROUGHNESS, 1) == "Extremely smooth"
        assert scale_lookup(PhysicalProperty.ELASTICITY, 5) == "Medium elasticity"

    def test_all_fifteen_bands(self):
        for prop, labels in BAND_LABELS.items():
            for band, label in enumerate(labels):
                assert scale_lookup(prop, 2 * band + 1) == label
                assert scale_lookup(prop, 2 * band + 2) == label

    @pytest.mark.parametrize("score", [0, 11, -3])
    def test_out_of_range(self, score):
        with pytest.raises(RangeException):
            scale_lookup(PhysicalProperty.HARDNESS, score)
