import json
import os
import re
import sys
from pathlib import Path

import pytest

# Add the project root to the path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from vital.config.run_config import BackendSettings, RunConfig
from vital.exceptions import DataException, InsufficientDataException
from vital.models.evaluation import PValueMethod
from vital.models.generation import RequestKind
from vital.models.scoring import PhysicalProperty
from vital.services.file_storage_service import FileStorageService
from vital.services.manifest_service import load_manifest
from vital.services.pipeline_service import PipelineService, run_pipeline
from vital.services.report_service import ReportService, render_comparison
from vital.services.scripted_backend_service import ScriptedBackend
from test_fixtures import MockData, canned_responses, dataset_dir, manifest_path


def tree(root: Path) -> dict:
    """relative path -> bytes for every file under root"""
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def scripted_config(tmp_path: Path, **overrides) -> RunConfig:
    fields = dict(run_id="fixture", output_dir=str(tmp_path / "out"), backend=BackendSettings(kind="scripted"))
    fields.update(overrides)
    return RunConfig(**fields)


class TestScriptedPipeline:
    """End-to-end runs against canned responses"""

    @pytest.mark.asyncio
    async def test_rank_perfect_fixture(self, tmp_path, manifest_path, canned_responses):
        report = await run_pipeline(manifest_path, scripted_config(tmp_path), ScriptedBackend(canned_responses))

        for prop in PhysicalProperty:
            result = report.result(prop)
            assert result.rho_reported == 1.0
            assert result.n == 3
            assert result.method is PValueMethod.EXACT
        assert report.result(PhysicalProperty.ELASTICITY).rho == -1.0
        assert report.result(PhysicalProperty.HARDNESS).rho == 1.0
        assert report.format_compliance == 1.0
        assert report.failed_objects == ()
        assert report.dataset_id == "manifest"

    @pytest.mark.asyncio
    async def test_artifacts_persisted(self, tmp_path, manifest_path, canned_responses):
        await run_pipeline(manifest_path, scripted_config(tmp_path), ScriptedBackend(canned_responses))
        run_dir = tmp_path / "out" / "fixture"
        for object_id in MockData.OBJECTS:
            object_dir = run_dir / object_id
            assert (object_dir / "prompt.txt").read_text(encoding="utf-8").startswith("GOAL")
            assert (object_dir / "response.txt").read_text(encoding="utf-8") == canned_responses[object_id]
            scores = json.loads((object_dir / "scores.json").read_text(encoding="utf-8"))["data"]
            assert scores["scores"]["hardness"] == MockData.SCORES[object_id][0]
        for suffix in ("txt", "csv", "json"):
            assert (run_dir / f"report.{suffix}").exists()

    @pytest.mark.asyncio
    async def test_unparseable_response_leaves_too_few_objects(self, tmp_path, manifest_path, canned_responses):
        canned_responses["brick"] = "It is a brick. Hard, not elastic, rough."
        with pytest.raises(InsufficientDataException) as exc_info:
            await run_pipeline(manifest_path, scripted_config(tmp_path), ScriptedBackend(canned_responses))
        assert exc_info.value.n == 2

        failure = json.loads((tmp_path / "out" / "fixture" / "brick" / "failure.json").read_text(encoding="utf-8"))
        assert failure["data"]["stage"] == "parse"
        assert failure["data"]["error_type"] == "ParseException"

    @pytest.mark.asyncio
    async def test_tied_property_still_reported(self, tmp_path, manifest_path, canned_responses):
        for object_id in MockData.OBJECTS:
            canned_responses[object_id] = re.sub(r"ELASTICITY: \d+", "ELASTICITY: 5", canned_responses[object_id])
        report = await run_pipeline(manifest_path, scripted_config(tmp_path), ScriptedBackend(canned_responses))

        elasticity = report.result(PhysicalProperty.ELASTICITY)
        assert elasticity.rho is None
        assert elasticity.n == 3
        assert "no rank variance" in elasticity.degenerate
        assert report.result(PhysicalProperty.HARDNESS).rho == 1.0
        assert report.result(PhysicalProperty.ROUGHNESS).rho == 1.0
        text = (tmp_path / "out" / "fixture" / "report.txt").read_text(encoding="utf-8")
        assert "n/a" in text
        assert "elasticity: no correlation" in text

    @pytest.mark.asyncio
    async def test_corrupt_image_is_recorded(self, tmp_path, dataset_dir, manifest_path, canned_responses):
        (dataset_dir / "brick.png").write_bytes(b"not a png")
        with pytest.raises(InsufficientDataException) as exc_info:
            await run_pipeline(manifest_path, scripted_config(tmp_path), ScriptedBackend(canned_responses))
        assert exc_info.value.n == 2

        run_dir = tmp_path / "out" / "fixture"
        failure = json.loads((run_dir / "brick" / "failure.json").read_text(encoding="utf-8"))
        assert failure["data"]["stage"] == "encode"
        assert failure["data"]["error_type"] == "InputException"
        assert (run_dir / "sponge" / "scores.json").exists()

    @pytest.mark.asyncio
    async def test_corrupt_frame_stack_is_recorded(self, tmp_path, dataset_dir, manifest_path, canned_responses):
        (dataset_dir / "duck_toy.npy").write_bytes(b"not a stack")
        pipeline = PipelineService(scripted_config(tmp_path), ScriptedBackend(canned_responses))
        outcomes = await pipeline.process_all(load_manifest(manifest_path))

        assert outcomes[1].error.startswith("InputException")
        assert outcomes[0].parsed is not None
        assert outcomes[2].parsed is not None

    @pytest.mark.asyncio
    async def test_failing_object_does_not_touch_others(self, tmp_path, manifest_path, canned_responses):
        entries = load_manifest(manifest_path)
        del canned_responses["duck_toy"]
        pipeline = PipelineService(scripted_config(tmp_path), ScriptedBackend(canned_responses))
        outcomes = await pipeline.process_all(entries)

        assert [o.object_id for o in outcomes] == ["sponge", "duck_toy", "brick"]
        assert outcomes[1].error.startswith("FixtureException")
        assert not outcomes[1].parse_attempted
        run_dir = tmp_path / "out" / "fixture"
        assert (run_dir / "duck_toy" / "failure.json").exists()
        assert not (run_dir / "duck_toy" / "scores.json").exists()
        assert (run_dir / "sponge" / "scores.json").exists()
        assert (run_dir / "brick" / "scores.json").exists()

    @pytest.mark.asyncio
    async def test_lenient_compliance(self, tmp_path, manifest_path, canned_responses):
        canned_responses["duck_toy"] = canned_responses["duck_toy"].replace("MATERIAL:", "Material:")
        config = scripted_config(tmp_path, parse_mode="lenient")
        report = await run_pipeline(manifest_path, config, ScriptedBackend(canned_responses))
        assert report.format_compliance == pytest.approx(2 / 3)
        assert report.result(PhysicalProperty.ROUGHNESS).rho_reported == 1.0

    @pytest.mark.asyncio
    async def test_rerun_replaces_stale_artifacts(self, tmp_path, manifest_path, canned_responses):
        config = scripted_config(tmp_path)
        broken = dict(canned_responses, sponge="nothing useful")
        with pytest.raises(InsufficientDataException):
            await run_pipeline(manifest_path, config, ScriptedBackend(broken))
        await run_pipeline(manifest_path, config, ScriptedBackend(canned_responses))
        sponge_dir = tmp_path / "out" / "fixture" / "sponge"
        assert not (sponge_dir / "failure.json").exists()
        assert (sponge_dir / "scores.json").exists()

    def test_messages_carry_image_and_frames(self, tmp_path, manifest_path, canned_responses):
        pipeline = PipelineService(scripted_config(tmp_path), ScriptedBackend(canned_responses))
        entry = load_manifest(manifest_path)[0]
        request = pipeline.build_request(entry, "rate it")
        assert request.kind is RequestKind.MESSAGES
        assert request.object_id == "sponge"
        parts = request.messages[0].parts
        # camera image plus 20 frames at 20 fps sampled every 250 ms
        images = [p for p in parts if hasattr(p, "data")]
        assert len(images) == 1 + 4
        assert parts[-1].text == "rate it"

    @pytest.mark.parametrize("modalities,images", [("vision", 1), ("tactile", 4), ("vision_tactile", 5)])
    def test_messages_follow_modalities(self, tmp_path, manifest_path, canned_responses, modalities, images):
        config = scripted_config(tmp_path, modalities=modalities)
        pipeline = PipelineService(config, ScriptedBackend(canned_responses))
        parts = pipeline.build_request(load_manifest(manifest_path)[0], "rate it").messages[0].parts
        texts = [p.text for p in parts if hasattr(p, "text")]
        assert len([p for p in parts if hasattr(p, "data")]) == images
        assert any("Camera" in t for t in texts) == (modalities != "tactile")
        assert any("Tactile" in t for t in texts) == (modalities != "vision")

    @pytest.mark.asyncio
    async def test_single_modality_runs_compare(self, tmp_path, manifest_path, canned_responses):
        for modalities in ("vision_tactile", "vision"):
            config = scripted_config(tmp_path, run_id=modalities, modalities=modalities)
            await run_pipeline(manifest_path, config, ScriptedBackend(canned_responses))

        reports = ReportService(FileStorageService(str(tmp_path / "out")))
        fused, vision = reports.load("vision_tactile"), reports.load("vision")
        assert fused.model_id == "scripted"
        assert vision.model_id == "scripted (vision only)"
        assert vision.result(PhysicalProperty.HARDNESS).rho == 1.0

        rows = render_comparison([fused, vision]).splitlines()[2:]
        assert len(rows) == 6
        assert rows[1].startswith("hardness    scripted (vision only)")

    @pytest.mark.asyncio
    async def test_rescore_reads_saved_scores(self, tmp_path, manifest_path, canned_responses):
        canned_responses["brick"] = "It is a brick."
        config = scripted_config(tmp_path)
        entries = load_manifest(manifest_path)
        pipeline = PipelineService(config, ScriptedBackend(canned_responses))
        outcomes = await pipeline.process_all(entries)
        assert outcomes[2].error is not None

        # an empty script fails any generate call, so scores must come from disk
        saved = PipelineService(config, ScriptedBackend({})).load_saved(entries)
        assert [o.parsed is not None for o in saved] == [True, True, False]
        assert saved[0].parsed.scores == MockData.scores_for("sponge")
        assert saved[2].error.startswith("ParseException")
        assert saved[2].parse_attempted

    @pytest.mark.asyncio
    async def test_rescore_matches_original_report(self, tmp_path, manifest_path, canned_responses):
        config = scripted_config(tmp_path)
        first = await run_pipeline(manifest_path, config, ScriptedBackend(canned_responses))
        again = PipelineService(config, ScriptedBackend({})).rescore(load_manifest(manifest_path), "manifest")
        assert again == first

    def test_rescore_without_saved_run(self, tmp_path, manifest_path):
        pipeline = PipelineService(scripted_config(tmp_path, run_id="never-ran"), ScriptedBackend({}))
        with pytest.raises(DataException):
            pipeline.rescore(load_manifest(manifest_path))


class TestToyPipeline:
    """End-to-end runs through the toy decoder"""

    def toy_config(self, out: Path) -> RunConfig:
        return RunConfig(run_id="toy", seed=11, dim=16, grid=2, hidden_dim=8, parallelism=2,
                         output_dir=str(out), backend=BackendSettings(kind="toy", max_tokens=8))

    async def run_once(self, manifest: Path, out: Path) -> str:
        try:
            report = await run_pipeline(manifest, self.toy_config(out))
        except InsufficientDataException as e:
            return f"insufficient: {e}"
        return f"report: {report}"

    @pytest.mark.asyncio
    async def test_runs_are_byte_identical(self, tmp_path, manifest_path):
        first = await self.run_once(manifest_path, tmp_path / "first")
        second = await self.run_once(manifest_path, tmp_path / "second")
        assert first == second

        first_tree = tree(tmp_path / "first")
        assert first_tree == tree(tmp_path / "second")
        for object_id in MockData.OBJECTS:
            assert f"toy/{object_id}/prompt.txt" in first_tree
            assert f"toy/{object_id}/response.txt" in first_tree

    def test_assembled_sequence_layout(self, tmp_path, manifest_path):
        pipeline = PipelineService(self.toy_config(tmp_path / "out"))
        entry = load_manifest(manifest_path)[0]
        request = pipeline.build_request(entry, "rate it")
        sequence = request.sequence
        assert request.kind is RequestKind.SEQUENCE
        spans = sequence.spans()
        assert spans["vision"][1] - spans["vision"][0] == 4
        assert spans["tactile"][1] - spans["tactile"][0] == 4
        prefix = len("USER: ")
        suffix = len("rate it\nASSISTANT:")
        assert len(sequence) == prefix + suffix + 4 + 4 + 4
        assert spans["vision"][0] == prefix + 1

    def test_vision_only_sequence_has_no_tactile_span(self, tmp_path, manifest_path):
        config = self.toy_config(tmp_path / "out").model_copy(update={"modalities": "vision"})
        pipeline = PipelineService(config)
        sequence = pipeline.build_request(load_manifest(manifest_path)[0], "rate it").sequence
        spans = sequence.spans()
        assert set(spans) == {"vision"}
        assert spans["vision"][1] - spans["vision"][0] == 4
        assert len(sequence) == len("USER: ") + len("rate it\nASSISTANT:") + 4 + 2

    def test_boundary_tokens_built_once(self, tmp_path):
        pipeline = PipelineService(self.toy_config(tmp_path / "out"))
        tokens = pipeline.boundary_tokens()
        assert tokens is pipeline.boundary_tokens()
        assert tokens.dim == 16

    def test_storage_is_shared(self, tmp_path):
        storage = FileStorageService(str(tmp_path / "shared"))
        pipeline = PipelineService(self.toy_config(tmp_path / "out"), storage=storage)
        assert pipeline.storage is storage
