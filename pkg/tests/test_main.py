import json
import os
import sys

import pytest

# Add the project root to the path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from vital.exceptions import (
    ConfigException,
    DataException,
    FixtureException,
    InsufficientDataException,
    RetryExhaustedException,
    ServiceException,
    ValidationException,
)
from vital.main import build_parser, exit_code_for, main
from test_fixtures import canned_responses, dataset_dir, manifest_path


def write_config(tmp_path, script: dict, run_id: str = "cli", **backend) -> str:
    script_path = tmp_path / "script.json"
    script_path.write_text(json.dumps(script), encoding="utf-8")
    backend = {"kind": "scripted", "script_path": str(script_path), **backend}
    config_path = tmp_path / "run.json"
    config_path.write_text(json.dumps({"run_id": run_id, "output_dir": str(tmp_path / "out"), "backend": backend}),
                           encoding="utf-8")
    return str(config_path)


class TestExitCodes:
    """Test suite for error to exit-code mapping"""

    @pytest.mark.parametrize("error,code", [
        (ValidationException("bad line", line=2), 2),
        (ConfigException("bad config"), 2),
        (FixtureException("no canned text"), 3),
        (RetryExhaustedException("gave up", attempts=3), 3),
        (InsufficientDataException("too few", n=2), 4),
        (DataException("missing"), 1),
        (ServiceException("other"), 1),
    ])
    def test_mapping(self, error, code):
        assert exit_code_for(error) == code

    def test_command_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


class TestCommands:
    """Test suite for the command-line entry point"""

    def test_selftest(self, capsys):
        assert main(["selftest"]) == 0
        assert "8/8 checks passed" in capsys.readouterr().out

    def test_ingest(self, manifest_path, capsys):
        assert main(["ingest", "--manifest", str(manifest_path)]) == 0
        out = capsys.readouterr().out
        # 20 frames at 20 fps, one kept every 250 ms
        assert "sponge\tfoam\t20 frames -> 4 kept" in out
        assert "3 objects validated" in out

    def test_ingest_missing_manifest(self, tmp_path):
        assert main(["ingest", "--manifest", str(tmp_path / "absent.jsonl")]) == 2

    def test_prompt(self, capsys):
        assert main(["prompt", "--hint", "it squeaks"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("GOAL")
        assert "it squeaks" in out

    def test_prompt_object_needs_manifest(self):
        assert main(["prompt", "--object", "sponge"]) == 2

    def test_infer(self, tmp_path, manifest_path, canned_responses, capsys):
        config = write_config(tmp_path, canned_responses)
        assert main(["infer", "--manifest", str(manifest_path), "--object", "duck_toy", "--config", config]) == 0
        scores = json.loads(capsys.readouterr().out)
        assert (scores["hardness"], scores["elasticity"], scores["roughness"]) == (5, 5, 4)
        assert (tmp_path / "out" / "cli" / "duck_toy" / "scores.json").exists()

    def test_infer_unknown_object(self, tmp_path, manifest_path, canned_responses):
        config = write_config(tmp_path, canned_responses)
        assert main(["infer", "--manifest", str(manifest_path), "--object", "teapot", "--config", config]) == 2

    def test_infer_backend_failure(self, tmp_path, manifest_path, canned_responses):
        del canned_responses["brick"]
        config = write_config(tmp_path, canned_responses)
        assert main(["infer", "--manifest", str(manifest_path), "--object", "brick", "--config", config]) == 3

    def test_eval(self, tmp_path, manifest_path, canned_responses, capsys):
        config = write_config(tmp_path, canned_responses)
        assert main(["eval", "--manifest", str(manifest_path), "--config", config]) == 0
        assert "scripted:script" in capsys.readouterr().out
        for suffix in ("txt", "csv", "json"):
            assert (tmp_path / "out" / "cli" / f"report.{suffix}").exists()

    def test_eval_flags_override_config(self, tmp_path, manifest_path, canned_responses):
        config = write_config(tmp_path, canned_responses)
        other = tmp_path / "elsewhere"
        assert main(["eval", "--manifest", str(manifest_path), "--config", config, "--out", str(other)]) == 0
        assert (other / "cli" / "report.json").exists()

    def test_eval_without_script(self, tmp_path, manifest_path):
        assert main(["eval", "--manifest", str(manifest_path), "--backend", "scripted",
                     "--out", str(tmp_path / "out")]) == 2

    def test_eval_insufficient_data(self, tmp_path, manifest_path, canned_responses):
        canned_responses["sponge"] = "no contract here"
        config = write_config(tmp_path, canned_responses)
        assert main(["eval", "--manifest", str(manifest_path), "--config", config]) == 4

    def test_eval_rescore(self, tmp_path, manifest_path, canned_responses, capsys):
        config = write_config(tmp_path, canned_responses)
        assert main(["eval", "--manifest", str(manifest_path), "--config", config]) == 0
        first = capsys.readouterr().out
        # nothing scripted any more: only the saved scores can produce a report
        config = write_config(tmp_path, {})
        assert main(["eval", "--manifest", str(manifest_path), "--config", config, "--rescore"]) == 0
        assert capsys.readouterr().out == first

    def test_rescore_needs_saved_run(self, tmp_path, manifest_path):
        config = write_config(tmp_path, {})
        assert main(["eval", "--manifest", str(manifest_path), "--config", config, "--rescore"]) == 1

    def test_compare_runs(self, tmp_path, manifest_path, canned_responses, capsys):
        for run_id, modalities in (("fused", "vision_tactile"), ("vision", "vision")):
            config = write_config(tmp_path, canned_responses, run_id=run_id)
            assert main(["eval", "--manifest", str(manifest_path), "--config", config,
                         "--modalities", modalities]) == 0
        capsys.readouterr()
        assert main(["compare", "--out", str(tmp_path / "out"), "--runs", "fused", "vision"]) == 0
        out = capsys.readouterr().out
        assert "scripted:script (vision only)" in out
        assert len([line for line in out.splitlines() if line.startswith("hardness")]) == 2

    def test_compare_unknown_run(self, tmp_path):
        assert main(["compare", "--out", str(tmp_path), "--runs", "absent"]) == 1
