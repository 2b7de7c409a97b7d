import json
import os
import sys

import pytest

# Add the project root to the path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from vital.config.run_config import BackendKind, RunConfig, build_run_config, load_run_config
from vital.config.settings import Settings
from vital.exceptions import ConfigException


class TestRunConfig:
    """Test suite for the run configuration file"""

    def test_empty_config_is_valid(self):
        config = build_run_config({})
        assert config.dim == 64
        assert config.grid == 4
        assert config.stride_ms == 250
        assert config.backend.kind is BackendKind.TOY
        assert config.backend.retry.max_attempts == 3
        assert config.layout == ["text_prefix", "vision", "tactile", "text_suffix"]
        assert config.modalities == "vision_tactile"

    def test_default_run_id(self):
        assert RunConfig(seed=7).effective_run_id() == "toy-seed7"
        assert RunConfig(run_id="named").effective_run_id() == "named"

    @pytest.mark.parametrize("data", [
        {"dim": 5},
        {"grid": 0},
        {"parse_mode": "sloppy"},
        {"p_value_method": "bootstrap"},
        {"modalities": "audio"},
        {"backend": {"kind": "cloud"}},
        {"backend": {"retry": {"multiplier": 1.0}}},
        {"unexpected": True},
    ])
    def test_invalid_values(self, data):
        with pytest.raises(ConfigException):
            build_run_config(data)

    def test_parse_mode_follows_backend(self):
        assert RunConfig().effective_parse_mode() == "strict"
        remote = RunConfig().with_overrides(backend_kind="remote")
        assert remote.backend.kind is BackendKind.REMOTE
        assert remote.effective_parse_mode() == "lenient"
        assert remote.with_overrides(parse_mode="strict").effective_parse_mode() == "strict"

    def test_overrides_ignore_none(self):
        config = RunConfig(seed=3, grid=2)
        updated = config.with_overrides(seed=None, grid=8, backend_kind=None)
        assert updated.seed == 3
        assert updated.grid == 8
        assert config.grid == 2

    def test_modalities_override(self):
        assert RunConfig().with_overrides(modalities="tactile").modalities == "tactile"

    def test_invalid_override(self):
        with pytest.raises(ConfigException):
            RunConfig().with_overrides(dim=3)

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"seed": 42, "backend": {"kind": "scripted", "script_path": "s.json"}}),
                        encoding="utf-8")
        config = load_run_config(str(path))
        assert config.seed == 42
        assert config.backend.script_path == "s.json"

    def test_no_path_means_defaults(self):
        assert load_run_config(None).seed == 0

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigException):
            load_run_config(str(tmp_path / "absent.json"))

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{seed: 1", encoding="utf-8")
        with pytest.raises(ConfigException):
            load_run_config(str(path))


class TestSettings:
    """Test suite for environment settings"""

    def test_environment_values(self, monkeypatch):
        monkeypatch.setenv("VITAL_REMOTE_URL", "https://vlm.example.com/v1/generate")
        monkeypatch.setenv("VITAL_REMOTE_TIMEOUT_S", "12.5")
        monkeypatch.setenv("VITAL_LOG_LEVEL", "debug")
        settings = Settings()
        assert settings.remote_timeout_s == 12.5
        assert settings.log_level == "DEBUG"
        assert settings.remote_url == "https://vlm.example.com/v1/generate"

    def test_defaults(self, monkeypatch):
        for name in ("VITAL_REMOTE_URL", "VITAL_REMOTE_MODEL", "VITAL_REMOTE_TIMEOUT_S", "VITAL_OUTPUT_DIR"):
            monkeypatch.delenv(name, raising=False)
        settings = Settings()
        assert settings.remote_url is None
        assert settings.remote_model == "remote-vlm"
        assert settings.remote_timeout_s == 60.0
        assert settings.output_dir == "out"

    def test_bad_timeout_falls_back(self, monkeypatch):
        monkeypatch.setenv("VITAL_REMOTE_TIMEOUT_S", "soon")
        assert Settings().remote_timeout_s == 60.0

    def test_boundary_phrases(self):
        phrases = Settings().boundary_phrases
        assert set(phrases) == {"img_start", "img_end", "tact_start", "tact_end"}
        assert all(len(v) == 3 for v in phrases.values())
