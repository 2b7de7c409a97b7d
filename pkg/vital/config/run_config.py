"""
Run configuration - the JSON file passed with --config.

Every field has a default, so `{}` is a valid configuration.
"""

import json
from enum import Enum
from pathlib import Path
from typing import List, Optional, Set

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .settings import settings
from ..exceptions import ConfigException


class BackendKind(str, Enum):
    TOY = "toy"
    SCRIPTED = "scripted"
    REMOTE = "remote"


class RetrySettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    max_attempts: int = Field(default=3, ge=1)
    base_delay_ms: int = Field(default=500, ge=0)
    multiplier: float = Field(default=2.0, gt=1.0)
    retryable_statuses: Set[int] = Field(default_factory=lambda: {429, 500, 502, 503})


class BackendSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: BackendKind = BackendKind.TOY
    model: Optional[str] = None
    endpoint: Optional[str] = None
    script_path: Optional[str] = None
    max_tokens: int = Field(default=64, ge=1)
    temperature: float = Field(default=0.0, ge=0.0)
    timeout_s: float = Field(default_factory=lambda: settings.remote_timeout_s, gt=0.0)
    retry: RetrySettings = Field(default_factory=RetrySettings)


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    run_id: Optional[str] = None
    dataset_id: Optional[str] = None
    seed: int = 0
    dim: int = Field(default=64, ge=2)
    grid: int = Field(default=4, ge=1)
    hidden_dim: int = Field(default=48, ge=1)
    stride_ms: int = Field(default=250, gt=0)
    tactile_fps: float = Field(default=20.0, gt=0.0)
    parallelism: int = Field(default=4, ge=1)
    parse_mode: Optional[str] = None
    layout: List[str] = Field(default_factory=lambda: ["text_prefix", "vision", "tactile", "text_suffix"])
    modalities: str = "vision_tactile"
    prompt_spec_path: Optional[str] = None
    ground_truth_path: Optional[str] = None
    p_value_method: str = "auto"
    resamples: int = Field(default=200_000, ge=1)
    output_dir: str = Field(default_factory=lambda: settings.output_dir)
    backend: BackendSettings = Field(default_factory=BackendSettings)

    @field_validator("dim")
    @classmethod
    def _dim_even(cls, value: int) -> int:
        if value % 2:
            raise ValueError("dim must be even (sinusoidal positions need pairs)")
        return value

    @field_validator("parse_mode")
    @classmethod
    def _known_mode(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and value not in ("strict", "lenient"):
            raise ValueError("parse_mode must be 'strict' or 'lenient'")
        return value

    @field_validator("modalities")
    @classmethod
    def _known_modalities(cls, value: str) -> str:
        if value not in ("vision_tactile", "vision", "tactile"):
            raise ValueError("modalities must be vision_tactile, vision or tactile")
        return value

    @field_validator("p_value_method")
    @classmethod
    def _known_method(cls, value: str) -> str:
        if value not in ("auto", "exact", "monte_carlo"):
            raise ValueError("p_value_method must be auto, exact or monte_carlo")
        return value

    def effective_run_id(self) -> str:
        return self.run_id or f"{self.backend.kind.value}-seed{self.seed}"

    def effective_parse_mode(self) -> str:
        """Lenient for remote services, strict for deterministic backends"""
        if self.parse_mode:
            return self.parse_mode
        return "lenient" if self.backend.kind == BackendKind.REMOTE else "strict"

    def with_overrides(self, **overrides) -> "RunConfig":
        """Return a copy with CLI overrides applied (None values are ignored)"""
        data = self.model_dump()
        backend_kind = overrides.pop("backend_kind", None)
        if backend_kind is not None:
            data["backend"]["kind"] = backend_kind
        for key, value in overrides.items():
            if value is not None:
                data[key] = value
        return build_run_config(data)


def build_run_config(data: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigException(f"Invalid run configuration: {e}") from e


def load_run_config(path: Optional[str]) -> RunConfig:
    """Load a run configuration file; no path means all defaults"""
    if not path:
        return RunConfig()
    config_path = Path(path)
    if not config_path.exists():
        raise ConfigException(f"Config file not found: {config_path}")
    try:
        data = json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigException(f"Config file {config_path} is not valid JSON: {e}") from e
    return build_run_config(data)
