"""
ScriptedBackend - canned responses keyed by object id, for fixtures and tests.
"""

import json
from pathlib import Path
from typing import Dict, Mapping, Union

from .backend_service import LanguageBackend
from ..config.run_config import BackendKind
from ..exceptions import ConfigException, FixtureException
from ..models.generation import FinishReason, GenerationRequest, GenerationResult, RequestKind


class ScriptedBackend(LanguageBackend):
    """Returns the canned text for the request's object id, verbatim."""

    kind = BackendKind.SCRIPTED
    request_kind = RequestKind.MESSAGES

    def __init__(self, script: Mapping[str, str], name: str = "scripted"):
        super().__init__()
        self.script: Dict[str, str] = dict(script)
        self.name = name

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ScriptedBackend":
        """Load a JSON object mapping object_id to response text."""
        path = Path(path)
        if not path.exists():
            raise ConfigException(f"script file not found: {path}")
        try:
            script = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigException(f"script file {path} is not valid JSON: {e}") from e
        if not isinstance(script, dict) or not all(isinstance(v, str) for v in script.values()):
            raise ConfigException(f"script file {path} must map object ids to response strings")
        return cls(script, name=f"scripted:{path.stem}")

    @property
    def model_id(self) -> str:
        return self.name

    async def _generate(self, request: GenerationRequest) -> GenerationResult:
        object_id = request.object_id
        if object_id is None:
            raise FixtureException("scripted request carries no object_id")
        if object_id not in self.script:
            raise FixtureException(f"no canned response for object id(s): {object_id}")
        text = self.script[object_id]
        if not text:
            raise FixtureException(f"canned response for {object_id} is empty")
        return GenerationResult(text=text, finish_reason=FinishReason.STOP)
