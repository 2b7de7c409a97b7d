"""
ManifestService - loads and validates the line-delimited object manifest.

One JSON object per line; relative paths resolve against the manifest's
directory. Every problem is reported with its 1-based line number.
"""

import json
from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .base_service import BaseService
from .evaluation_service import parse_category
from ..exceptions import ValidationException
from ..models.evaluation import GroundTruthRecord
from ..models.manifest import ObjectManifestEntry


class GroundTruthLine(BaseModel):
    model_config = ConfigDict(extra="forbid")

    shore_hardness: Optional[float] = Field(default=None, gt=0)
    elastic_modulus: Optional[float] = Field(default=None, gt=0)
    roughness_ra: Optional[float] = Field(default=None, gt=0)


class ManifestLine(BaseModel):
    model_config = ConfigDict(extra="forbid")

    object_id: str = Field(min_length=1)
    name: str = Field(min_length=1)
    material_category: str
    image_path: str
    tactile_video_path: Optional[str] = None
    tactile_frame_paths: Optional[List[str]] = None
    ground_truth: GroundTruthLine = Field(default_factory=GroundTruthLine)

    @model_validator(mode="after")
    def _one_tactile_source(self) -> "ManifestLine":
        if not self.tactile_video_path and not self.tactile_frame_paths:
            raise ValueError("needs tactile_video_path or tactile_frame_paths")
        if self.tactile_video_path and self.tactile_frame_paths:
            raise ValueError("give tactile_video_path or tactile_frame_paths, not both")
        return self


def _first_error(error: ValidationError) -> str:
    detail = error.errors()[0]
    where = ".".join(str(part) for part in detail.get("loc", ())) or "entry"
    return f"{where}: {detail.get('msg', 'invalid value')}"


class ManifestService(BaseService):
    """Validates manifests and turns lines into ObjectManifestEntry records."""

    def __init__(self, check_paths: bool = True):
        super().__init__()
        self.check_paths = check_paths

    def _resolve(self, base: Path, raw: str, field: str, line: int) -> Path:
        path = Path(raw)
        if not path.is_absolute():
            path = base / path
        if self.check_paths and not path.exists():
            raise ValidationException(f"{field} does not exist: {raw}", line)
        return path

    def parse_line(self, text: str, line: int, base: Path) -> ObjectManifestEntry:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValidationException(f"not valid JSON ({e.msg})", line)
        if not isinstance(data, dict):
            raise ValidationException("entry must be a JSON object", line)
        try:
            parsed = ManifestLine.model_validate(data)
        except ValidationError as e:
            raise ValidationException(_first_error(e), line)

        category = parse_category(parsed.material_category, line)
        truth = GroundTruthRecord(
            object_id=parsed.object_id,
            material_category=category,
            shore_hardness=parsed.ground_truth.shore_hardness,
            elastic_modulus=parsed.ground_truth.elastic_modulus,
            roughness_ra=parsed.ground_truth.roughness_ra,
        )
        return ObjectManifestEntry(
            object_id=parsed.object_id,
            name=parsed.name,
            material_category=category,
            image_path=self._resolve(base, parsed.image_path, "image_path", line),
            ground_truth=truth,
            tactile_video_path=(self._resolve(base, parsed.tactile_video_path, "tactile_video_path", line)
                                if parsed.tactile_video_path else None),
            tactile_frame_paths=tuple(self._resolve(base, p, "tactile_frame_paths", line)
                                      for p in parsed.tactile_frame_paths or ()),
            line=line,
        )

    def load_manifest(self, path: Union[str, Path]) -> List[ObjectManifestEntry]:
        path = Path(path)
        if not path.exists():
            raise ValidationException(f"manifest not found: {path}")
        entries: List[ObjectManifestEntry] = []
        first_seen = {}
        for number, text in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not text.strip():
                continue
            entry = self.parse_line(text, number, path.parent)
            if entry.object_id in first_seen:
                raise ValidationException(
                    f"duplicate object_id {entry.object_id!r} (first defined on line {first_seen[entry.object_id]})",
                    number,
                )
            first_seen[entry.object_id] = number
            entries.append(entry)
        self.log_info(f"✅ Manifest {path.name}: {len(entries)} objects")
        return entries


def load_manifest(path: Union[str, Path]) -> List[ObjectManifestEntry]:
    return ManifestService().load_manifest(path)
