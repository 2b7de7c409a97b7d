from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

from .evaluation import GroundTruthRecord, MaterialCategory


@dataclass(frozen=True)
class ObjectManifestEntry:
    object_id: str
    name: str
    material_category: MaterialCategory
    image_path: Path
    ground_truth: GroundTruthRecord
    tactile_video_path: Optional[Path] = None
    tactile_frame_paths: Tuple[Path, ...] = ()
    line: int = 0
