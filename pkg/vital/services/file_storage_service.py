"""
FileStorageService - audit artifacts on disk.

Layout: <output_dir>/<run_id>/<object_id>/{prompt.txt, response.txt, scores.json}
or failure.json for an object that failed, and <output_dir>/<run_id>/report.*
JSON is written with sorted keys and no timestamps so two runs with the
same inputs produce byte-identical trees.
"""

import json
import logging
import os
import shutil
from typing import Any, List, Optional

logger = logging.getLogger(__name__)

ENVELOPE_VERSION = "1.0"


def dump_json(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


class FileStorageService:
    """
    Writes per-run and per-object artifacts under one output directory.
    Each object owns its own directory, so objects never touch each other's files.
    """

    def __init__(self, output_dir: str = "out"):
        """
        Args:
            output_dir: Root directory for all runs (default: "out")
        """
        self.output_dir = output_dir
        self._ensure_dir(self.output_dir)

    def _ensure_dir(self, path: str) -> None:
        if not os.path.exists(path):
            os.makedirs(path, exist_ok=True)
            logger.info(f"📁 Created directory: {path}")

    def run_dir(self, run_id: str) -> str:
        return os.path.join(self.output_dir, run_id)

    def object_dir(self, run_id: str, object_id: str) -> str:
        return os.path.join(self.run_dir(run_id), object_id)

    def reset_object(self, run_id: str, object_id: str) -> None:
        """Remove artifacts left by an earlier run of the same object."""
        path = self.object_dir(run_id, object_id)
        if os.path.isdir(path):
            shutil.rmtree(path)

    def save_text(self, path: str, text: str) -> bool:
        """
        Write text to a file, creating parent directories.

        Returns:
            True if successful, False otherwise
        """
        try:
            self._ensure_dir(os.path.dirname(path) or ".")
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
            logger.debug(f"✅ Saved {path}")
            return True
        except OSError as e:
            logger.error(f"❌ Error saving {path}: {e}")
            return False

    def load_text(self, path: str, default: Optional[str] = None) -> Optional[str]:
        if not os.path.exists(path):
            return default
        with open(path, "r", encoding="utf-8") as f:
            return f.read()

    def save_json(self, path: str, data: Any) -> bool:
        """Save data inside the {data, metadata} envelope."""
        envelope = {
            "data": data,
            "metadata": {
                "data_type": type(data).__name__,
                "version": ENVELOPE_VERSION,
            },
        }
        return self.save_text(path, dump_json(envelope))

    def load_json(self, path: str, default: Any = None) -> Any:
        try:
            text = self.load_text(path)
            if text is None:
                logger.info(f"📁 No artifact found: {path}")
                return default
            envelope = json.loads(text)
            if "data" not in envelope or "metadata" not in envelope:
                logger.error(f"❌ {path} is not a data envelope")
                return default
            return envelope["data"]
        except (OSError, json.JSONDecodeError) as e:
            logger.error(f"❌ Error loading {path}: {e}")
            return default

    def save_object_artifact(self, run_id: str, object_id: str, name: str, content: Any) -> bool:
        """Text for .txt names, JSON envelope otherwise."""
        path = os.path.join(self.object_dir(run_id, object_id), name)
        if name.endswith(".txt"):
            return self.save_text(path, content)
        return self.save_json(path, content)

    def list_objects(self, run_id: str) -> List[str]:
        run_path = self.run_dir(run_id)
        if not os.path.isdir(run_path):
            return []
        return sorted(entry for entry in os.listdir(run_path) if os.path.isdir(os.path.join(run_path, entry)))
