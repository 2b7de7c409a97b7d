import os
from typing import Dict, List
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


class Settings:
    def __init__(self):
        # --- Remote VLM Configuration ---
        self.remote_url = os.getenv("VITAL_REMOTE_URL")
        self.remote_api_key = os.getenv("VITAL_REMOTE_API_KEY")
        self.remote_model = os.getenv("VITAL_REMOTE_MODEL", "remote-vlm")
        self.remote_timeout_s = self._load_float("VITAL_REMOTE_TIMEOUT_S", 60.0)

        # --- Output / Logging Configuration ---
        self.output_dir = os.getenv("VITAL_OUTPUT_DIR", "out")
        self.log_dir = os.getenv("VITAL_LOG_DIR", "logs")
        self.log_level = os.getenv("VITAL_LOG_LEVEL", "INFO").upper()

        # --- Boundary token phrases ---
        self.boundary_phrases = self._load_boundary_phrases()

    def _load_float(self, name: str, default: float) -> float:
        """Read a float env var, falling back to the default on bad input"""
        raw = os.getenv(name)
        if not raw:
            return default
        try:
            return float(raw)
        except ValueError:
            print(f"❌ Invalid {name} value {raw!r}, using {default}")
            return default

    def _load_boundary_phrases(self) -> Dict[str, List[str]]:
        """Descriptive phrases averaged into the frozen boundary tokens"""
        return {
            'img_start': [
                "here the picture of the object begins",
                "start of the camera image",
                "visual features follow",
            ],
            'img_end': [
                "here the picture of the object ends",
                "end of the camera image",
                "visual features are over",
            ],
            'tact_start': [
                "here the touch sensor recording begins",
                "start of the tactile frames",
                "tactile features follow",
            ],
            'tact_end': [
                "here the touch sensor recording ends",
                "end of the tactile frames",
                "tactile features are over",
            ],
        }

# Global settings instance
settings = Settings()
