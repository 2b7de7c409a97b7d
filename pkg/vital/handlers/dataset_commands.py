import argparse
import logging

from .common import find_entry, resolve_config
from ..services import IngestService, ManifestService, PromptService
from ..services.ingest_service import sample_frame_indices
from ..models.scoring import PromptSpec
from ..exceptions import ConfigException

logger = logging.getLogger(__name__)


class DatasetCommandHandler:
    """Handlers for `ingest` and `prompt`"""

    def __init__(self):
        self.manifest_service = ManifestService()
        self.ingest_service = IngestService()

    def ingest_command(self, args: argparse.Namespace) -> int:
        """Validate the manifest and report which tactile frames each object keeps"""
        config = resolve_config(args)
        entries = self.manifest_service.load_manifest(args.manifest)
        for entry in entries:
            clip = self.ingest_service.load_tactile_clip(entry, config.tactile_fps)
            kept = sample_frame_indices(clip.timestamps_ms, config.stride_ms)
            print(f"{entry.object_id}\t{entry.material_category.value}\t{len(clip)} frames -> {len(kept)} kept "
                  f"(indices {kept[0]}..{kept[-1]}, stride {config.stride_ms} ms)")
        print(f"✅ {len(entries)} objects validated")
        return 0

    def prompt_command(self, args: argparse.Namespace) -> int:
        """Print the rendered prompt, as it would be sent for one object"""
        config = resolve_config(args)
        spec = PromptSpec.from_file(config.prompt_spec_path) if config.prompt_spec_path else PromptSpec.default()
        prompts = PromptService(spec)
        hint = args.hint
        if args.object:
            if not args.manifest:
                raise ConfigException("--object needs --manifest")
            entry = find_entry(self.manifest_service.load_manifest(args.manifest), args.object)
            logger.info(f"Rendering prompt for {entry.object_id} ({entry.name})")
        print(prompts.build_prompt(hint), end="")
        logger.info(f"Prompt spec version {spec.version}, checksum {prompts.checksum()}")
        return 0


dataset_handler = DatasetCommandHandler()
