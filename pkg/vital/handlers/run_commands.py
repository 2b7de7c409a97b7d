import argparse
import asyncio
import json
import logging
from pathlib import Path

from .common import find_entry, resolve_config
from ..config.settings import settings
from ..services import ManifestService, PipelineService
from ..services.file_storage_service import FileStorageService
from ..services.report_service import ReportService, render_comparison, render_report

logger = logging.getLogger(__name__)


class RunCommandHandler:
    """Handlers for `infer` (one object), `eval` (whole manifest) and `compare` (finished runs)"""

    def __init__(self):
        self.manifest_service = ManifestService()

    async def _infer(self, args: argparse.Namespace) -> int:
        config = resolve_config(args)
        entry = find_entry(self.manifest_service.load_manifest(args.manifest), args.object)
        pipeline = PipelineService(config)
        try:
            outcome = await pipeline.process_object(entry)
        finally:
            await pipeline.shutdown()
        if outcome.exception is not None:
            raise outcome.exception
        print(json.dumps(outcome.parsed.scores.to_dict(), indent=2, sort_keys=True))
        for warning in outcome.parsed.warnings:
            print(f"⚠️ {warning}")
        return 0

    async def _eval(self, args: argparse.Namespace) -> int:
        config = resolve_config(args)
        entries = self.manifest_service.load_manifest(args.manifest)
        pipeline = PipelineService(config)
        try:
            if getattr(args, "rescore", False):
                report = pipeline.rescore(entries, dataset_id=Path(args.manifest).stem)
            else:
                report = await pipeline.run(entries, dataset_id=Path(args.manifest).stem)
        finally:
            await pipeline.shutdown()
        print(render_report(report, "text"), end="")
        logger.info(f"Artifacts in {pipeline.storage.run_dir(pipeline.run_id)}")
        return 0

    def infer_command(self, args: argparse.Namespace) -> int:
        """Run a single object end to end and print its scores"""
        return asyncio.run(self._infer(args))

    def eval_command(self, args: argparse.Namespace) -> int:
        """Run the full manifest and print the correlation report"""
        return asyncio.run(self._eval(args))

    def compare_command(self, args: argparse.Namespace) -> int:
        """Print finished runs side by side, grouped by property"""
        reports = ReportService(FileStorageService(args.out or settings.output_dir))
        print(render_comparison([reports.load(run_id) for run_id in args.runs]), end="")
        return 0


run_handler = RunCommandHandler()
