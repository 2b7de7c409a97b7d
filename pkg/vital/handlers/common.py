"""Helpers shared by the command handlers."""

import argparse
from typing import List

from ..config.run_config import RunConfig, load_run_config
from ..exceptions import ValidationException
from ..models.manifest import ObjectManifestEntry


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Config file values, overridden by any flags given on the command line."""
    config = load_run_config(getattr(args, "config", None))
    return config.with_overrides(
        backend_kind=getattr(args, "backend", None),
        seed=getattr(args, "seed", None),
        grid=getattr(args, "grid", None),
        dim=getattr(args, "dim", None),
        stride_ms=getattr(args, "stride_ms", None),
        parse_mode=getattr(args, "mode", None),
        output_dir=getattr(args, "out", None),
        modalities=getattr(args, "modalities", None),
    )


def find_entry(entries: List[ObjectManifestEntry], object_id: str) -> ObjectManifestEntry:
    for entry in entries:
        if entry.object_id == object_id:
            return entry
    raise ValidationException(f"object {object_id!r} is not in the manifest")
