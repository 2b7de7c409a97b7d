"""
PipelineService - manifest to CorrelationReport.

Per object: load the image and sample the tactile clip, encode both,
assemble the multimodal sequence (or build chat messages for backends that
take images), render the prompt, generate, parse, and persist every
intermediate artifact. Objects run concurrently up to the configured
parallelism; evaluation waits for all of them.
"""

import asyncio
import os
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .assembly_service import VOCAB_SIZE, AssemblyService, LayoutSegment, modality_spans, parse_layout, restrict_layout
from .backend_service import ENCODER_SEED_STREAM, LanguageBackend, build_backend
from .encoder_service import EncoderService, EncoderWeights
from .evaluation_service import EvaluationService, load_ground_truth_table
from .file_storage_service import FileStorageService
from .ingest_service import IngestService
from .manifest_service import ManifestService
from .prompt_service import PromptService
from .remote_backend_service import encode_image_attachment
from .report_service import ReportService, compliance
from .response_parser_service import ResponseParserService
from .base_service import BaseService
from ..config.run_config import RunConfig
from ..config.settings import settings
from ..exceptions import ConfigException, DataException, ServiceException
from ..models.embedding import BoundaryTokens, MultimodalSequence, TokenSequence
from ..models.evaluation import CorrelationReport, PValueMethod, ScoreTable
from ..models.generation import ChatMessage, GenerationRequest, ImagePart, RequestKind, TextPart
from ..models.manifest import ObjectManifestEntry
from ..models.media import Image, TactileClip
from ..models.scoring import ParsedResponse, ParseMode, PromptSpec, PropertyScores
from ..utils.numerics import derive_seed

MODEL_CHANNELS = 3
USER_TURN = "USER: "
ASSISTANT_TURN = "\nASSISTANT:"


@dataclass
class ObjectOutcome:
    object_id: str
    parsed: Optional[ParsedResponse] = None
    error: Optional[str] = None
    exception: Optional[ServiceException] = None
    parse_attempted: bool = False


class PipelineService(BaseService):
    """Runs one configured evaluation over a manifest."""

    def __init__(self, config: RunConfig, backend: Optional[LanguageBackend] = None,
                 storage: Optional[FileStorageService] = None):
        super().__init__()
        self.config = config
        self.run_id = config.effective_run_id()
        self.backend = backend or build_backend(config)
        self.storage = storage or FileStorageService(config.output_dir)

        self.encoder = EncoderService()
        self.assembly = AssemblyService()
        self.ingest = IngestService(self.encoder)
        spec = PromptSpec.from_file(config.prompt_spec_path) if config.prompt_spec_path else PromptSpec.default()
        self.prompts = PromptService(spec)
        self.parser = ResponseParserService(ParseMode(config.effective_parse_mode()))
        self.spans = modality_spans(config.modalities)
        self.layout = restrict_layout(parse_layout(config.layout), config.modalities)
        self.weights = EncoderWeights.from_seed(
            derive_seed(config.seed, ENCODER_SEED_STREAM), config.dim, config.hidden_dim,
            vision_channels=MODEL_CHANNELS, tactile_channels=MODEL_CHANNELS,
        )
        self._boundary: Optional[BoundaryTokens] = None

    async def shutdown(self) -> None:
        await self.backend.shutdown()

    # --- request construction ---

    def boundary_tokens(self) -> BoundaryTokens:
        """Marker embeddings averaged from the shipped phrases, built once."""
        if self._boundary is None:
            table = self._token_table()
            phrase_embeddings = {
                name: [self.assembly.embed_phrase(phrase, table) for phrase in phrases]
                for name, phrases in settings.boundary_phrases.items()
            }
            self._boundary = self.encoder.init_boundary_tokens(phrase_embeddings)
        return self._boundary

    def _token_table(self) -> np.ndarray:
        table = getattr(self.backend, "token_embedding", None)
        if table is None:
            raise ConfigException(f"{self.backend.kind.value} backend has no token embedding table")
        return table

    @property
    def uses_vision(self) -> bool:
        return LayoutSegment.VISION in self.spans

    @property
    def uses_tactile(self) -> bool:
        return LayoutSegment.TACTILE in self.spans

    def model_label(self) -> str:
        """Backend model id, tagged when the run sees only one modality."""
        if self.config.modalities == "vision_tactile":
            return self.backend.model_id
        return f"{self.backend.model_id} ({self.config.modalities} only)"

    def assemble(self, image: Optional[Image], clip: Optional[TactileClip], prompt: str) -> MultimodalSequence:
        vision = tactile = None
        if self.uses_vision:
            image = self.encoder.to_channels(image, MODEL_CHANNELS)
            vision = self.encoder.encode_vision(image, self.config.grid, self.weights.vision_encoder,
                                                self.weights.vision_projector)
        if self.uses_tactile:
            clip = TactileClip(
                frames=tuple(self.encoder.to_channels(frame, MODEL_CHANNELS) for frame in clip.frames),
                timestamps_ms=clip.timestamps_ms,
                sensor_id=clip.sensor_id,
            )
            tactile = self.encoder.encode_tactile(clip, self.weights.tactile_encoder,
                                                  self.weights.tactile_projector)

        prefix = self.assembly.tokenize_text(USER_TURN)
        suffix = self.assembly.tokenize_text(prompt + ASSISTANT_TURN)
        tokens = TokenSequence(prefix.token_ids + suffix.token_ids, VOCAB_SIZE)
        text = self.assembly.embed_tokens(tokens, self._token_table())
        return self.assembly.assemble_sequence(text, vision, tactile, self.boundary_tokens(),
                                               self.layout, text_split=len(prefix))

    def messages(self, image: Optional[Image], clip: Optional[TactileClip], prompt: str) -> Tuple[ChatMessage, ...]:
        parts: List[Union[TextPart, ImagePart]] = []
        if self.uses_vision:
            parts += [TextPart("Camera image of the object:"), encode_image_attachment(image)]
        if self.uses_tactile:
            parts.append(TextPart(f"Tactile sensor frames, one every {self.config.stride_ms} ms of contact:"))
            parts += [encode_image_attachment(frame) for frame in clip.frames]
        parts.append(TextPart(prompt))
        return (ChatMessage(role="user", parts=tuple(parts)),)

    def build_request(self, entry: ObjectManifestEntry, prompt: str) -> GenerationRequest:
        image, clip = self.ingest.load_object(entry, self.config.tactile_fps, self.config.stride_ms,
                                              vision=self.uses_vision, tactile=self.uses_tactile)
        common = dict(
            max_tokens=self.config.backend.max_tokens,
            temperature=self.config.backend.temperature,
            object_id=entry.object_id,
        )
        if self.backend.request_kind is RequestKind.SEQUENCE:
            return GenerationRequest(sequence=self.assemble(image, clip, prompt), **common)
        return GenerationRequest(messages=self.messages(image, clip, prompt), **common)

    # --- per-object work ---

    async def process_object(self, entry: ObjectManifestEntry) -> ObjectOutcome:
        object_id = entry.object_id
        outcome = ObjectOutcome(object_id)
        self.storage.reset_object(self.run_id, object_id)
        self.log_info(f"🔄 {object_id}: started")
        stage = "prompt"
        try:
            prompt = self.prompts.build_prompt()
            self.storage.save_object_artifact(self.run_id, object_id, "prompt.txt", prompt)

            stage = "encode"
            request = self.build_request(entry, prompt)

            stage = "generate"
            result = await self.backend.generate(request)
            self.storage.save_object_artifact(self.run_id, object_id, "response.txt", result.text)

            stage = "parse"
            outcome.parse_attempted = True
            parsed = self.parser.parse(result.text, object_id)
            self.storage.save_object_artifact(self.run_id, object_id, "scores.json", {
                "object_id": object_id,
                "mode": parsed.mode.value,
                "warnings": list(parsed.warnings),
                "scores": parsed.scores.to_dict(),
            })
            outcome.parsed = parsed
            s = parsed.scores
            self.log_info(f"✅ {object_id}: hardness={s.hardness} elasticity={s.elasticity} roughness={s.roughness}")
        except ServiceException as e:
            outcome.error = f"{e.__class__.__name__}: {e}"
            outcome.exception = e
            self.storage.save_object_artifact(self.run_id, object_id, "failure.json", {
                "object_id": object_id,
                "stage": stage,
                "error_type": e.__class__.__name__,
                "message": str(e),
            })
            self.log_error(f"❌ {object_id}: failed during {stage}: {e}")
        return outcome

    async def process_all(self, entries: Sequence[ObjectManifestEntry]) -> List[ObjectOutcome]:
        semaphore = asyncio.Semaphore(self.config.parallelism)

        async def bounded(entry: ObjectManifestEntry) -> ObjectOutcome:
            async with semaphore:
                return await self.process_object(entry)

        return list(await asyncio.gather(*(bounded(entry) for entry in entries)))

    # --- evaluation ---

    def load_saved(self, entries: Sequence[ObjectManifestEntry]) -> List[ObjectOutcome]:
        """Outcomes read back from this run's artifacts, without calling the backend."""
        saved = set(self.storage.list_objects(self.run_id))
        if not saved:
            raise DataException(f"run {self.run_id} has no saved objects in {self.storage.run_dir(self.run_id)}")
        outcomes = []
        for entry in entries:
            object_dir = self.storage.object_dir(self.run_id, entry.object_id)
            outcome = ObjectOutcome(entry.object_id)
            data = self.storage.load_json(os.path.join(object_dir, "scores.json"))
            if data is not None:
                outcome.parsed = ParsedResponse(PropertyScores.from_dict(data.get("scores", {})),
                                                ParseMode(data.get("mode", ParseMode.STRICT.value)),
                                                list(data.get("warnings", [])))
                outcome.parse_attempted = True
            else:
                failure = self.storage.load_json(os.path.join(object_dir, "failure.json"), default={})
                outcome.error = (f"{failure.get('error_type', 'DataException')}: "
                                 f"{failure.get('message', 'no saved scores')}")
                outcome.parse_attempted = failure.get("stage") == "parse"
            outcomes.append(outcome)
        return outcomes

    def summarize(self, outcomes: Sequence[ObjectOutcome], entries: Sequence[ObjectManifestEntry],
                  dataset_id: str) -> CorrelationReport:
        table = ScoreTable()
        for outcome in outcomes:
            if outcome.parsed is not None:
                table.add(outcome.object_id, outcome.parsed.scores)

        if self.config.ground_truth_path:
            truth = load_ground_truth_table(self.config.ground_truth_path)
        else:
            truth = [entry.ground_truth for entry in entries]

        attempted = sum(1 for o in outcomes if o.parse_attempted)
        clean = sum(1 for o in outcomes if o.parsed is not None and o.parsed.compliant)
        failed = tuple(o.object_id for o in outcomes if o.error is not None)
        if failed:
            self.log_warning(f"⚠️ {len(failed)} object(s) failed: {', '.join(failed)}")

        evaluator = EvaluationService(PValueMethod(self.config.p_value_method), self.config.seed,
                                      self.config.resamples)
        results = evaluator.evaluate(table, truth)

        report = CorrelationReport(
            results=results,
            dataset_id=self.config.dataset_id or dataset_id,
            model_id=self.model_label(),
            format_compliance=compliance(clean, attempted),
            attempted=len(outcomes),
            failed_objects=failed,
        )
        ReportService(self.storage).write(report, self.run_id)
        return report

    async def run(self, entries: Sequence[ObjectManifestEntry], dataset_id: str = "dataset") -> CorrelationReport:
        self.log_info(f"🚀 Run {self.run_id}: {len(entries)} objects on {self.model_label()}")
        outcomes = await self.process_all(entries)
        return self.summarize(outcomes, entries, dataset_id)

    def rescore(self, entries: Sequence[ObjectManifestEntry], dataset_id: str = "dataset") -> CorrelationReport:
        """Re-evaluate saved scores, e.g. against another ground-truth table or p-value method."""
        self.log_info(f"♻️ Rescoring run {self.run_id} from saved artifacts")
        return self.summarize(self.load_saved(entries), entries, dataset_id)


async def run_pipeline(manifest: Union[str, Path], config: RunConfig,
                       backend: Optional[LanguageBackend] = None) -> CorrelationReport:
    """Load the manifest, run every object and write the report."""
    entries = ManifestService().load_manifest(manifest)
    pipeline = PipelineService(config, backend)
    try:
        return await pipeline.run(entries, dataset_id=Path(manifest).stem)
    finally:
        await pipeline.shutdown()
