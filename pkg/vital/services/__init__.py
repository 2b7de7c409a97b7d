from .base_service import BaseService
from .encoder_service import EncoderService, EncoderWeights
from .assembly_service import AssemblyService
from .backend_service import LanguageBackend, build_backend
from .toy_backend_service import ToyLanguageBackend, ToyLMWeights
from .scripted_backend_service import ScriptedBackend
from .remote_backend_service import RemoteBackend
from .prompt_service import PromptService
from .response_parser_service import ResponseParserService
from .evaluation_service import EvaluationService
from .report_service import ReportService
from .file_storage_service import FileStorageService
from .ingest_service import IngestService
from .manifest_service import ManifestService
from .pipeline_service import PipelineService, run_pipeline
from .selftest_service import SelftestService

__all__ = [
    'BaseService',
    'EncoderService',
    'EncoderWeights',
    'AssemblyService',
    'LanguageBackend',
    'build_backend',
    'ToyLanguageBackend',
    'ToyLMWeights',
    'ScriptedBackend',
    'RemoteBackend',
    'PromptService',
    'ResponseParserService',
    'EvaluationService',
    'ReportService',
    'FileStorageService',
    'IngestService',
    'ManifestService',
    'PipelineService',
    'run_pipeline',
    'SelftestService'
]
