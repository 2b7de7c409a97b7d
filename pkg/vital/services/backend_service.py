"""
Language backend interface and factory.

Every backend turns a GenerationRequest into a GenerationResult. The toy
decoder consumes assembled embeddings; the scripted and remote backends
consume chat messages.
"""

import time
from abc import ABC, abstractmethod

from .base_service import BaseService
from ..config.run_config import BackendKind, RunConfig
from ..config.settings import settings
from ..exceptions import ConfigException
from ..models.generation import GenerationRequest, GenerationResult, RequestKind, RetryPolicy
from ..utils.numerics import derive_seed

# seed streams derived from RunConfig.seed
ENCODER_SEED_STREAM = 1
DECODER_SEED_STREAM = 2
SAMPLING_SEED_STREAM = 3


class LanguageBackend(BaseService, ABC):
    """Uniform contract shared by every backend."""

    kind: BackendKind
    request_kind: RequestKind

    @property
    @abstractmethod
    def model_id(self) -> str:
        ...

    @abstractmethod
    async def _generate(self, request: GenerationRequest) -> GenerationResult:
        ...

    async def generate(self, request: GenerationRequest) -> GenerationResult:
        if request.kind is not self.request_kind:
            raise ConfigException(
                f"{self.kind.value} backend expects a {self.request_kind.value} request, got {request.kind.value}"
            )
        started = time.perf_counter()
        result = await self._generate(request)
        latency_ms = int((time.perf_counter() - started) * 1000)
        return GenerationResult(result.text, result.finish_reason, latency_ms)


def retry_policy_from(config: RunConfig) -> RetryPolicy:
    retry = config.backend.retry
    return RetryPolicy(
        max_attempts=retry.max_attempts,
        base_delay_ms=retry.base_delay_ms,
        multiplier=retry.multiplier,
        retryable_statuses=frozenset(retry.retryable_statuses),
    )


def build_backend(config: RunConfig) -> LanguageBackend:
    """Construct the backend named by the run configuration."""
    from .remote_backend_service import RemoteBackend
    from .scripted_backend_service import ScriptedBackend
    from .toy_backend_service import ToyLanguageBackend, ToyLMWeights

    kind = config.backend.kind
    if kind is BackendKind.TOY:
        weights = ToyLMWeights.from_seed(derive_seed(config.seed, DECODER_SEED_STREAM), config.dim)
        return ToyLanguageBackend(weights, seed=derive_seed(config.seed, SAMPLING_SEED_STREAM))

    if kind is BackendKind.SCRIPTED:
        if not config.backend.script_path:
            raise ConfigException("scripted backend needs backend.script_path")
        return ScriptedBackend.from_file(config.backend.script_path)

    endpoint = config.backend.endpoint or settings.remote_url
    if not endpoint:
        raise ConfigException("remote backend needs an endpoint (backend.endpoint or VITAL_REMOTE_URL)")
    if not settings.remote_api_key:
        raise ConfigException("remote backend needs a credential in VITAL_REMOTE_API_KEY")
    return RemoteBackend(
        endpoint=endpoint,
        api_key=settings.remote_api_key,
        model=config.backend.model or settings.remote_model,
        policy=retry_policy_from(config),
        timeout_s=config.backend.timeout_s,
    )
