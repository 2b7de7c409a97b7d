"""
RemoteBackend - chat-completion style client for hosted vision-language models.

Images (the object photo and sampled tactile frames) travel as base64 PNG
attachments; remote services cannot take raw embeddings.
"""

import asyncio
import base64
import io
from typing import Awaitable, Callable, Optional
from urllib.parse import urlparse

import httpx
import numpy as np
from PIL import Image as PILImage

from .backend_service import LanguageBackend
from ..config.run_config import BackendKind
from ..exceptions import DecodeException, ProtocolException, RetryExhaustedException
from ..models.generation import (
    FinishReason,
    GenerationRequest,
    GenerationResult,
    ImagePart,
    RequestKind,
    RetryPolicy,
)
from ..models.media import Image

Sleep = Callable[[float], Awaitable[None]]


def encode_image_attachment(image: Image) -> ImagePart:
    """PNG-encode an image and wrap it as a base64 message part."""
    data = np.round(image.pixels * 255.0).astype(np.uint8)
    if image.channels == 1:
        data = data[:, :, 0]
    buffer = io.BytesIO()
    PILImage.fromarray(data).save(buffer, format="PNG")
    return ImagePart(base64.b64encode(buffer.getvalue()).decode("ascii"))


class RemoteBackend(LanguageBackend):
    """POSTs chat messages and retries transient failures with exponential backoff."""

    kind = BackendKind.REMOTE
    request_kind = RequestKind.MESSAGES

    def __init__(self, endpoint: str, api_key: str, model: str, policy: Optional[RetryPolicy] = None,
                 timeout_s: float = 60.0, client: Optional[httpx.AsyncClient] = None,
                 sleep: Sleep = asyncio.sleep):
        super().__init__()
        self.endpoint = endpoint
        self.model = model
        self.policy = policy or RetryPolicy()
        self.timeout_s = timeout_s
        self._api_key = api_key
        self._client = client
        self._owns_client = client is None
        self._sleep = sleep

    @property
    def model_id(self) -> str:
        return self.model

    @property
    def host(self) -> str:
        return urlparse(self.endpoint).netloc or self.endpoint

    def _http(self) -> httpx.AsyncClient:
        if self._client is None:
            self._client = httpx.AsyncClient(timeout=httpx.Timeout(self.timeout_s))
        return self._client

    def build_payload(self, request: GenerationRequest) -> dict:
        return {
            "model": self.model,
            "messages": [message.to_wire() for message in request.messages],
            "max_tokens": request.max_tokens,
            "temperature": request.temperature,
        }

    async def _generate(self, request: GenerationRequest) -> GenerationResult:
        payload = self.build_payload(request)
        headers = {"Authorization": f"Bearer {self._api_key}", "Content-Type": "application/json"}
        last_failure = "no attempt made"

        for attempt in range(1, self.policy.max_attempts + 1):
            try:
                response = await self._http().post(self.endpoint, json=payload, headers=headers)
            except httpx.TransportError as e:
                last_failure = f"transport error: {e.__class__.__name__}"
            else:
                if response.is_success:
                    return GenerationResult(text=self._extract_text(response), finish_reason=FinishReason.STOP)
                if response.status_code not in self.policy.retryable_statuses:
                    raise ProtocolException(
                        f"{self.host} answered with non-retryable status {response.status_code}",
                        response.status_code,
                    )
                last_failure = f"status {response.status_code}"

            if attempt < self.policy.max_attempts:
                delay_ms = self.policy.delay_ms(attempt - 1)
                self.log_warning(
                    f"⚠️ Attempt {attempt}/{self.policy.max_attempts} to {self.host} failed ({last_failure}), "
                    f"retrying in {delay_ms:.0f} ms"
                )
                await self._sleep(delay_ms / 1000.0)

        self.log_error(f"❌ Giving up on {self.host} after {self.policy.max_attempts} attempts ({last_failure})")
        raise RetryExhaustedException(
            f"{self.policy.max_attempts} attempts to {self.host} failed, last: {last_failure}",
            self.policy.max_attempts,
        )

    @staticmethod
    def _extract_text(response: httpx.Response) -> str:
        try:
            body = response.json()
            text = body["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise DecodeException(f"malformed completion body: {e.__class__.__name__}") from e
        if not isinstance(text, str) or not text:
            raise DecodeException("completion body carries no text content")
        return text

    async def aclose(self) -> None:
        if self._client is not None and self._owns_client:
            await self._client.aclose()
        self._client = None

    async def shutdown(self) -> None:
        await self.aclose()
