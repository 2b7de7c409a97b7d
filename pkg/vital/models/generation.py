from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, List, Optional, Tuple, Union

from .embedding import MultimodalSequence
from ..exceptions import ConfigException


class FinishReason(Enum):
    LENGTH = "length"
    STOP = "stop"
    ERROR = "error"


class RequestKind(Enum):
    SEQUENCE = "sequence"
    MESSAGES = "messages"


@dataclass(frozen=True)
class TextPart:
    text: str


@dataclass(frozen=True)
class ImagePart:
    data: str  # base64-encoded PNG


@dataclass(frozen=True)
class ChatMessage:
    role: str
    parts: Tuple[Union[TextPart, ImagePart], ...]

    def to_wire(self) -> dict:
        content = []
        for part in self.parts:
            if isinstance(part, TextPart):
                content.append({"type": "text", "text": part.text})
            else:
                content.append({"type": "image", "data": part.data})
        return {"role": self.role, "content": content}


@dataclass(frozen=True, eq=False)
class GenerationRequest:
    sequence: Optional[MultimodalSequence] = None
    messages: Optional[Tuple[ChatMessage, ...]] = None
    max_tokens: int = 64
    temperature: float = 0.0
    object_id: Optional[str] = None

    def __post_init__(self):
        if (self.sequence is None) == (self.messages is None):
            raise ConfigException("a generation request carries exactly one of sequence or messages")
        if self.max_tokens < 1:
            raise ConfigException(f"max_tokens must be at least 1, got {self.max_tokens}")
        if self.temperature < 0:
            raise ConfigException(f"temperature must be non-negative, got {self.temperature}")
        if self.messages is not None:
            object.__setattr__(self, "messages", tuple(self.messages))

    @property
    def kind(self) -> RequestKind:
        return RequestKind.SEQUENCE if self.sequence is not None else RequestKind.MESSAGES


@dataclass(frozen=True)
class GenerationResult:
    text: str
    finish_reason: FinishReason
    latency_ms: int = 0

    def __post_init__(self):
        if self.finish_reason is not FinishReason.ERROR and not self.text:
            raise ConfigException("a successful generation must carry text")


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    base_delay_ms: int = 500
    multiplier: float = 2.0
    retryable_statuses: FrozenSet[int] = field(default_factory=lambda: frozenset({429, 500, 502, 503}))

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ConfigException("max_attempts must be at least 1")
        if self.base_delay_ms < 0:
            raise ConfigException("base_delay_ms must be non-negative")
        if self.multiplier <= 1:
            raise ConfigException("backoff multiplier must be greater than 1")
        object.__setattr__(self, "retryable_statuses", frozenset(self.retryable_statuses))

    def delay_ms(self, retry_index: int) -> float:
        """Delay before retry number retry_index (0-based): base * multiplier^k."""
        return self.base_delay_ms * self.multiplier ** retry_index

    def delays_ms(self) -> List[float]:
        return [self.delay_ms(k) for k in range(self.max_attempts - 1)]
