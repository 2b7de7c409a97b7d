from .network import (
    Activation,
    Matrix,
    Vector,
    MlpLayer,
    MlpParams,
    as_matrix,
    as_vector
)

from .media import (
    Image,
    TactileClip,
    RegionGrid
)

from .embedding import (
    BOUNDARY_TOKEN_NAMES,
    Modality,
    ItemTag,
    EmbeddingSequence,
    BoundaryTokens,
    TokenSequence,
    MultimodalSequence
)

from .generation import (
    FinishReason,
    RequestKind,
    TextPart,
    ImagePart,
    ChatMessage,
    GenerationRequest,
    GenerationResult,
    RetryPolicy
)

from .scoring import (
    PhysicalProperty,
    ParseMode,
    ScaleBand,
    RatingScale,
    PromptSpec,
    PropertyScores,
    ParsedResponse
)

from .evaluation import (
    MaterialCategory,
    PValueMethod,
    GroundTruthRecord,
    ScoreTable,
    CorrelationResult,
    CorrelationReport
)

from .manifest import ObjectManifestEntry

__all__ = [
    'Activation',
    'Matrix',
    'Vector',
    'MlpLayer',
    'MlpParams',
    'as_matrix',
    'as_vector',
    'Image',
    'TactileClip',
    'RegionGrid',
    'BOUNDARY_TOKEN_NAMES',
    'Modality',
    'ItemTag',
    'EmbeddingSequence',
    'BoundaryTokens',
    'TokenSequence',
    'MultimodalSequence',
    'FinishReason',
    'RequestKind',
    'TextPart',
    'ImagePart',
    'ChatMessage',
    'GenerationRequest',
    'GenerationResult',
    'RetryPolicy',
    'PhysicalProperty',
    'ParseMode',
    'ScaleBand',
    'RatingScale',
    'PromptSpec',
    'PropertyScores',
    'ParsedResponse',
    'MaterialCategory',
    'PValueMethod',
    'GroundTruthRecord',
    'ScoreTable',
    'CorrelationResult',
    'CorrelationReport',
    'ObjectManifestEntry'
]
