from .extractor import (
    DEFAULT_ID_PATTERN,
    EMBEDDING_DIM,
    ExtractorConfig,
    build_model,
    extract,
    parse_ids,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_ID_PATTERN",
    "EMBEDDING_DIM",
    "ExtractorConfig",
    "build_model",
    "extract",
    "parse_ids",
]
