"""Action-description parsing: rule grammar and learned linear backends."""

from .linear import (
    CoverageError,
    LinearModel,
    count_vector,
    decode_model,
    encode_model,
    linear_params_for_kind,
    parse_linear,
    train_linear,
)
from .rules import (
    COMPASS_ANGLES,
    DIRECTION_WORDS,
    DIRECTIONS,
    SENSES,
    VERB_KINDS,
    ParseError,
    ParseOutcome,
    UnknownTarget,
    UnparseableAction,
    compass_bucket,
    find_object,
    parse_rules,
)
from .tokenize import EmptyDescription, tokenize, tokenize_or_empty

__all__ = [
    "COMPASS_ANGLES",
    "CoverageError",
    "DIRECTIONS",
    "DIRECTION_WORDS",
    "EmptyDescription",
    "LinearModel",
    "ParseError",
    "ParseOutcome",
    "SENSES",
    "UnknownTarget",
    "UnparseableAction",
    "VERB_KINDS",
    "compass_bucket",
    "count_vector",
    "decode_model",
    "encode_model",
    "find_object",
    "linear_params_for_kind",
    "parse_linear",
    "parse_rules",
    "tokenize",
    "tokenize_or_empty",
    "train_linear",
]
