"""Bounded-degree LRPC codes over F_{q^m}: arithmetic, decoding and success-probability analysis."""

__version__ = "0.1.0"

from bdlrpc.code import (  # noqa: E402
    CodeInstance,
    CodeParams,
    build_code,
    code_from_json,
    code_to_json,
    encode,
    sample_code,
    sample_codeword,
    sample_error,
    syndrome,
)
from bdlrpc.decoder import DecodeOutcome, DecoderConfig, decode  # noqa: E402
from bdlrpc.exceptions import ConsistencyError, ConstructionError, ParameterError  # noqa: E402
from bdlrpc.field import FieldContext, FieldElement, field_make  # noqa: E402
from bdlrpc.montecarlo import TrialStats, estimate_pt, estimate_qt, simulate_decoding  # noqa: E402
from bdlrpc.probability import ProbParams, prob_report  # noqa: E402
from bdlrpc.subspace import Subspace, bounded_degree, intersect, product, span  # noqa: E402

__all__ = [
    "__version__",
    "FieldContext", "FieldElement", "field_make",
    "Subspace", "span", "bounded_degree", "product", "intersect",
    "CodeParams", "CodeInstance", "sample_code", "build_code", "syndrome", "encode",
    "sample_codeword", "sample_error", "code_to_json", "code_from_json",
    "DecoderConfig", "DecodeOutcome", "decode",
    "ProbParams", "prob_report",
    "TrialStats", "estimate_pt", "estimate_qt", "simulate_decoding",
    "ParameterError", "ConsistencyError", "ConstructionError",
]
