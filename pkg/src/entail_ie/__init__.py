"""Zero-shot information extraction via textual entailment over user-written templates."""

from .backends import (
    EntailmentScore,
    HttpEntailmentBackend,
    MockEntailmentBackend,
    OracleTable,
    load_oracle,
    make_backend,
)
from .candidates import Candidate, Span
from .inference import NEGATIVE_LABEL, Extraction, InferenceConfig, classify_candidate, classify_events
from .pipeline import DocumentAnnotations, GoldSpans, RunConfig, run_e2e, run_task
from .schema import Schema, Template, load_schema, save_schema, validate_schema
from .verbalize import Hypothesis, hypotheses_for, instantiate

__version__ = "0.1.0"

__all__ = [
    "Candidate",
    "DocumentAnnotations",
    "EntailmentScore",
    "Extraction",
    "GoldSpans",
    "HttpEntailmentBackend",
    "Hypothesis",
    "InferenceConfig",
    "MockEntailmentBackend",
    "NEGATIVE_LABEL",
    "OracleTable",
    "RunConfig",
    "Schema",
    "Span",
    "Template",
    "classify_candidate",
    "classify_events",
    "hypotheses_for",
    "instantiate",
    "load_oracle",
    "load_schema",
    "make_backend",
    "run_e2e",
    "run_task",
    "save_schema",
    "validate_schema",
]
