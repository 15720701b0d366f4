"""HTTP sidecar serving 3-way textual-entailment scores."""

from .app import create_app
from .models import HashScoringModel, TransformersModel, load_model, resolve_label_order

__version__ = "0.1.0"

__all__ = [
    "HashScoringModel",
    "TransformersModel",
    "create_app",
    "load_model",
    "resolve_label_order",
]
