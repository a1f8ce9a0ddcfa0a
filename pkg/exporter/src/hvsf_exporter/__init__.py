"""Companion exporter: pretrained backbone activations to HVSF feature files."""

from .export import BRANCHES, ExportError, ExportJob, export
from .hvsf import read_tensor, write_tensor
from .models import ModelError, load_model

__version__ = "0.1.0"

__all__ = [
    "BRANCHES",
    "ExportError",
    "ExportJob",
    "export",
    "read_tensor",
    "write_tensor",
    "ModelError",
    "load_model",
    "__version__",
]
