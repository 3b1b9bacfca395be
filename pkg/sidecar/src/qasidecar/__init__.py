"""Annotation and QA-model sidecar for the synthesis engine."""

from .annotate import annotate_file, annotate_pair
from .qamodel import TinySpanModel
from .server import create_app

__version__ = "0.1.0"
