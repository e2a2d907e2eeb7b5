"""
Furstenberg Lab - exact finite-field constructions, refinements and incidence checks.
"""

__version__ = "1.0.0"
__description__ = "Exact experiments with Furstenberg sets over finite fields"

from .config import LabConfig, PipelineConfig
from .constructions import FurstenbergInstance, build_furstenberg, build_prime_furstenberg, build_psquare
from .ff_core import Field
from .incidence_lab import furstenberg_check, run_pipeline
from .lw_refine import GridSet, refine

__all__ = [
    "Field",
    "FurstenbergInstance",
    "GridSet",
    "LabConfig",
    "PipelineConfig",
    "build_furstenberg",
    "build_prime_furstenberg",
    "build_psquare",
    "furstenberg_check",
    "refine",
    "run_pipeline",
]
