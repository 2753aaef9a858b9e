"""Underwater image synthesis, CNN enhancement and evaluation, CPU only."""

__version__ = "0.1.0"

from .model import Model, ModelConfig, backward, build, forward, parameter_count
from .watersim import WATER_TYPES, SynthesisParams, WaterType, synthesize, transmission

__all__ = [
    "Model",
    "ModelConfig",
    "SynthesisParams",
    "WATER_TYPES",
    "WaterType",
    "backward",
    "build",
    "forward",
    "parameter_count",
    "synthesize",
    "transmission",
]
