"""Symbolic engine for the birational model of a Grassmannian chart.

Builds the defining binomial system of the model, runs the ϑ, ℘ and ℓ
blowups as a chart atlas, transports Γ-schemes through it and certifies
smoothness by Jacobian ranks over small prime fields.
"""

__version__ = "0.1.0"

from .blowup import Atlas, PipelineConfig, run_pipeline, theta_atlas
from .certify import birationality_probe, certify_smooth, enumerate_points, jacobian_rank_at
from .gamma import Gamma, Matroid, matroid_to_gamma
from .indexing import parse_index, upsilon
from .model import defining_system, kernel_binomials
from .relations import primary_family

__all__ = [
    "Atlas", "Gamma", "Matroid", "PipelineConfig", "birationality_probe", "certify_smooth",
    "defining_system", "enumerate_points", "jacobian_rank_at", "kernel_binomials",
    "matroid_to_gamma", "parse_index", "primary_family", "run_pipeline", "theta_atlas", "upsilon",
]
