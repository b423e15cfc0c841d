"""Steerable-pyramid weighted loss: decomposition, weight maps, loss, metrics."""

from .filters import FilterBankSpec
from .pyramid import PyramidDecomposition, decompose, reconstruct
from .spwloss import (
    SpwConfig,
    combined_spw_weight,
    pixel_weights,
    spw_map,
    weighted_ce_gradient,
    weighted_ce_loss,
)
from .metrics import evaluate_all

__version__ = "0.1.0"

__all__ = [
    "FilterBankSpec",
    "PyramidDecomposition",
    "SpwConfig",
    "combined_spw_weight",
    "decompose",
    "evaluate_all",
    "pixel_weights",
    "reconstruct",
    "spw_map",
    "weighted_ce_gradient",
    "weighted_ce_loss",
    "__version__",
]
