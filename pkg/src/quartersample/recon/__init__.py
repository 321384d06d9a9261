"""Reconstruction of full HR images from masked acquisitions."""

from .fse import FseConfig, reconstruct_fse, reconstruct_fse_reference
from .lin import DegenerateInputError, reconstruct_lin
from .metrics import psnr
from .result import ReconResult

# Reconstructor slot used by the benchmark: label -> callable(masked, fse_config).
RECONSTRUCTORS = {
    "fse": lambda masked, cfg: reconstruct_fse(masked, cfg),
    "lin": lambda masked, cfg: reconstruct_lin(masked),
}


def register(label, func):
    """Add a reconstructor ``func(masked, fse_config) -> ReconResult``."""
    RECONSTRUCTORS[label] = func


def reconstruct(masked, method="fse", cfg=None) -> ReconResult:
    try:
        func = RECONSTRUCTORS[method]
    except KeyError:
        raise ValueError(f"unknown reconstruction method {method!r}") from None
    return func(masked, cfg or FseConfig())


__all__ = [
    "FseConfig", "ReconResult", "DegenerateInputError", "RECONSTRUCTORS",
    "reconstruct", "reconstruct_fse", "reconstruct_fse_reference", "reconstruct_lin",
    "psnr", "register",
]
