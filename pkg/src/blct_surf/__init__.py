"""Exact intersection theory and blct certificates for the surfaces I.9B.r.

Submodules: ``lattice`` (Picard lattice and curve catalog), ``positivity``
(Zariski decomposition, volumes, thresholds), ``vanishing`` (volume profiles
and vanishing-order bounds), ``lc_local`` (local lc criteria and the blow-up
oracle), ``kstab`` (per-instance certificates) and ``cli``.
"""
from __future__ import annotations

from .kstab import Certificate, lambda_of, sweep, verify_claim, verify_theorem_main
from .lattice import DivisorClass, ModelError, ModelParams, SurfaceModel, baseline_model, build_model
from .positivity import pseff_threshold, seshadri, volume, zariski
from .vanishing import finite_k_ord, s_bound

__all__ = [
    "Certificate", "DivisorClass", "ModelError", "ModelParams", "SurfaceModel",
    "baseline_model", "build_model", "finite_k_ord", "lambda_of", "pseff_threshold",
    "s_bound", "seshadri", "sweep", "verify_claim", "verify_theorem_main", "volume", "zariski",
]
__version__ = "0.1.0"
