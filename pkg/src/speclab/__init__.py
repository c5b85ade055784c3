"""speclab: Fourier spectral, 2/3 de-aliased, and spectral-viscosity schemes
for periodic model problems, with diagnostics and a reproducible experiment
harness."""

__version__ = "0.1.0"

from .fourier import (
    NodalField,
    SmoothingProfile,
    SpectralField,
    aliasing_error,
    analyze,
    apply_profile,
    build_mollifier,
    build_sv_profile,
    differentiate,
    project,
    synthesize,
)

__all__ = [
    "NodalField",
    "SmoothingProfile",
    "SpectralField",
    "aliasing_error",
    "analyze",
    "apply_profile",
    "build_mollifier",
    "build_sv_profile",
    "differentiate",
    "project",
    "synthesize",
    "__version__",
]
