"""Norms, oversampled functionals, and log-log rate fits."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .fourier import SmoothingProfile, SpectralField

TWO_PI = 2.0 * np.pi

OVERSAMPLE = 16


def resample(coeffs: np.ndarray, npoints: int) -> np.ndarray:
    """Values of the trig polynomial on an `npoints` uniform grid (npoints > 2*degree)."""
    N = (len(coeffs) - 1) // 2
    if npoints < len(coeffs):
        raise ValueError("resampling grid must be at least as fine as the field's own")
    buf = np.zeros(npoints, dtype=np.complex128)
    k = np.arange(-N, N + 1)
    buf[k % npoints] = coeffs
    return np.fft.ifft(buf).real * npoints


def oversampled_values(spec: SpectralField, factor: int = OVERSAMPLE) -> np.ndarray:
    return resample(spec.coeffs, factor * (2 * spec.degree + 1))


def total_variation(values: np.ndarray) -> float:
    """TV around the circle: sum of |increments| including the wrap-around one."""
    return float(np.abs(np.diff(values)).sum() + abs(values[0] - values[-1]))


@dataclass(frozen=True)
class NormReport:
    l2: float
    linf: float
    l6: float
    tv: float
    weighted_l2: float | None = None
    hs: dict = field(default_factory=dict)


def norms(spec: SpectralField, profile: SmoothingProfile | None = None, s_values=()) -> NormReport:
    """Standard norms of a field: exact where Parseval applies, oversampled otherwise.

    The 16x oversampled grid makes the L6 quadrature exact (degree 6N < grid
    size) and resolves linf and TV to well under the tolerances used anywhere
    in the package.
    """
    c = spec.coeffs
    power = np.sum(np.abs(c) ** 2)
    l2 = float(np.sqrt(TWO_PI * power))
    vals = oversampled_values(spec)
    h = TWO_PI / len(vals)
    report = {
        "l2": l2,
        "linf": float(np.abs(vals).max()),
        "l6": float((h * np.sum(vals**6)) ** (1.0 / 6.0)),
        "tv": total_variation(vals),
    }
    if profile is not None:
        if profile.degree != spec.degree:
            raise ValueError("profile degree does not match field degree")
        report["weighted_l2"] = float(np.sqrt(TWO_PI * np.sum(profile.factors * np.abs(c) ** 2)))
    if s_values:
        k = spec.wavenumbers
        report["hs"] = {
            s: float(np.sqrt(TWO_PI * np.sum((1.0 + k.astype(float) ** 2) ** s * np.abs(c) ** 2)))
            for s in s_values
        }
    return NormReport(**report)


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit of log(error) against log(N): error ~ C * N^(-slope)."""

    slope: float
    log_constant: float
    residual: float
    points: tuple


def fit_rate(sizes, errors) -> RateFit:
    """Fit a convergence rate from (N, error) pairs; needs >= 3 usable points.

    Nonpositive errors carry no rate information on a log scale; they are
    dropped with a warning (they typically mean the measurement hit roundoff).
    """
    sizes = np.asarray(sizes, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(sizes) != len(errors):
        raise ValueError("sizes and errors must have equal length")
    keep = errors > 0.0
    if not np.all(keep):
        warnings.warn(f"fit_rate: dropping {int((~keep).sum())} nonpositive error value(s)")
    sizes, errors = sizes[keep], errors[keep]
    if len(sizes) < 3:
        raise ValueError("rate fit needs at least 3 points with positive error")
    logn, loge = np.log(sizes), np.log(errors)
    A = np.vstack([logn, np.ones_like(logn)]).T
    (m, b), res, *_ = np.linalg.lstsq(A, loge, rcond=None)
    residual = float(res[0]) if len(res) else 0.0
    return RateFit(slope=float(-m), log_constant=float(b), residual=residual,
                   points=tuple(zip(sizes.tolist(), errors.tolist())))
