"""Inviscid Burgers u_t + (u^2/2)_x = 0: spectral, 2/3 de-aliased, and
spectral-viscosity semi-discretizations, plus two reference oracles.

* spectral    du/dt = -1/2 d/dx S_N[u_N^2]        (exact truncated square)
* two_thirds  du/dt = -1/2 d/dx I_N[(S_R u_N)^2]  (smoothed collocation square)
* sv          du/dt = -1/2 d/dx I_N[u_N^2] - N sigma_sv(|k|/N) u_hat_k

Oracles: the pre-shock solution by safeguarded Newton on the characteristic
relation u = u0(x - u t), and the post-shock entropy solution by a first-order
Godunov finite-volume scheme with exact Riemann fluxes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagnostics import resample, total_variation
from .fourier import (
    NodalField,
    SmoothingProfile,
    SpectralField,
    build_mollifier,
    build_sv_profile,
    coeffs_from_values,
    grid_points,
    smooth_fft_size,
    values_from_coeffs,
)

TWO_PI = 2.0 * np.pi

SCAN_POINTS = 100_000  # fine grid for the characteristic-crossing-time scan


def square_spectrum(coeffs: np.ndarray) -> np.ndarray:
    """Exact centered coefficients of u_N^2 out to degree 2N (length 4N+1).

    Computed by transform-square-transform on a zero-padded grid large enough
    (>= 4N+2 points) that the degree-2N product cannot alias.
    """
    N = (len(coeffs) - 1) // 2
    P = smooth_fft_size(4 * N + 2)
    buf = np.zeros(P, dtype=np.complex128)
    k = np.arange(-N, N + 1)
    buf[k % P] = coeffs
    vals = np.fft.ifft(buf).real * P
    full = np.fft.fft(vals * vals) / P
    kk = np.arange(-2 * N, 2 * N + 1)
    return full[kk % P]


def make_rhs_spectral(degree: int):
    """Tendency -1/2 d/dx S_N[u_N^2] on raw centered coefficient arrays."""
    N = degree
    ik = 1j * np.arange(-N, N + 1)

    def rhs(t, c):
        sq = square_spectrum(c)
        return -0.5 * ik * sq[N : 3 * N + 1]

    return rhs


def make_rhs_two_thirds(degree: int, profile: SmoothingProfile):
    """Tendency -1/2 d/dx I_N[(S_R u_N)^2]: collocation square of the smoothed field."""
    if profile.kind != "two_thirds":
        raise ValueError("two-thirds scheme needs a two_thirds profile")
    if profile.degree != degree:
        raise ValueError("profile degree does not match problem degree")
    sigma = profile.factors
    ik = 1j * np.arange(-degree, degree + 1)

    def rhs(t, c):
        v = values_from_coeffs(sigma * c)
        return -0.5 * ik * coeffs_from_values(v * v)

    return rhs


def make_rhs_sv(degree: int, profile: SmoothingProfile):
    """Collocation square plus modal hyper-dissipation -N sigma_sv(|k|/N) u_hat."""
    if profile.kind != "sv":
        raise ValueError("spectral-viscosity scheme needs an sv profile")
    if profile.degree != degree:
        raise ValueError("profile degree does not match problem degree")
    damp = degree * profile.factors
    ik = 1j * np.arange(-degree, degree + 1)

    def rhs(t, c):
        v = values_from_coeffs(c)
        return -0.5 * ik * coeffs_from_values(v * v) - damp * c

    return rhs


@dataclass(frozen=True)
class BurgersProblem:
    """Initial data, degree, and variant selector for one Burgers run."""

    u0: object  # callable x -> values
    degree: int
    variant: str = "spectral"  # spectral | two_thirds | sv
    sv_order: int = 1

    def __post_init__(self):
        if self.variant not in ("spectral", "two_thirds", "sv"):
            raise ValueError(f"unknown variant {self.variant!r}")

    def initial_coeffs(self) -> np.ndarray:
        return coeffs_from_values(self.u0(grid_points(self.degree)))

    def max_speed(self) -> float:
        x = TWO_PI * np.arange(4096) / 4096
        return float(np.abs(self.u0(x)).max())

    def make_rhs(self):
        if self.variant == "spectral":
            return make_rhs_spectral(self.degree)
        if self.variant == "two_thirds":
            return make_rhs_two_thirds(self.degree, build_mollifier(self.degree))
        return make_rhs_sv(self.degree, build_sv_profile(self.degree, self.sv_order))


# -- smooth-regime oracle --


def critical_time(u0, du0=None) -> float:
    """First characteristic crossing -1/min u0' by fine-grid scan (inf if u0' >= 0)."""
    x = TWO_PI * np.arange(SCAN_POINTS) / SCAN_POINTS
    if du0 is not None:
        slope = np.asarray(du0(x), dtype=float)
    else:
        vals = np.asarray(u0(x), dtype=float)
        slope = (np.roll(vals, -1) - np.roll(vals, 1)) * (SCAN_POINTS / (2.0 * TWO_PI))
    m = float(slope.min())
    if m >= 0.0:
        return float("inf")
    return -1.0 / m


def solve_characteristics(u0, t: float, x: np.ndarray, du0=None) -> np.ndarray:
    """u(x, t) from u = u0(x - u t), per point, residual <= 1e-12.

    Vectorized Newton from u = u0(x), with per-point bisection fallback; the
    pre-shock root is unique and bracketed by [min u0 - 1, max u0 + 1].
    """
    if t < 0:
        raise ValueError("smooth oracle needs t >= 0")
    tc = critical_time(u0, du0)
    if t >= tc:
        raise ValueError(f"t = {t} is past the characteristic crossing time {tc:.6g}")
    x = np.asarray(x, dtype=float)
    if t == 0.0:
        return np.asarray(u0(x), dtype=float)

    if du0 is None:
        h = 1e-6
        slope = lambda y: (np.asarray(u0(y + h)) - np.asarray(u0(y - h))) / (2.0 * h)
    else:
        slope = du0

    u = np.asarray(u0(x), dtype=float).copy()
    tol = 1e-13
    for _ in range(100):
        g = u - np.asarray(u0(x - u * t), dtype=float)
        if np.abs(g).max() <= tol:
            break
        gp = 1.0 + t * np.asarray(slope(x - u * t), dtype=float)
        gp = np.where(np.abs(gp) < 1e-12, 1e-12, gp)
        u = u - g / gp

    residual = np.abs(u - np.asarray(u0(x - u * t), dtype=float))
    bad = residual > 1e-12
    if bad.any():
        probe = TWO_PI * np.arange(4096) / 4096
        uvals = np.asarray(u0(probe), dtype=float)
        lo0, hi0 = float(uvals.min()) - 1.0, float(uvals.max()) + 1.0
        for i in np.nonzero(bad)[0]:
            lo, hi = lo0, hi0
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if mid - float(u0(x[i] - mid * t)) <= 0.0:
                    lo = mid
                else:
                    hi = mid
            u[i] = 0.5 * (lo + hi)
        residual = np.abs(u - np.asarray(u0(x - u * t), dtype=float))
        if residual.max() > 1e-12:
            raise RuntimeError(
                f"characteristic solve not converged: residual {float(residual.max()):.3e}"
            )
    return u


def exact_smooth_solution(u0, t: float, degree: int, du0=None) -> NodalField:
    """Pre-shock solution on the standard collocation grid."""
    return NodalField(degree, solve_characteristics(u0, t, grid_points(degree), du0))


# -- entropy-solution oracle --


@dataclass(frozen=True)
class EntropyReference:
    """Cell averages of the entropy solution from a Godunov run."""

    resolution: int
    time: float
    values: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.resolution) + 0.5) * TWO_PI / self.resolution

    def coarsen(self, factor: int) -> "EntropyReference":
        """Average blocks of cells (for self-convergence comparisons)."""
        if self.resolution % factor:
            raise ValueError("coarsening factor must divide the resolution")
        merged = self.values.reshape(self.resolution // factor, factor).mean(axis=1)
        return EntropyReference(self.resolution // factor, self.time, merged)


def _godunov_flux(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Exact Riemann solver flux for f(u) = u^2/2 (convex, sonic point at 0)."""
    fl = 0.5 * np.maximum(left, 0.0) ** 2
    fr = 0.5 * np.minimum(right, 0.0) ** 2
    return np.maximum(fl, fr)


def godunov_reference(u0, t: float, resolution: int, cfl: float = 0.45) -> EntropyReference:
    """First-order Godunov finite-volume solution at time t."""
    if resolution < 128:
        raise ValueError("reference resolution must be at least 128 cells")
    if t < 0:
        raise ValueError("reference needs t >= 0")
    M = resolution
    dx = TWO_PI / M
    u = np.asarray(u0((np.arange(M) + 0.5) * dx), dtype=np.float64).copy()
    time = 0.0
    while time < t - 1e-14 * max(1.0, t):
        speed = float(np.abs(u).max())
        dt = min(cfl * dx / max(speed, 1e-12), t - time)
        flux_right = _godunov_flux(u, np.roll(u, -1))
        u -= (dt / dx) * (flux_right - np.roll(flux_right, 1))
        time += dt
    return EntropyReference(M, t, u)


# -- instability and production diagnostics --


@dataclass(frozen=True)
class InstabilityReport:
    maxabs: float
    tv: float
    product: float
    product_over_sqrt_m: float
    m: float


def instability_functional(u: SpectralField, oversample: int = 16) -> InstabilityReport:
    """max|u| and TV on an oversampled grid, combined as maxabs * TV^2.

    The combination is reported raw and divided by sqrt(m) with m = 2N/3, the
    retained-band size whose square root bounds it from below post-shock.
    """
    if oversample < 8:
        raise ValueError("oversampling factor must be >= 8")
    N = u.degree
    vals = resample(u.coeffs, oversample * (2 * N + 1))
    maxabs = float(np.abs(vals).max())
    tv = total_variation(vals)
    product = maxabs * tv * tv
    m = 2.0 * N / 3.0
    return InstabilityReport(maxabs, tv, product, product / np.sqrt(m), m)


def energy_production(u: SpectralField, profile: SmoothingProfile) -> float:
    """(1/2) integral of u * d/dx (Id - S_R)[u^2] dx by exact modal sums.

    S_R is the given profile on the resolved band and zero beyond it, so the
    unresolved half of the square passes through (Id - S_R) untouched; only
    the |k| <= N part meets u in the inner product.
    """
    if profile.degree != u.degree:
        raise ValueError("profile degree does not match field degree")
    N = u.degree
    sq = square_spectrum(u.coeffs)
    resolved = sq[N : 3 * N + 1]
    k = np.arange(-N, N + 1)
    leftover = (1.0 - profile.factors) * resolved
    total = 0.5 * TWO_PI * np.sum(np.conj(u.coeffs) * (1j * k) * leftover)
    return float(total.real)
