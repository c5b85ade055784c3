"""Spectral solver for the 1D first-order system

    du/dt = -d/dx S_N[ q(v) ],      dv/dt = -d/dx u,

with a monotone flux q (q' > 0) and its antiderivative Q.  The pair carries
the convex energy integral E = int( u^2/2 + Q(v) ) dx, conserved exactly by
the semi-discrete truncated scheme: the flux modes beyond degree N that the
projection drops are orthogonal to du/dx.

q(v) is evaluated pointwise on an oversampled grid (>= 4N+1 points) and
projected back to degree N, which keeps the projection quadrature error
spectrally small for the analytic laws shipped here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagnostics import resample
from .fourier import SpectralField, smooth_fft_size

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PressureLaw:
    """Monotone flux q with derivative dq > 0 and antiderivative (dQ = q).

    domain_min, when set, is an open lower bound on admissible v values;
    the solver aborts when the nodal v leaves the domain.
    """

    name: str
    q: object
    dq: object
    antiderivative: object
    domain_min: float | None = None

    def check_domain(self, values: np.ndarray, t: float | None = None) -> None:
        if self.domain_min is None:
            return
        low = float(np.min(values))
        if low <= self.domain_min:
            when = "" if t is None else f" at t = {t:.6g}"
            raise ValueError(
                f"{self.name} law needs v > {self.domain_min:.6g}, "
                f"but the grid minimum reached {low:.6g}{when}"
            )


def linear_law() -> PressureLaw:
    """q(v) = v: the system is the classical second-order wave equation."""
    return PressureLaw(
        name="linear",
        q=lambda v: v,
        dq=lambda v: np.ones_like(np.asarray(v, dtype=float)),
        antiderivative=lambda v: 0.5 * v**2,
    )


def exponential_law() -> PressureLaw:
    """q(v) = e^v: globally monotone, no vacuum, energy density e^v."""
    return PressureLaw(name="exponential", q=np.exp, dq=np.exp, antiderivative=np.exp)


def gamma_law(exponent: float = 1.4) -> PressureLaw:
    """q(v) = -v^(-gamma) on v > 0 (the sign makes q increasing as required)."""
    if exponent <= 1.0:
        raise ValueError("gamma-law exponent must exceed 1")
    g = float(exponent)
    return PressureLaw(
        name=f"gamma({g:g})",
        q=lambda v: -(v ** (-g)),
        dq=lambda v: g * v ** (-g - 1.0),
        antiderivative=lambda v: v ** (1.0 - g) / (g - 1.0),
        domain_min=0.0,
    )


@dataclass(frozen=True)
class IsentropicState:
    """Velocity and specific-volume coefficient pair at equal degree."""

    u: SpectralField
    v: SpectralField

    def __post_init__(self):
        if self.u.degree != self.v.degree:
            raise ValueError(
                f"component degrees differ: u has {self.u.degree}, v has {self.v.degree}"
            )

    @property
    def degree(self) -> int:
        return self.u.degree

    def pack(self) -> np.ndarray:
        return np.stack([self.u.coeffs, self.v.coeffs])

    @classmethod
    def unpack(cls, degree: int, y: np.ndarray) -> "IsentropicState":
        return cls(SpectralField(degree, y[0]), SpectralField(degree, y[1]))


def sample_state(u_func, v_func, degree: int) -> IsentropicState:
    from .fourier import NodalField, analyze

    return IsentropicState(
        analyze(NodalField.sample(u_func, degree)),
        analyze(NodalField.sample(v_func, degree)),
    )


def projected_flux_coeffs(vhat: np.ndarray, law: PressureLaw, t: float | None = None) -> np.ndarray:
    """Degree-N modes of q(v) via pointwise evaluation on a 4N+1-or-finer grid."""
    N = (len(vhat) - 1) // 2
    P = smooth_fft_size(4 * N + 1)
    vvals = resample(vhat, P)
    law.check_domain(vvals, t)
    full = np.fft.fft(law.q(vvals)) / P
    k = np.arange(-N, N + 1)
    return full[k % P]


def make_rhs(degree: int, law: PressureLaw):
    """Tendency of the packed (2, 2N+1) coefficient array [u_hat, v_hat]."""
    k = np.arange(-degree, degree + 1)

    def rhs(t, y):
        uhat, vhat = y
        qhat = projected_flux_coeffs(vhat, law, t)
        return np.stack([-1j * k * qhat, -1j * k * uhat])

    return rhs


def total_entropy(state: IsentropicState, law: PressureLaw) -> float:
    """int( u^2/2 + Q(v) ) dx by quadrature on an 8N-point grid."""
    N = state.degree
    P = max(8 * N, 2 * N + 1)
    uvals = resample(state.u.coeffs, P)
    vvals = resample(state.v.coeffs, P)
    law.check_domain(vvals)
    density = 0.5 * uvals**2 + law.antiderivative(vvals)
    return float(TWO_PI / P * np.sum(density))


def entropy_rate(state: IsentropicState, law: PressureLaw) -> float:
    """Instantaneous d/dt of total_entropy under the semi-discrete scheme.

    Pairs the tendencies against the energy gradient (u, q(v)) on the same
    8N quadrature grid; zero to rounding by the orthogonality of the dropped
    flux tail against du/dx.
    """
    N = state.degree
    tend = make_rhs(N, law)(0.0, state.pack())
    P = max(8 * N, 2 * N + 1)
    uvals = resample(state.u.coeffs, P)
    vvals = resample(state.v.coeffs, P)
    du = resample(tend[0], P)
    dv = resample(tend[1], P)
    return float(TWO_PI / P * np.sum(uvals * du + law.q(vvals) * dv))


def exact_wave_solution(initial: IsentropicState, t: float) -> IsentropicState:
    """Closed-form evolution for the linear law q(v) = v.

    The characteristic combinations u + v and u - v ride along x - t and
    x + t; each is translated exactly in coefficient space.
    """
    N = initial.degree
    k = np.arange(-N, N + 1)
    rhat = (initial.u.coeffs + initial.v.coeffs) * np.exp(-1j * k * t)
    shat = (initial.u.coeffs - initial.v.coeffs) * np.exp(1j * k * t)
    return IsentropicState(
        SpectralField(N, 0.5 * (rhat + shat)),
        SpectralField(N, 0.5 * (rhat - shat)),
    )
