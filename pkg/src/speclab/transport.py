"""1D linear transport u_t + (q(x) u)_x = 0 on the periodic interval.

Three semi-discretizations of degree N:

* spectral      du/dt = -d/dx S_N[q u_N]          (exact truncated convolution)
* pseudospectral du/dt = -d/dx I_N[q u_N]         (grid product, aliasing kept)
* two_thirds    du/dt = -d/dx I_N[q S_R u_N]      (grid product of smoothed field)

plus the closed imaginary-mode recursion of the q = -sin x model problem
db_k/dt = (k/2)(b_{k-1} - b_{k+1}), b_0 = 0, b_{N+1} = -b_N, which the
pseudospectral scheme reproduces exactly on purely imaginary data (mode N+1
of the product aliases to -N on the 2N+1 grid, which is where the closure
comes from).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fourier import (
    NodalField,
    SmoothingProfile,
    SpectralField,
    coeffs_from_values,
    grid_points,
    values_from_coeffs,
)

TWO_PI = 2.0 * np.pi

_FINE = 8192  # quadrature grid for coefficient functions without closed forms


class Coefficient:
    """A smooth periodic coefficient q(x): callable plus spectrum on demand.

    The spectrum comes from a closed-form mode table when one is given,
    otherwise from a high-resolution DFT of the callable (quadrature error is
    spectrally small for the analytic coefficients used here).
    """

    def __init__(self, func, dfunc=None, modes=None, name="q"):
        self.func = func
        self.dfunc = dfunc
        self.name = name
        self._modes = dict(modes) if modes is not None else None
        self._cache = {}

    def __call__(self, x):
        return self.func(x)

    def derivative(self, x):
        if self.dfunc is not None:
            return self.dfunc(x)
        # spectral differentiation of the quadrature spectrum
        deg = 512
        c = self.spectrum(deg)
        k = np.arange(-deg, deg + 1)
        from .fourier import evaluate

        out = evaluate(1j * k * c, np.atleast_1d(np.asarray(x, dtype=float))).real
        return out if np.ndim(x) else float(out[0])

    def spectrum(self, degree: int) -> np.ndarray:
        """Centered coefficients q_hat(k), |k| <= degree."""
        if degree in self._cache:
            return self._cache[degree]
        if self._modes is not None:
            c = np.zeros(2 * degree + 1, dtype=np.complex128)
            for k, val in self._modes.items():
                if abs(k) <= degree:
                    c[k + degree] = val
        else:
            if 2 * degree + 1 > _FINE // 2:
                raise ValueError(f"coefficient spectrum request degree {degree} too large for quadrature grid")
            x = TWO_PI * np.arange(_FINE) / _FINE
            full = np.fft.fft(self.func(x)) / _FINE
            idx = np.arange(-degree, degree + 1) % _FINE
            c = full[idx]
        self._cache[degree] = c
        return c

    def max_abs(self) -> float:
        x = TWO_PI * np.arange(4096) / 4096
        return float(np.abs(self.func(x)).max())

    def max_abs_derivative(self) -> float:
        x = TWO_PI * np.arange(4096) / 4096
        return float(np.abs(self.derivative(x)).max())


def sin_coefficient(scale: float = 1.0) -> Coefficient:
    """q(x) = scale * sin x with its exact two-mode spectrum."""
    return Coefficient(
        lambda x: scale * np.sin(x),
        dfunc=lambda x: scale * np.cos(x),
        modes={1: -0.5j * scale, -1: 0.5j * scale},
        name=f"{scale}*sin" if scale != 1.0 else "sin",
    )


@dataclass(frozen=True)
class TransportProblem:
    q: Coefficient
    degree: int

    @property
    def max_speed(self) -> float:
        return self.q.max_abs()


@dataclass(frozen=True)
class ImagModeState:
    """Imaginary parts b_k, k = 1..N, of the q = -sin x model's coefficients."""

    degree: int
    b: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.b, dtype=np.float64)
        if arr.shape != (self.degree,):
            raise ValueError(f"need {self.degree} imaginary modes, got shape {arr.shape}")
        object.__setattr__(self, "b", arr)


def truncated_convolution(qhat_full: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """(S_N[q u])_k = sum_{|j|<=N} qhat(k-j) u_j for |k| <= N.

    qhat_full must cover |k| <= 2N (length 4N+1, centered).
    """
    N = (len(coeffs) - 1) // 2
    if len(qhat_full) != 4 * N + 1:
        raise ValueError("coefficient spectrum must cover |k| <= 2N")
    conv = np.convolve(coeffs, qhat_full)
    return conv[2 * N : 4 * N + 1]


def make_rhs_spectral(problem: TransportProblem):
    """Tendency -d/dx S_N[q u_N] on raw centered coefficient arrays."""
    N = problem.degree
    qhat = problem.q.spectrum(2 * N)
    ik = 1j * np.arange(-N, N + 1)

    def rhs(t, c):
        return -ik * truncated_convolution(qhat, c)

    return rhs


def make_rhs_pseudospectral(problem: TransportProblem):
    """Tendency -d/dx I_N[q u_N]: collocation product on the 2N+1 grid."""
    N = problem.degree
    qvals = problem.q(grid_points(N))
    ik = 1j * np.arange(-N, N + 1)

    def rhs(t, c):
        vals = values_from_coeffs(c)
        return -ik * coeffs_from_values(qvals * vals)

    return rhs


def make_rhs_two_thirds(problem: TransportProblem, profile: SmoothingProfile):
    """Tendency -d/dx I_N[q S_R u_N]: the de-aliased variant."""
    if profile.kind != "two_thirds":
        raise ValueError("two-thirds scheme needs a two_thirds profile")
    if profile.degree != problem.degree:
        raise ValueError("profile degree does not match problem degree")
    N = problem.degree
    qvals = problem.q(grid_points(N))
    sigma = profile.factors
    ik = 1j * np.arange(-N, N + 1)

    def rhs(t, c):
        vals = values_from_coeffs(sigma * c)
        return -ik * coeffs_from_values(qvals * vals)

    return rhs


def make_rhs_imag_modes(degree: int, zero_last_mode: bool = False):
    """The model recursion db_k/dt = (k/2)(b_{k-1} - b_{k+1}) with its closure.

    zero_last_mode applies the stabilizing fix of holding the top mode at zero
    for all time: neighbors see b_N = 0 and its own tendency is dropped, which
    removes the reflecting closure term entirely.
    """
    k = np.arange(1, degree + 1, dtype=np.float64)

    def rhs(t, b):
        if zero_last_mode:
            b = np.concatenate((b[:-1], [0.0]))
        below = np.concatenate(([0.0], b[:-1]))
        above = np.concatenate((b[1:], [-b[-1]]))
        tend = 0.5 * k * (below - above)
        if zero_last_mode:
            tend[-1] = 0.0
        return tend

    return rhs


def imag_modes_to_field(state: ImagModeState) -> SpectralField:
    """Embed b_k as the purely imaginary Hermitian coefficients i*b_k."""
    N = state.degree
    c = np.zeros(2 * N + 1, dtype=np.complex128)
    c[N + 1 :] = 1j * state.b
    c[:N] = -1j * state.b[::-1]
    return SpectralField(N, c)


def aliasing_functional(u: SpectralField, q: Coefficient, q_degree: int | None = None) -> float:
    """Energy production rate of the aliasing term: integral u_N d/dx A_N[q u_N] dx.

    Evaluated as the lattice sum over mode pairs whose separation differs by a
    nonzero multiple of 2N+1, using the coefficient spectrum out to q_degree
    (default 4N+2, enough for the first image shell and change).
    """
    N = u.degree
    span = 2 * N + 1
    Q = q_degree if q_degree is not None else 4 * N + 2
    if Q < 4 * N + 2:
        raise ValueError("aliasing functional needs the coefficient spectrum to |k| >= 4N+2")
    qhat = q.spectrum(Q)

    # G(d) = sum over nonzero image shifts of qhat(d + l*(2N+1)), |d| <= 2N
    d = np.arange(-2 * N, 2 * N + 1)
    G = np.zeros(len(d), dtype=np.complex128)
    l = 1
    while True:
        hit = False
        for shift in (l * span, -l * span):
            idx = d + shift
            mask = np.abs(idx) <= Q
            if mask.any():
                G[mask] += qhat[idx[mask] + Q]
                hit = True
        if not hit:
            break
        l += 1

    # H(d) = sum_j j conj(u_j) u_{j-d}; F = 2*pi*i sum_d G(d) H(d)
    k = np.arange(-N, N + 1)
    w = k * np.conj(u.coeffs)
    H = np.correlate(w, np.conj(u.coeffs), mode="full")
    total = TWO_PI * 1j * np.sum(G * H)
    return float(total.real)


def _trace_characteristics(q: Coefficient, x: np.ndarray, t: float, dt: float):
    """Backward feet and Jacobians: dY/ds = -q(Y), dJ/ds = -q'(Y) J, s in [0, t]."""
    Y = x.copy()
    J = np.ones_like(x)
    nsteps = int(np.ceil(t / dt - 1e-12)) if t > 0 else 0

    def f(state):
        y, j = state
        return np.array([-q(y), -q.derivative(y) * j])

    for n in range(nsteps):
        h = min(dt, t - n * dt)
        s = np.array([Y, J])
        k1 = f(s)
        k2 = f(s + 0.5 * h * k1)
        k3 = f(s + 0.5 * h * k2)
        k4 = f(s + h * k3)
        s = s + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        Y, J = s
    return Y, J


def exact_linear_solution(
    q: Coefficient, u0, t: float, degree: int, dt: float = 1e-3, check: bool = True
) -> NodalField:
    """Characteristics reference: trace feet backward, transport with the Jacobian.

    u(x, t) = u0(Y(x, t)) * J(x, t) on the collocation grid, with the foot map
    Y and its spatial derivative J integrated by classical RK4 at fixed dt.
    With check on, the trace is repeated at dt/2 and the call is rejected if
    the two answers differ by more than 1e-10 (relative to the field scale),
    so an accepted result is reference-grade.
    """
    if t < 0:
        raise ValueError("reference solution needs t >= 0")
    x = grid_points(degree)
    Y, J = _trace_characteristics(q, x, float(t), dt)
    vals = u0(np.mod(Y, TWO_PI)) * J
    if check and t > 0:
        Y2, J2 = _trace_characteristics(q, x, float(t), dt / 2)
        vals2 = u0(np.mod(Y2, TWO_PI)) * J2
        scale = max(1.0, float(np.abs(vals2).max()))
        gap = float(np.abs(vals - vals2).max())
        if gap > 1e-10 * scale:
            raise RuntimeError(
                f"characteristic tracer not converged: dt={dt} vs dt/2 differ by {gap:.3e}"
            )
        vals = vals2
    return NodalField(degree, vals)
