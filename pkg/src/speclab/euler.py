"""2D incompressible Euler on the periodic square, in modal form.

State: two centered coefficient arrays u_hat_alpha(k1, k2), |k_i| <= N, kept
divergence-free by the Leray projection P(k) = Id - k k^T/|k|^2.

* spectral    du/dt = -P grad . S_N(u (x) u)   (tensor products on a padded
              grid with >= 2x points per axis: exact, fully de-aliased)
* two_thirds  du/dt = -P grad . I_N(S_R u (x) S_R u)  (products on the raw
              (2N+1)^2 grid, genuine aliasing retained; S_R is the radial
              smoothing sigma(|k|_2/N) built from the 1D mollifier)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fourier import mollifier, smooth_fft_size

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class VelocityField2D:
    """Velocity coefficients with shape (2, 2N+1, 2N+1), axes (component, k1, k2)."""

    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        M = 2 * self.degree + 1
        if c.shape != (2, M, M):
            raise ValueError(f"degree {self.degree} needs shape (2, {M}, {M}), got {c.shape}")
        object.__setattr__(self, "coeffs", c)

    @property
    def wavenumbers(self):
        k = np.arange(-self.degree, self.degree + 1)
        return np.meshgrid(k, k, indexing="ij")

    def hermitian_defect(self) -> float:
        flipped = np.conj(self.coeffs[:, ::-1, ::-1])
        return float(np.abs(self.coeffs - flipped).max())

    def divergence_defect(self) -> float:
        K1, K2 = self.wavenumbers
        return float(np.abs(K1 * self.coeffs[0] + K2 * self.coeffs[1]).max())


def grid_points_2d(degree: int):
    x = TWO_PI * np.arange(2 * degree + 1) / (2 * degree + 1)
    return np.meshgrid(x, x, indexing="ij")


def coeffs_from_values_2d(values: np.ndarray) -> np.ndarray:
    """Centered interpolation coefficients of real grid data on (2N+1)^2 points."""
    M = values.shape[0]
    if values.shape != (M, M) or M % 2 != 1:
        raise ValueError(f"need square odd-sized grid data, got {values.shape}")
    return np.fft.fftshift(np.fft.fft2(values)) / (M * M)


def values_from_coeffs_2d(coeffs: np.ndarray) -> np.ndarray:
    M = coeffs.shape[0]
    return np.fft.ifft2(np.fft.ifftshift(coeffs)).real * (M * M)


def _padded_values(coeffs: np.ndarray, size: int) -> np.ndarray:
    """Synthesize a centered (2N+1)^2 coefficient array on a size^2 grid."""
    M = coeffs.shape[0]
    N = (M - 1) // 2
    k = np.arange(-N, N + 1)
    buf = np.zeros((size, size), dtype=np.complex128)
    buf[np.ix_(k % size, k % size)] = coeffs
    return np.fft.ifft2(buf).real * (size * size)


def _truncated_coeffs(values: np.ndarray, degree: int) -> np.ndarray:
    """Exact modes |k_i| <= degree of real data on a big grid (no aliasing if resolved)."""
    size = values.shape[0]
    full = np.fft.fft2(values) / (size * size)
    k = np.arange(-degree, degree + 1)
    return full[np.ix_(k % size, k % size)]


def leray_project(u: VelocityField2D) -> VelocityField2D:
    """Remove the gradient part: u_hat <- u_hat - k (k . u_hat)/|k|^2; mean mode kept."""
    K1, K2 = u.wavenumbers
    ksq = (K1 * K1 + K2 * K2).astype(np.float64)
    ksq[u.degree, u.degree] = 1.0  # the k = 0 dot product is 0, so this is inert
    dot = (K1 * u.coeffs[0] + K2 * u.coeffs[1]) / ksq
    return VelocityField2D(u.degree, np.stack([u.coeffs[0] - K1 * dot, u.coeffs[1] - K2 * dot]))


def radial_two_thirds_multiplier(degree: int) -> np.ndarray:
    """sigma(|k|_2 / N) on the centered (2N+1)^2 lattice (the 2D smoothing)."""
    k = np.arange(-degree, degree + 1)
    K1, K2 = np.meshgrid(k, k, indexing="ij")
    return mollifier(np.sqrt(K1 * K1 + K2 * K2) / degree)


def _divergence_of_tensor(T11, T12, T22, degree):
    """-P grad . T for a symmetric tensor given by its centered coefficients."""
    k = np.arange(-degree, degree + 1)
    K1, K2 = np.meshgrid(k, k, indexing="ij")
    t1 = -1j * (K1 * T11 + K2 * T12)
    t2 = -1j * (K1 * T12 + K2 * T22)
    return leray_project(VelocityField2D(degree, np.stack([t1, t2])))


def make_rhs_spectral(degree: int):
    """Tendency -P grad . S_N(u (x) u): exact tensor convolution by 2x padding."""
    N = degree
    P = smooth_fft_size(2 * (2 * N + 1))

    def rhs(t, c):
        u = VelocityField2D(N, c)
        v1 = _padded_values(u.coeffs[0], P)
        v2 = _padded_values(u.coeffs[1], P)
        T11 = _truncated_coeffs(v1 * v1, N)
        T12 = _truncated_coeffs(v1 * v2, N)
        T22 = _truncated_coeffs(v2 * v2, N)
        return _divergence_of_tensor(T11, T12, T22, N).coeffs

    return rhs


def make_rhs_two_thirds(degree: int):
    """Tendency -P grad . I_N(S_R u (x) S_R u): raw-grid products of the smoothed field."""
    N = degree
    sigma = radial_two_thirds_multiplier(N)

    def rhs(t, c):
        u = VelocityField2D(N, c)
        v1 = values_from_coeffs_2d(sigma * u.coeffs[0])
        v2 = values_from_coeffs_2d(sigma * u.coeffs[1])
        T11 = coeffs_from_values_2d(v1 * v1)
        T12 = coeffs_from_values_2d(v1 * v2)
        T22 = coeffs_from_values_2d(v2 * v2)
        return _divergence_of_tensor(T11, T12, T22, N).coeffs

    return rhs


def divergence(u: VelocityField2D) -> np.ndarray:
    """Scalar coefficients i k . u_hat (centered (2N+1)^2 array)."""
    K1, K2 = u.wavenumbers
    return 1j * (K1 * u.coeffs[0] + K2 * u.coeffs[1])


def vorticity(u: VelocityField2D) -> np.ndarray:
    """Scalar curl coefficients i (k1 u_hat_2 - k2 u_hat_1)."""
    K1, K2 = u.wavenumbers
    return 1j * (K1 * u.coeffs[1] - K2 * u.coeffs[0])


def energy(u: VelocityField2D) -> float:
    """(1/2) integral |u|^2 over the square: 2 pi^2 sum |u_hat|^2."""
    return 2.0 * np.pi**2 * float(np.sum(np.abs(u.coeffs) ** 2))


def weighted_energy(u: VelocityField2D, sigma: np.ndarray) -> float:
    return 2.0 * np.pi**2 * float(np.sum(sigma * (np.abs(u.coeffs[0]) ** 2 + np.abs(u.coeffs[1]) ** 2)))


def enstrophy(u: VelocityField2D) -> float:
    """(1/2) integral omega^2: recorded without acceptance thresholds."""
    return 2.0 * np.pi**2 * float(np.sum(np.abs(vorticity(u)) ** 2))


def exact_flow(name: str, degree: int, t: float = 0.0) -> VelocityField2D:
    """Verification fixtures: a stationary cell flow and a smooth shear layer.

    taylor_green   u = (sin x1 cos x2, -cos x1 sin x2): stationary for every t
                   (its advection term is a pure gradient, annihilated by the
                   projection), energy pi^2, vorticity 2 sin x1 sin x2.
    shear_layer_smooth  two smoothed counterflowing bands plus a small
                   transverse perturbation; initial data for conservation
                   runs only (no closed-form evolution).
    """
    X1, X2 = grid_points_2d(degree)
    if name == "taylor_green":
        v1 = np.sin(X1) * np.cos(X2)
        v2 = -np.cos(X1) * np.sin(X2)
    elif name == "shear_layer_smooth":
        rho = np.pi / 15.0
        band = np.where(
            X2 <= np.pi,
            np.tanh((X2 - np.pi / 2.0) / rho),
            np.tanh((3.0 * np.pi / 2.0 - X2) / rho),
        )
        v1 = band
        v2 = 0.05 * np.sin(X1)
    else:
        raise ValueError(f"unknown exact flow {name!r}")
    c = np.stack([coeffs_from_values_2d(v1), coeffs_from_values_2d(v2)])
    return VelocityField2D(degree, c)


def random_divfree(degree: int, seed: int, decay: float = 2.0, band: int | None = None,
                   amplitude: float = 1.0) -> VelocityField2D:
    """Seeded Hermitian random field, decay (1+|k|_2)^-decay, Leray-projected.

    band, when given, zeroes all modes with |k|_2 > band; the mean mode is
    always zero.
    """
    rng = np.random.default_rng(seed)
    N = degree
    M = 2 * N + 1
    k = np.arange(-N, N + 1)
    K1, K2 = np.meshgrid(k, k, indexing="ij")
    radius = np.sqrt(K1 * K1 + K2 * K2)
    shape = (2, M, M)
    c = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    c = 0.5 * (c + np.conj(c[:, ::-1, ::-1]))
    c *= (1.0 + radius) ** (-decay)
    if band is not None:
        c[:, radius > band] = 0.0
    c[:, N, N] = 0.0
    u = leray_project(VelocityField2D(N, c))
    norm = float(np.sqrt(np.sum(np.abs(u.coeffs) ** 2)))
    if norm > 0:
        u = VelocityField2D(N, u.coeffs * (amplitude / norm))
    return u


def max_speed(u: VelocityField2D) -> float:
    v1 = values_from_coeffs_2d(u.coeffs[0])
    v2 = values_from_coeffs_2d(u.coeffs[1])
    return float(np.sqrt(v1 * v1 + v2 * v2).max())


def cancellation_integral(u: VelocityField2D, raw: bool = False) -> float:
    """The incompressibility cancellation of the convergence proof.

    With w = (Id - S_R) u (the rough remainder of the radial smoothing), the
    symmetrized cubic term

        (1/2) sum_a integral u_a d/dx_a ( sum_b u_b w_b ) dx

    integrates by parts to -(1/2) integral (div u) (u . w) dx and vanishes for
    divergence-free u.  With raw=True the one-sided variant
    sum_ab integral u_a ((Id - S_R) d/dx_a u_b) u_b dx is returned instead;
    it is NOT individually zero (the two one-sided variants cancel only in
    the symmetrized combination).
    """
    N = u.degree
    sigma = radial_two_thirds_multiplier(N)
    P = smooth_fft_size(4 * N + 2)
    k = np.arange(-N, N + 1)
    K1, K2 = np.meshgrid(k, k, indexing="ij")

    ua = [_padded_values(u.coeffs[0], P), _padded_values(u.coeffs[1], P)]
    wc = [(1.0 - sigma) * u.coeffs[0], (1.0 - sigma) * u.coeffs[1]]
    cell = (TWO_PI / P) ** 2

    if raw:
        total = 0.0
        for a, Ka in ((0, K1), (1, K2)):
            for b in (0, 1):
                dwa = _padded_values(1j * Ka * wc[b], P)
                total += cell * float(np.sum(ua[a] * dwa * ua[b]))
        return total

    s = ua[0] * _padded_values(wc[0], P) + ua[1] * _padded_values(wc[1], P)
    s_hat = _truncated_coeffs(s, 2 * N)
    kk = np.arange(-2 * N, 2 * N + 1)
    KK1, KK2 = np.meshgrid(kk, kk, indexing="ij")
    total = 0.0
    for Kbig, va in ((KK1, ua[0]), (KK2, ua[1])):
        ds = _padded_values(1j * Kbig * s_hat, P)
        total += cell * float(np.sum(va * ds))
    return 0.5 * total
