"""Trigonometric fields on the periodic interval [0, 2pi).

A degree-N field lives on the odd grid of 2N+1 points x_nu = 2*pi*nu/(2N+1)
and carries the centered coefficient range k = -N..N.  The odd point count
makes the interpolation operator well behaved: every aliased image of a mode
lands a full multiple of 2N+1 away, and real data stays real under it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi


def smooth_fft_size(n: int) -> int:
    """Smallest 7-smooth integer >= n (a fast FFT length)."""
    m = n
    while True:
        r = m
        for p in (2, 3, 5, 7):
            while r % p == 0:
                r //= p
        if r == 1:
            return m
        m += 1


def _ensure_odd_length(arr, name):
    if arr.ndim != 1 or len(arr) % 2 != 1:
        raise ValueError(f"{name} must be a 1-d array of odd length, got shape {arr.shape}")


@dataclass(frozen=True)
class SpectralField:
    """Centered Fourier coefficients u_hat(k), k = -N..N, of a real field.

    coeffs[j] holds mode k = j - N.  The represented function is
    u(x) = sum_k coeffs[k+N] * exp(i*k*x).
    """

    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        _ensure_odd_length(c, "coeffs")
        if len(c) != 2 * self.degree + 1:
            raise ValueError(f"degree {self.degree} needs {2*self.degree+1} coefficients, got {len(c)}")
        object.__setattr__(self, "coeffs", c)

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(-self.degree, self.degree + 1)

    @classmethod
    def zeros(cls, degree: int) -> "SpectralField":
        return cls(degree, np.zeros(2 * degree + 1, dtype=np.complex128))

    @classmethod
    def from_modes(cls, degree: int, modes: dict) -> "SpectralField":
        """Build a field from a {k: coefficient} dict, mirroring conjugates is the caller's job."""
        c = np.zeros(2 * degree + 1, dtype=np.complex128)
        for k, val in modes.items():
            if abs(k) > degree:
                raise ValueError(f"mode {k} outside degree {degree}")
            c[k + degree] = val
        return cls(degree, c)

    def mode(self, k: int) -> complex:
        if abs(k) > self.degree:
            raise ValueError(f"mode {k} outside degree {self.degree}")
        return complex(self.coeffs[k + self.degree])


@dataclass(frozen=True)
class NodalField:
    """Real point values on the degree-N collocation grid x_nu = 2*pi*nu/(2N+1)."""

    degree: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        _ensure_odd_length(v, "values")
        if len(v) != 2 * self.degree + 1:
            raise ValueError(f"degree {self.degree} needs {2*self.degree+1} values, got {len(v)}")
        object.__setattr__(self, "values", v)

    @property
    def grid(self) -> np.ndarray:
        return grid_points(self.degree)

    @classmethod
    def sample(cls, f, degree: int) -> "NodalField":
        return cls(degree, np.asarray(f(grid_points(degree)), dtype=np.float64))


@dataclass(frozen=True)
class SmoothingProfile:
    """Even multiplier factors sigma_k, k = -N..N, tagged with their construction."""

    degree: int
    factors: np.ndarray
    kind: str
    order: int | None = None

    _KINDS = ("identity", "two_thirds", "sv")

    def __post_init__(self):
        f = np.asarray(self.factors, dtype=np.float64)
        _ensure_odd_length(f, "factors")
        if len(f) != 2 * self.degree + 1:
            raise ValueError(f"degree {self.degree} needs {2*self.degree+1} factors, got {len(f)}")
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if np.any(f < 0.0) or np.any(f > 1.0):
            raise ValueError("profile factors must lie in [0, 1]")
        if not np.array_equal(f, f[::-1]):
            raise ValueError("profile factors must be even in k")
        object.__setattr__(self, "factors", f)

    def factor(self, k: int) -> float:
        return float(self.factors[k + self.degree])


def grid_points(degree: int) -> np.ndarray:
    M = 2 * degree + 1
    return TWO_PI * np.arange(M) / M


# -- raw-array kernels (hot paths work on bare centered coefficient arrays) --

def coeffs_from_values(values: np.ndarray) -> np.ndarray:
    """Centered DFT coefficients of real samples on the odd grid."""
    M = len(values)
    return np.fft.fftshift(np.fft.fft(values)) / M


def values_from_coeffs(coeffs: np.ndarray) -> np.ndarray:
    """Real samples on the odd grid from centered coefficients (takes the real part)."""
    M = len(coeffs)
    return np.fft.ifft(np.fft.ifftshift(coeffs)).real * M


def hermitian_defect(coeffs: np.ndarray) -> float:
    """Max deviation from the conjugate symmetry that real data must carry."""
    return float(np.abs(coeffs - np.conj(coeffs[::-1])).max(initial=0.0))


def evaluate(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Dense evaluation sum_k c_k exp(i k x) at arbitrary points (oracle-grade, O(N*len(x)))."""
    N = (len(coeffs) - 1) // 2
    k = np.arange(-N, N + 1)
    return np.exp(1j * np.outer(np.asarray(x, dtype=float), k)) @ coeffs


# -- public operations on the value types --

def analyze(nodal: NodalField) -> SpectralField:
    """Interpolation coefficients of the grid data (exact DFT on the 2N+1 grid)."""
    return SpectralField(nodal.degree, coeffs_from_values(nodal.values))


def synthesize(spec: SpectralField, check: bool = True) -> NodalField:
    """Point values on the matching grid; rejects coefficients that are not conjugate-symmetric."""
    if check:
        defect = hermitian_defect(spec.coeffs)
        scale = max(1.0, float(np.abs(spec.coeffs).max(initial=0.0)))
        if defect > 1e-8 * scale:
            raise ValueError(f"coefficients are not Hermitian (defect {defect:.3e}); data would not be real")
    return NodalField(spec.degree, values_from_coeffs(spec.coeffs))


def project(spec: SpectralField, target_degree: int) -> SpectralField:
    """Sharp truncation S_M: keep modes |k| <= M of a degree-N field, M <= N."""
    N, M = spec.degree, target_degree
    if M < 0 or M > N:
        raise ValueError(f"projection degree {M} outside [0, {N}]")
    return SpectralField(M, spec.coeffs[N - M : N + M + 1].copy())


def aliasing_error(exact: SpectralField, degree: int) -> SpectralField:
    """Image sums A_N: for each |k| <= N, the sum of exact modes k + j*(2N+1), j != 0.

    `exact` holds the true coefficients of some function to a degree large
    enough that its tail past the resolved band matters; the result is the
    difference between interpolating that function on the 2N+1 grid and
    sharply truncating it.
    """
    N = degree
    M_big = exact.degree
    if M_big < N:
        raise ValueError(f"exact field degree {M_big} below target degree {N}")
    out = np.zeros(2 * N + 1, dtype=np.complex128)
    span = 2 * N + 1
    for k in range(-N, N + 1):
        j = 1
        acc = 0.0 + 0.0j
        while True:
            hit = False
            for idx in (k + j * span, k - j * span):
                if -M_big <= idx <= M_big:
                    acc += exact.coeffs[idx + M_big]
                    hit = True
            if not hit:
                break
            j += 1
        out[k + N] = acc
    return SpectralField(N, out)


def differentiate(spec: SpectralField) -> SpectralField:
    """Exact spectral derivative: multiply mode k by i*k."""
    return SpectralField(spec.degree, 1j * spec.wavenumbers * spec.coeffs)


def apply_profile(spec: SpectralField, profile: SmoothingProfile) -> SpectralField:
    if profile.degree != spec.degree:
        raise ValueError(f"profile degree {profile.degree} does not match field degree {spec.degree}")
    return SpectralField(spec.degree, profile.factors * spec.coeffs)


# -- profile constructors --

def _bump(t: np.ndarray) -> np.ndarray:
    """exp(-1/t) continued by zero for t <= 0 (the C-infinity transition kernel)."""
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def mollifier(xi: np.ndarray) -> np.ndarray:
    """Smooth even cutoff: 1 for |xi| <= 1/3, 0 for |xi| >= 2/3, strictly decreasing between.

    On the transition band s = 3|xi| - 1 runs over (0, 1) and
    sigma = bump(1-s) / (bump(s) + bump(1-s)), so sigma(1/2) = 1/2 exactly.
    """
    xi = np.abs(np.asarray(xi, dtype=np.float64))
    sigma = np.ones_like(xi)
    sigma[xi >= 2.0 / 3.0] = 0.0
    mid = (xi > 1.0 / 3.0) & (xi < 2.0 / 3.0)
    s = 3.0 * xi[mid] - 1.0
    lo, hi = _bump(s), _bump(1.0 - s)
    sigma[mid] = hi / (lo + hi)
    return sigma


def build_mollifier(degree: int) -> SmoothingProfile:
    """The two-thirds smoothing profile sigma_k = sigma(|k|/N)."""
    if degree < 3:
        raise ValueError("two-thirds profile needs degree >= 3")
    k = np.arange(-degree, degree + 1)
    return SmoothingProfile(degree, mollifier(k / degree), "two_thirds")


def identity_profile(degree: int) -> SmoothingProfile:
    return SmoothingProfile(degree, np.ones(2 * degree + 1), "identity")


def build_sv_profile(degree: int, order: int) -> SmoothingProfile:
    """Viscosity activation factors ((|k|/N)^(2r) - 1/N)_+ , zero on the low band."""
    if degree < 2:
        raise ValueError("viscosity profile needs degree >= 2")
    if order < 1:
        raise ValueError("viscosity order must be >= 1")
    k = np.arange(-degree, degree + 1)
    fac = np.maximum((np.abs(k) / degree) ** (2 * order) - 1.0 / degree, 0.0)
    return SmoothingProfile(degree, fac, "sv", order=order)


# -- CSV serialization (deterministic shortest-roundtrip floats) --

def write_spectral_csv(spec: SpectralField, path) -> None:
    with open(path, "w") as fh:
        fh.write("k, re, im\n")
        for k, c in zip(spec.wavenumbers, spec.coeffs):
            fh.write(f"{int(k)}, {float(c.real)!r}, {float(c.imag)!r}\n")


def read_spectral_csv(path) -> SpectralField:
    ks, cs = [], []
    with open(path) as fh:
        header = fh.readline().strip().replace(" ", "")
        if header != "k,re,im":
            raise ValueError(f"bad spectral CSV header {header!r}")
        for line in fh:
            k, re, im = (tok.strip() for tok in line.split(","))
            ks.append(int(k))
            cs.append(complex(float(re), float(im)))
    degree = (len(ks) - 1) // 2
    if ks != list(range(-degree, degree + 1)):
        raise ValueError("spectral CSV wavenumbers must run -N..N")
    return SpectralField(degree, np.array(cs))


def write_nodal_csv(nodal: NodalField, path) -> None:
    with open(path, "w") as fh:
        fh.write("x, value\n")
        for x, v in zip(nodal.grid, nodal.values):
            fh.write(f"{float(x)!r}, {float(v)!r}\n")


def read_nodal_csv(path) -> NodalField:
    vals = []
    with open(path) as fh:
        header = fh.readline().strip().replace(" ", "")
        if header != "x,value":
            raise ValueError(f"bad nodal CSV header {header!r}")
        for line in fh:
            _, v = (tok.strip() for tok in line.split(","))
            vals.append(float(v))
    degree = (len(vals) - 1) // 2
    return NodalField(degree, np.array(vals))
