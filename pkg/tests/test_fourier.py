import numpy as np
import pytest

from speclab.fourier import (
    NodalField,
    SmoothingProfile,
    SpectralField,
    aliasing_error,
    analyze,
    apply_profile,
    build_mollifier,
    build_sv_profile,
    coeffs_from_values,
    differentiate,
    evaluate,
    grid_points,
    hermitian_defect,
    identity_profile,
    mollifier,
    project,
    read_nodal_csv,
    read_spectral_csv,
    synthesize,
    write_nodal_csv,
    write_spectral_csv,
)

from conftest import make_random_field


def dft_oracle(values):
    """Brute-force O(N^2) centered DFT, the reference for analyze()."""
    M = len(values)
    N = (M - 1) // 2
    x = 2.0 * np.pi * np.arange(M) / M
    out = np.zeros(M, dtype=complex)
    for j, k in enumerate(range(-N, N + 1)):
        out[j] = np.sum(values * np.exp(-1j * k * x)) / M
    return out


class TestTransforms:
    @pytest.mark.parametrize("N", [8, 32, 128, 512])
    def test_round_trip(self, N):
        f = make_random_field(N, seed=N)
        back = analyze(synthesize(f))
        scale = np.abs(f.coeffs).max()
        assert np.abs(back.coeffs - f.coeffs).max() <= 1e-12 * scale

    @pytest.mark.parametrize("N", [8, 32, 128, 512])
    def test_parseval(self, N):
        f = make_random_field(N, seed=100 + N)
        vals = synthesize(f).values
        grid_ms = np.sum(vals**2) / len(vals)  # (h/2pi) * sum v^2
        coeff_ms = np.sum(np.abs(f.coeffs) ** 2)
        assert abs(grid_ms - coeff_ms) <= 1e-12 * coeff_ms

    def test_analyze_matches_brute_force_dft(self):
        g = NodalField.sample(lambda x: np.exp(np.sin(x)), 8)
        got = analyze(g).coeffs
        want = dft_oracle(g.values)
        assert np.abs(got - want).max() <= 1e-13 * np.abs(want).max()

    def test_analyze_random_matches_brute_force(self, rng):
        vals = rng.normal(size=2 * 17 + 1)
        got = coeffs_from_values(vals)
        want = dft_oracle(vals)
        assert np.abs(got - want).max() <= 1e-13 * np.abs(want).max()

    def test_analyze_of_real_data_is_hermitian(self, rng):
        vals = rng.normal(size=2 * 40 + 1)
        assert hermitian_defect(coeffs_from_values(vals)) <= 1e-14 * np.abs(vals).max()

    def test_synthesize_rejects_non_hermitian(self):
        c = np.zeros(9, dtype=complex)
        c[8] = 1.0  # mode +4 without its conjugate partner
        with pytest.raises(ValueError, match="Hermitian"):
            synthesize(SpectralField(4, c))

    def test_evaluate_agrees_with_grid_synthesis(self):
        f = make_random_field(12, seed=3)
        direct = evaluate(f.coeffs, grid_points(12))
        assert np.abs(direct.imag).max() <= 1e-12
        assert np.abs(direct.real - synthesize(f).values).max() <= 1e-12


class TestPoissonSummation:
    def setup_method(self):
        # synthetic function with known exact coefficients |k|^-2 out to degree 64
        self.big = 64
        k = np.arange(-self.big, self.big + 1, dtype=float)
        c = np.where(k == 0, 0.0, 1.0 / np.maximum(np.abs(k), 1) ** 2).astype(complex)
        self.exact = SpectralField(self.big, c)

    @pytest.mark.parametrize("N", [8, 12, 21])
    def test_interpolation_coefficients_are_image_sums(self, N):
        # sample the true function on the coarse grid by dense evaluation (oracle)
        vals = evaluate(self.exact.coeffs, grid_points(N)).real
        interp = coeffs_from_values(vals)
        want = project(self.exact, N).coeffs + aliasing_error(self.exact, N).coeffs
        assert np.abs(interp - want).max() <= 1e-12

    @pytest.mark.parametrize("N", [8, 12, 21])
    def test_aliasing_error_matches_brute_force(self, N):
        got = aliasing_error(self.exact, N).coeffs
        span = 2 * N + 1
        want = np.zeros(span, dtype=complex)
        for j, k in enumerate(range(-N, N + 1)):
            for m in range(-self.big, self.big + 1):
                if m != k and (m - k) % span == 0:
                    want[j] += self.exact.mode(m)
        assert np.abs(got - want).max() <= 1e-13 * max(np.abs(want).max(), 1e-30)

    def test_aliasing_error_of_resolved_function_is_zero(self):
        f = make_random_field(10, seed=5)
        err = aliasing_error(f, 10)
        assert np.abs(err.coeffs).max() == 0.0

    def test_rejects_exact_field_coarser_than_target(self):
        f = make_random_field(10, seed=6)
        with pytest.raises(ValueError, match="below target"):
            aliasing_error(f, 11)


class TestProjection:
    def test_tail_norm_matches_direct_sum(self):
        f = make_random_field(50, seed=9, decay=1.5)
        M = 17
        tail = f.coeffs.copy()
        tail[50 - M : 50 + M + 1] = 0.0
        want = 2.0 * np.pi * np.sum(np.abs(tail) ** 2)
        low = project(f, M)
        got = 2.0 * np.pi * (np.sum(np.abs(f.coeffs) ** 2) - np.sum(np.abs(low.coeffs) ** 2))
        assert abs(got - want) <= 1e-12 * want

    def test_projection_is_idempotent_and_nested(self):
        f = make_random_field(30, seed=11)
        assert np.array_equal(project(project(f, 20), 10).coeffs, project(f, 10).coeffs)
        assert np.array_equal(project(f, 30).coeffs, f.coeffs)

    def test_rejects_degree_above_source(self):
        f = make_random_field(10, seed=12)
        with pytest.raises(ValueError, match="outside"):
            project(f, 11)


class TestDifferentiate:
    def test_trig_derivative_exact(self):
        # d/dx sin x = cos x, exact in coefficient space
        s = SpectralField.from_modes(4, {1: -0.5j, -1: 0.5j})  # sin x
        c = SpectralField.from_modes(4, {1: 0.5, -1: 0.5})  # cos x
        d = differentiate(s)
        assert np.abs(d.coeffs - c.coeffs).max() <= 1e-15

    def test_matches_finite_difference_oracle(self):
        N = 24
        f = analyze(NodalField.sample(lambda x: np.exp(np.sin(x)), N))
        d = differentiate(f)
        x = grid_points(N)
        h = 1e-5
        fd = (np.exp(np.sin(x + h)) - np.exp(np.sin(x - h))) / (2 * h)
        assert np.abs(synthesize(d).values - fd).max() <= 1e-8


class TestProfiles:
    def test_mollifier_plateaus_and_midpoint(self):
        xi = np.array([0.0, 0.2, 1.0 / 3.0, 0.5, 2.0 / 3.0, 0.8, 1.0])
        sig = mollifier(xi)
        assert sig[0] == 1.0 and sig[1] == 1.0 and sig[2] == 1.0
        assert sig[3] == pytest.approx(0.5, abs=1e-15)
        assert sig[4] == 0.0 and sig[5] == 0.0 and sig[6] == 0.0

    def test_mollifier_strictly_decreasing_on_transition(self):
        # stay ~0.012 inside the band: closer to the edges the ratio
        # bump(s)/bump(1-s) drops below 2^-52 and sigma rounds to an exact 0/1,
        # where only monotone (not strict) holds in double precision
        xi = np.linspace(1.0 / 3.0 + 0.012, 2.0 / 3.0 - 0.012, 500)
        sig = mollifier(xi)
        assert np.all(np.diff(sig) < 0.0)
        assert np.all((sig > 0.0) & (sig < 1.0))
        full = mollifier(np.linspace(0.0, 1.0, 2001))
        assert np.all(np.diff(full) <= 0.0)

    def test_two_thirds_profile_bands(self):
        N = 60
        prof = build_mollifier(N)
        k = np.arange(-N, N + 1)
        inner = np.abs(k) <= N // 3
        outer = np.abs(k) >= 2 * N // 3
        assert np.all(prof.factors[inner] == 1.0)
        assert np.all(prof.factors[outer] == 0.0)
        assert prof.kind == "two_thirds"

    def test_profile_validation(self):
        with pytest.raises(ValueError, match="kind"):
            SmoothingProfile(2, np.ones(5), "bogus")
        with pytest.raises(ValueError, match=r"\[0, 1\]"):
            SmoothingProfile(2, np.array([0.0, 0.5, 2.0, 0.5, 0.0]), "identity")
        with pytest.raises(ValueError, match="even"):
            SmoothingProfile(2, np.array([0.0, 0.5, 1.0, 0.4, 0.0]), "two_thirds")
        with pytest.raises(ValueError, match="degree >= 3"):
            build_mollifier(2)

    def test_apply_profile_identity_and_degree_mismatch(self):
        f = make_random_field(12, seed=21)
        same = apply_profile(f, identity_profile(12))
        assert np.array_equal(same.coeffs, f.coeffs)
        with pytest.raises(ValueError, match="match"):
            apply_profile(f, identity_profile(13))

    def test_sv_profile_top_mode_and_activation_edge(self):
        N, r = 64, 1
        prof = build_sv_profile(N, r)
        assert prof.factor(N) == pytest.approx(1.0 - 1.0 / N, rel=1e-15)
        # scan for the smallest wavenumber the viscosity touches
        active = [k for k in range(N + 1) if prof.factor(k) > 0.0]
        assert min(active) == 9  # (8/64)^2 == 1/64 exactly, so 8 is still untouched
        assert prof.kind == "sv" and prof.order == 1

    @pytest.mark.parametrize("N,r", [(64, 1), (64, 2), (128, 1), (100, 3)])
    def test_sv_dead_band_scan(self, N, r):
        prof = build_sv_profile(N, r)
        threshold = N ** ((2 * r - 1) / (2 * r))
        for k in range(N + 1):
            if prof.factor(k) > 0.0:
                assert k > threshold
            else:
                assert k <= threshold + 1e-12


class TestSerialization:
    def test_spectral_csv_round_trip(self, tmp_path):
        f = make_random_field(9, seed=31)
        p = tmp_path / "f.csv"
        write_spectral_csv(f, p)
        g = read_spectral_csv(p)
        assert g.degree == 9
        assert np.array_equal(g.coeffs, f.coeffs)
        assert p.read_text().splitlines()[0] == "k, re, im"

    def test_nodal_csv_round_trip(self, tmp_path):
        f = NodalField.sample(np.sin, 7)
        p = tmp_path / "g.csv"
        write_nodal_csv(f, p)
        g = read_nodal_csv(p)
        assert np.array_equal(g.values, f.values)

    def test_bad_header_rejected(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("a, b, c\n")
        with pytest.raises(ValueError, match="header"):
            read_spectral_csv(p)
