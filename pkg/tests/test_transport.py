"""Transport semi-discretizations: oracles for the convolution, the aliasing
identity, the sin-x model recursion, characteristics, and stability bounds."""

import numpy as np
import pytest

from speclab.fourier import (
    SpectralField,
    aliasing_error,
    apply_profile,
    build_mollifier,
    coeffs_from_values,
    evaluate,
    grid_points,
    identity_profile,
    values_from_coeffs,
)
from speclab.stepping import Observer, OdeState, StepControl, default_dt, integrate
from speclab.transport import (
    Coefficient,
    ImagModeState,
    TransportProblem,
    aliasing_functional,
    exact_linear_solution,
    imag_modes_to_field,
    make_rhs_imag_modes,
    make_rhs_pseudospectral,
    make_rhs_spectral,
    make_rhs_two_thirds,
    sin_coefficient,
    truncated_convolution,
)

from conftest import make_random_field

TWO_PI = 2.0 * np.pi


def analytic_coefficient():
    """q = sin(x) e^{cos x}: analytic, full spectrum, for oracle tests."""
    return Coefficient(
        lambda x: np.sin(x) * np.exp(np.cos(x)),
        dfunc=lambda x: (np.cos(x) - np.sin(x) ** 2) * np.exp(np.cos(x)),
        name="sin*exp(cos)",
    )


def constant_coefficient(value=1.0):
    return Coefficient(
        lambda x: np.full_like(np.asarray(x, dtype=float), value),
        dfunc=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        modes={0: value},
        name="const",
    )


def exact_product_spectrum(q, u: SpectralField, degree_out: int) -> SpectralField:
    """True coefficients of q(x)*u_N(x) out to degree_out, via a fine-grid DFT."""
    fine = 8192
    x = TWO_PI * np.arange(fine) / fine
    vals = q(x) * evaluate(u.coeffs, x).real
    full = np.fft.fft(vals) / fine
    idx = np.arange(-degree_out, degree_out + 1) % fine
    return SpectralField(degree_out, full[idx])


class TestCoefficient:
    def test_quadrature_spectrum_matches_closed_form(self):
        table = sin_coefficient(1.0).spectrum(6)
        quad = Coefficient(np.sin).spectrum(6)
        assert np.abs(table - quad).max() < 1e-14

    def test_derivative_fallback(self):
        q = Coefficient(lambda x: np.exp(np.cos(x)))
        x = np.array([0.3, 1.7, 4.4])
        exact = -np.sin(x) * np.exp(np.cos(x))
        assert np.abs(q.derivative(x) - exact).max() < 1e-10

    def test_max_abs(self):
        assert sin_coefficient(2.0).max_abs() == pytest.approx(2.0, abs=1e-5)
        assert sin_coefficient(1.0).max_abs_derivative() == pytest.approx(1.0, abs=1e-5)


class TestRhsSpectral:
    def test_constant_coefficient_is_plain_advection(self):
        N = 12
        u = make_random_field(N, seed=1)
        rhs = make_rhs_spectral(TransportProblem(constant_coefficient(1.0), N))
        k = np.arange(-N, N + 1)
        assert np.abs(rhs(0.0, u.coeffs) - (-1j * k * u.coeffs)).max() < 1e-14

    def test_zero_field(self):
        N = 8
        rhs = make_rhs_spectral(TransportProblem(sin_coefficient(1.0), N))
        assert np.abs(rhs(0.0, np.zeros(2 * N + 1, complex))).max() == 0.0

    def test_symbolic_product_sin_times_cos(self):
        # q = sin x, u = cos x: q*u = (1/2) sin 2x, tendency = -d/dx = -cos 2x
        N = 4
        u = np.zeros(2 * N + 1, complex)
        u[N + 1] = 0.5
        u[N - 1] = 0.5
        rhs = make_rhs_spectral(TransportProblem(sin_coefficient(1.0), N))
        expected = np.zeros(2 * N + 1, complex)
        expected[N + 2] = -0.5
        expected[N - 2] = -0.5
        assert np.abs(rhs(0.0, u) - expected).max() < 1e-15

    def test_convolution_against_double_loop(self):
        N = 12
        u = make_random_field(N, seed=2, decay=1.0)
        q = analytic_coefficient()
        qhat = q.spectrum(2 * N)
        direct = np.zeros(2 * N + 1, complex)
        for k in range(-N, N + 1):
            acc = 0.0 + 0.0j
            for j in range(-N, N + 1):
                acc += qhat[(k - j) + 2 * N] * u.coeffs[j + N]
            direct[k + N] = acc
        conv = truncated_convolution(qhat, u.coeffs)
        assert np.abs(conv - direct).max() < 1e-13

    def test_short_coefficient_spectrum_rejected(self):
        with pytest.raises(ValueError, match="2N"):
            truncated_convolution(np.zeros(7, complex), np.zeros(5, complex))


class TestRhsPseudospectral:
    def test_constant_coefficient_matches_spectral(self):
        N = 10
        u = make_random_field(N, seed=3)
        prob = TransportProblem(constant_coefficient(1.0), N)
        a = make_rhs_spectral(prob)(0.0, u.coeffs)
        b = make_rhs_pseudospectral(prob)(0.0, u.coeffs)
        assert np.abs(a - b).max() < 1e-13

    def test_unaliased_band_matches_spectral(self):
        # q and u both in |k| <= N/2: the product has degree <= N, no images
        N = 16
        u = make_random_field(N // 2, seed=4, decay=1.0)
        wide = np.zeros(2 * N + 1, complex)
        wide[N - N // 2 : N + N // 2 + 1] = u.coeffs
        q = Coefficient(
            lambda x: np.sin(x) + 0.4 * np.cos(3 * x),
            dfunc=lambda x: np.cos(x) - 1.2 * np.sin(3 * x),
            modes={1: -0.5j, -1: 0.5j, 3: 0.2, -3: 0.2},
        )
        prob = TransportProblem(q, N)
        a = make_rhs_spectral(prob)(0.0, wide)
        b = make_rhs_pseudospectral(prob)(0.0, wide)
        assert np.abs(a - b).max() < 1e-13

    def test_top_mode_alias_image(self):
        # q = sin x on u = cos(Nx): the (N+1)-mode of the product folds to -N
        N = 8
        u = np.zeros(2 * N + 1, complex)
        u[2 * N] = 0.5
        u[0] = 0.5
        prob = TransportProblem(sin_coefficient(1.0), N)
        diff = make_rhs_pseudospectral(prob)(0.0, u) - make_rhs_spectral(prob)(0.0, u)
        exact = exact_product_spectrum(prob.q, SpectralField(N, u), N + 4)
        alias = aliasing_error(exact, N)
        k = np.arange(-N, N + 1)
        assert np.abs(diff - (-1j * k * alias.coeffs)).max() < 1e-14
        # the image really lives on the edge modes only
        interior = np.abs(diff[1:-1])
        assert interior.max() < 1e-14
        assert abs(diff[0]) > 0.1 and abs(diff[-1]) > 0.1

    def test_difference_is_aliasing_derivative(self):
        # rhs_pseudospectral - rhs_spectral = -d/dx A_N[q u_N] on generic data
        N = 20
        u = make_random_field(N, seed=5, decay=1.0)
        q = analytic_coefficient()
        prob = TransportProblem(q, N)
        diff = make_rhs_pseudospectral(prob)(0.0, u.coeffs) - make_rhs_spectral(prob)(0.0, u.coeffs)
        exact = exact_product_spectrum(q, u, 3 * N + 60)
        alias = aliasing_error(exact, N)
        k = np.arange(-N, N + 1)
        assert np.abs(diff - (-1j * k * alias.coeffs)).max() < 1e-11


class TestRhsTwoThirds:
    def test_wrong_profile_kind_rejected(self):
        N = 9
        prob = TransportProblem(sin_coefficient(1.0), N)
        with pytest.raises(ValueError, match="two_thirds"):
            make_rhs_two_thirds(prob, identity_profile(N))

    def test_degree_mismatch_rejected(self):
        prob = TransportProblem(sin_coefficient(1.0), 9)
        with pytest.raises(ValueError, match="degree"):
            make_rhs_two_thirds(prob, build_mollifier(12))

    def test_low_band_matches_pseudospectral(self):
        # smoothing is exactly 1 on |k| <= N/3, so low-band data is untouched
        N = 18
        low = make_random_field(N // 3, seed=6, decay=1.0)
        wide = np.zeros(2 * N + 1, complex)
        wide[N - N // 3 : N + N // 3 + 1] = low.coeffs
        prob = TransportProblem(sin_coefficient(1.0), N)
        a = make_rhs_pseudospectral(prob)(0.0, wide)
        b = make_rhs_two_thirds(prob, build_mollifier(N))(0.0, wide)
        assert np.array_equal(a, b)

    def test_top_mode_contributes_nothing(self):
        N = 12
        u = np.zeros(2 * N + 1, complex)
        u[2 * N] = 1.0
        u[0] = 1.0
        rhs = make_rhs_two_thirds(TransportProblem(sin_coefficient(1.0), N), build_mollifier(N))
        assert np.abs(rhs(0.0, u)).max() == 0.0

    def test_pipeline_bitwise_equal(self):
        N = 15
        u = make_random_field(N, seed=7, decay=1.0)
        prof = build_mollifier(N)
        prob = TransportProblem(sin_coefficient(1.0), N)
        direct = make_rhs_two_thirds(prob, prof)(0.0, u.coeffs)
        composed = make_rhs_pseudospectral(prob)(0.0, apply_profile(u, prof).coeffs)
        assert np.array_equal(direct, composed)


class TestImagModeRecursion:
    def test_zero_state(self):
        rhs = make_rhs_imag_modes(5)
        assert np.abs(rhs(0.0, np.zeros(5))).max() == 0.0

    def test_hand_example_degree_two(self):
        rhs = make_rhs_imag_modes(2)
        out = rhs(0.0, np.array([1.0, 0.0]))
        assert np.allclose(out, [0.0, 1.0], atol=1e-15)

    def test_reflecting_closure_on_top_mode(self):
        # k = N tendency uses the ghost b_{N+1} = -b_N
        N = 3
        rhs = make_rhs_imag_modes(N)
        out = rhs(0.0, np.array([0.0, 0.0, 1.0]))
        assert out[2] == pytest.approx(1.5)  # (3/2)(b_2 - (-b_3)) = 1.5
        assert out[1] == pytest.approx(-1.0)  # (2/2)(b_1 - b_3) = -1

    def test_weighted_energy_production_identity(self):
        # d/dt sum b_k^2/k telescopes to exactly b_N^2; the fix removes it
        N = 24
        rng = np.random.default_rng(11)
        b = rng.standard_normal(N)
        k = np.arange(1, N + 1, dtype=float)
        tend = make_rhs_imag_modes(N)(0.0, b)
        production = float(np.sum(2.0 * b * tend / k))
        assert production == pytest.approx(b[-1] ** 2, rel=1e-12)
        tend_fixed = make_rhs_imag_modes(N, zero_last_mode=True)(0.0, b)
        b_fixed = np.concatenate((b[:-1], [0.0]))
        production_fixed = float(np.sum(2.0 * b_fixed * tend_fixed / k))
        assert abs(production_fixed) < 1e-13

    def test_state_shape_validation(self):
        with pytest.raises(ValueError, match="imaginary modes"):
            ImagModeState(4, np.zeros(3))

    def test_embedding_is_hermitian_and_imaginary(self):
        st = ImagModeState(4, np.array([1.0, -2.0, 0.5, 3.0]))
        fld = imag_modes_to_field(st)
        c = fld.coeffs
        assert np.abs(c - np.conj(c[::-1])).max() == 0.0
        assert np.abs(c.real).max() == 0.0
        assert c[5] == 1j * 1.0 and c[8] == 1j * 3.0

    def test_full_solver_consistency(self):
        # pseudospectral rhs for the sin-x model on a purely imaginary state
        # IS the recursion; trajectories then agree to roundoff
        N = 16
        rng = np.random.default_rng(12)
        b0 = rng.standard_normal(N) * (1.0 + np.arange(1, N + 1)) ** -2.0
        fld = imag_modes_to_field(ImagModeState(N, b0))
        prob = TransportProblem(sin_coefficient(-1.0), N)
        rhs_full = make_rhs_pseudospectral(prob)
        rhs_b = make_rhs_imag_modes(N)
        out_full = rhs_full(0.0, fld.coeffs)
        out_b = rhs_b(0.0, b0)
        assert np.abs(out_full[N + 1 :] - 1j * out_b).max() < 1e-13
        assert np.abs(out_full.real).max() < 1e-13

        control = StepControl(dt=1e-2, t_end=1.0)
        rec_full = integrate(OdeState(0.0, fld.coeffs), rhs_full, control)
        rec_b = integrate(OdeState(0.0, b0), rhs_b, control)
        final_b_from_full = rec_full.final.y[N + 1 :].imag
        assert np.abs(final_b_from_full - rec_b.final.y).max() < 1e-12
        assert np.abs(rec_full.final.y.real).max() < 1e-12


class TestAliasingFunctional:
    def test_matches_quadrature_oracle(self):
        N = 16
        u = make_random_field(N, seed=8, decay=1.0)
        q = analytic_coefficient()
        value = aliasing_functional(u, q)

        # independent route: interpolation minus fine-grid projection,
        # integrated on an 8N-point grid
        M = 2 * N + 1
        xq = TWO_PI * np.arange(8 * M) / (8 * M)
        interp = coeffs_from_values(q(grid_points(N)) * values_from_coeffs(u.coeffs))
        proj = exact_product_spectrum(q, u, N).coeffs
        a = interp - proj
        k = np.arange(-N, N + 1)
        integrand = evaluate(u.coeffs, xq).real * evaluate(1j * k * a, xq).real
        oracle = TWO_PI / len(xq) * float(np.sum(integrand))
        assert value == pytest.approx(oracle, rel=1e-10)

    def test_displayed_double_sum_is_twice_the_integral(self):
        # the (j-k)-weighted lattice sum evaluates to exactly twice the
        # energy-production integral this function returns
        N = 10
        u = make_random_field(N, seed=9, decay=1.0)
        q = analytic_coefficient()
        value = aliasing_functional(u, q)
        Q = 4 * N + 2
        qhat = q.spectrum(Q)
        span = 2 * N + 1
        total = 0.0 + 0.0j
        for j in range(-N, N + 1):
            for k in range(-N, N + 1):
                g = 0.0 + 0.0j
                for ell in (-2, -1, 1, 2):
                    p = j - k + ell * span
                    if abs(p) <= Q:
                        g += qhat[p + Q]
                total += (j - k) * np.conj(u.coeffs[j + N]) * u.coeffs[k + N] * g
        displayed = (TWO_PI * 1j * total).real
        assert displayed == pytest.approx(2.0 * value, rel=1e-10)

    def test_sin_coefficient_closed_form(self):
        # only the +/-2N separations survive: F = -(sign) 2 pi N Re(u_N^2)
        N = 14
        u = make_random_field(N, seed=10, decay=0.5)
        top = complex(u.coeffs[2 * N])
        assert aliasing_functional(u, sin_coefficient(1.0)) == pytest.approx(
            -2.0 * np.pi * N * (top**2).real, rel=1e-12
        )
        assert aliasing_functional(u, sin_coefficient(-1.0)) == pytest.approx(
            2.0 * np.pi * N * (top**2).real, rel=1e-12
        )

    def test_zero_when_both_bands_small(self):
        # q band-limited to |p| <= N alone is NOT enough; with u also limited
        # to |k| <= N/2 every pair separation misses the image support
        N = 16
        half = make_random_field(N // 2, seed=11, decay=0.5)
        wide = np.zeros(2 * N + 1, complex)
        wide[N - N // 2 : N + N // 2 + 1] = half.coeffs
        value = aliasing_functional(SpectralField(N, wide), sin_coefficient(1.0))
        assert value == 0.0

    def test_zero_field(self):
        N = 8
        z = SpectralField(N, np.zeros(2 * N + 1, complex))
        assert aliasing_functional(z, sin_coefficient(1.0)) == 0.0

    def test_short_spectrum_rejected(self):
        N = 8
        u = make_random_field(N, seed=12)
        with pytest.raises(ValueError, match="4N"):
            aliasing_functional(u, sin_coefficient(1.0), q_degree=2 * N)

    def test_equals_energy_production_of_rhs_difference(self):
        # 2 pi sum conj(u) (rhs_ps - rhs_sp) integrates u * d/dx A: value = -F...
        # rather: F = -Re<u, rhs_ps - rhs_sp>
        N = 12
        u = make_random_field(N, seed=13, decay=1.0)
        q = analytic_coefficient()
        prob = TransportProblem(q, N)
        diff = make_rhs_pseudospectral(prob)(0.0, u.coeffs) - make_rhs_spectral(prob)(0.0, u.coeffs)
        inner = TWO_PI * float(np.sum(np.conj(u.coeffs) * diff).real)
        assert aliasing_functional(u, q) == pytest.approx(-inner, rel=1e-11)


class TestExactLinearSolution:
    def test_zero_coefficient_is_identity(self):
        q = constant_coefficient(0.0)
        u0 = lambda x: np.sin(x) + 0.2 * np.cos(3 * x)
        out = exact_linear_solution(q, u0, 0.7, 16)
        assert np.abs(out.values - u0(grid_points(16))).max() < 1e-12

    def test_unit_coefficient_translates(self):
        q = constant_coefficient(1.0)
        u0 = lambda x: np.sin(x)
        t = 0.9
        out = exact_linear_solution(q, u0, t, 20)
        assert np.abs(out.values - u0(grid_points(20) - t)).max() < 1e-12

    def test_sin_model_closed_form_map(self):
        # solver coefficient -sin x: backward feet 2 atan(e^{t} tan(x/2))
        q = sin_coefficient(-1.0)
        u0 = lambda y: np.sin(y) + 0.3 * np.cos(2 * y)
        t = 1.3
        deg = 24
        out = exact_linear_solution(q, u0, t, deg)
        x = grid_points(deg)
        a = np.exp(t)
        feet = np.mod(2.0 * np.arctan(a * np.tan(x / 2.0)), TWO_PI)
        jac = a / np.cos(x / 2.0) ** 2 / (1.0 + a**2 * np.tan(x / 2.0) ** 2)
        assert np.abs(out.values - u0(feet) * jac).max() < 1e-9

    def test_mass_is_transported_conservatively(self):
        # the conservative-form weight makes the mean invariant
        q = sin_coefficient(-1.0)
        u0 = lambda x: 1.0 + 0.5 * np.sin(x)
        out = exact_linear_solution(q, u0, 0.8, 64)
        assert float(np.mean(out.values)) == pytest.approx(1.0, abs=1e-10)

    def test_coarse_step_rejected(self):
        q = sin_coefficient(-1.0)
        with pytest.raises(RuntimeError, match="not converged"):
            exact_linear_solution(q, np.sin, 1.5, 12, dt=0.5)

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError, match="t >= 0"):
            exact_linear_solution(sin_coefficient(1.0), np.sin, -1.0, 8)

    def test_spectral_solver_agrees_while_smooth(self):
        N = 64
        q = sin_coefficient(-1.0)
        prob = TransportProblem(q, N)
        u0 = lambda x: np.sin(x)
        c0 = coeffs_from_values(u0(grid_points(N)))
        control = StepControl(dt=1e-3, t_end=0.5)
        rec = integrate(OdeState(0.0, c0), make_rhs_spectral(prob), control)
        approx = values_from_coeffs(rec.final.y)
        exact = exact_linear_solution(q, u0, 0.5, N)
        assert np.abs(approx - exact.values).max() < 1e-6


class TestStabilityBounds:
    def test_spectral_scheme_energy_bound(self):
        # recorded l2 never exceeds e^{q'_inf t / 2} * l2(0) * (1 + 1e-6)
        N = 48
        u0 = make_random_field(N, seed=14)
        q = sin_coefficient(-1.0)
        prob = TransportProblem(q, N)
        dt = default_dt(N, prob.max_speed)
        probe = lambda st: (st.t, float(np.sqrt(TWO_PI * np.sum(np.abs(st.y) ** 2))))
        rec = integrate(
            OdeState(0.0, u0.coeffs),
            make_rhs_spectral(prob),
            StepControl(dt=dt, t_end=3.0),
            [Observer("l2", probe, every=3)],
        )
        assert rec.outcome == "completed"
        rows = rec.rows("l2")
        qprime = q.max_abs_derivative()
        base = rows[0][1]
        for t, val in rows:
            assert val <= np.exp(0.5 * qprime * t) * base * (1.0 + 1e-6)

    def test_two_thirds_weighted_bound(self):
        # smoothed-norm growth exponent stays below 2 q'_inf (measured ~1/2)
        N = 48
        u0 = make_random_field(N, seed=15, decay=1.0)
        q = sin_coefficient(-1.0)
        prob = TransportProblem(q, N)
        prof = build_mollifier(N)
        dt = default_dt(N, prob.max_speed)
        sigma = prof.factors

        def probe(st):
            return (st.t, float(np.sqrt(TWO_PI * np.sum(sigma * np.abs(st.y) ** 2))))

        rec = integrate(
            OdeState(0.0, u0.coeffs),
            make_rhs_two_thirds(prob, prof),
            StepControl(dt=dt, t_end=3.0),
            [Observer("wl2", probe, every=3)],
        )
        assert rec.outcome == "completed"
        rows = rec.rows("wl2")
        qprime = q.max_abs_derivative()
        base = rows[0][1]
        for t, val in rows:
            if t < 0.1:
                continue
            exponent = np.log(val / base) / (qprime * t)
            assert exponent <= 2.0

    def test_closure_drives_weighted_growth_and_fix_removes_it(self):
        # top-mode data: the reflecting closure pumps sum b_k^2/k; holding the
        # top mode at zero keeps it flat
        N = 32
        k = np.arange(1, N + 1, dtype=float)
        b0 = np.zeros(N)
        b0[-1] = 1.0
        control = StepControl(dt=1e-3, t_end=1.0)
        rec = integrate(OdeState(0.0, b0), make_rhs_imag_modes(N), control)
        grown = float(np.sum(rec.final.y**2 / k))
        assert grown > float(np.sum(b0**2 / k)) * 1.5

        b1 = np.zeros(N)
        b1[N // 2] = 1.0
        rec_free = integrate(OdeState(0.0, b1), make_rhs_imag_modes(N), control)
        rec_fix = integrate(
            OdeState(0.0, b1), make_rhs_imag_modes(N, zero_last_mode=True), control
        )
        e0 = float(np.sum(b1**2 / k))
        e_free = float(np.sum(rec_free.final.y**2 / k))
        e_fix = float(np.sum(rec_fix.final.y**2 / k))
        assert abs(e_fix - e0) < 1e-9
        assert e_free >= e_fix
