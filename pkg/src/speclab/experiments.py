"""Registered experiments: named, configurable sweeps over the resolution list.

Each sweep member integrates one solver at one degree, writes its own CSV
files (schemas fixed per solver family), and reports a single scalar summary
metric; the sweep collects the per-degree metrics into summary.csv with a
fitted log-log slope and a manifest that digests every emitted file.

Summary metric by experiment:
  linear-resolved-decay      |top mode| of the model recursion at t_end
  linear-weak-instability    max_k |b_k(t_end)|
  burgers-smooth-rate        L2 gap to the characteristics solution (8x grid)
  burgers-conserve           relative drift of the variant's conserved energy
  burgers-postshock-tv       final max|u| * TV^2 / sqrt(2N/3)
  burgers-sv                 L2 gap to the fine Godunov reference
  euler2d-conserve           relative drift of the variant's conserved energy
  euler2d-taylor-green       L2 deviation of the velocity from the initial data
  isentropic-entropy         relative total-energy drift (linear law: L2 gap
                             to the closed-form wave solution instead)
"""

from __future__ import annotations

import hashlib
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__, burgers, euler, isentropic
from .config import ConfigError, ExperimentConfig, build_config, emit_config, parse_config_text
from .diagnostics import fit_rate, norms, resample
from .fourier import SpectralField, build_mollifier, identity_profile
from .stepping import Observer, OdeState, StepControl, default_dt, integrate
from .transport import ImagModeState, imag_modes_to_field, make_rhs_imag_modes

TWO_PI = 2.0 * np.pi

SERIES_ROW_TARGET = 240


# -- low-level emission helpers --

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path, columns, rows) -> None:
    with open(path, "w") as fh:
        fh.write(", ".join(columns) + "\n")
        for row in rows:
            fh.write(", ".join(_cell(row[c]) for c in columns) + "\n")


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


# -- segmented time marching with exact snapshot states --

def _march(y0, rhs, dt, t_end, snapshot_times, row_fn):
    """Integrate to t_end, collecting ~SERIES_ROW_TARGET diagnostic rows and
    the exact state at each snapshot time (snapshot times beyond t_end are
    ignored; t_end itself is always a snapshot).

    Returns (rows, snaps, outcome, failure_time, final_y); snaps maps time ->
    state copy, in ascending order of insertion.
    """
    rows = []
    snaps = {}
    wants_zero = any(abs(s) < 1e-14 for s in snapshot_times)
    if wants_zero or t_end == 0.0:
        snaps[0.0] = np.copy(y0)
    if t_end == 0.0:
        rows.append(row_fn(0.0, y0))
        return rows, snaps, "completed", None, y0
    every = max(1, int(round(t_end / dt / SERIES_ROW_TARGET)))
    observer = Observer("series", lambda st: row_fn(st.t, st.y), every=every)
    targets = sorted({float(s) for s in snapshot_times if 0.0 < s <= t_end} | {float(t_end)})
    state = OdeState(0.0, np.copy(y0))
    for target in targets:
        record = integrate(state, rhs, StepControl(dt, target), [observer])
        new_rows = record.rows("series")
        if rows:
            new_rows = new_rows[1:]  # the segment-start row repeats the last one
        rows.extend(new_rows)
        if record.outcome != "completed":
            return rows, snaps, record.outcome, record.failure_time, record.final.y
        snaps[target] = np.copy(record.final.y)
        state = record.final
    return rows, snaps, "completed", None, state.y


# -- sweep member result --

@dataclass(frozen=True)
class MemberResult:
    degree: int
    outcome: str  # completed | blowup | aborted
    error: float | None
    failure_time: float | None = None
    extras: dict = field(default_factory=dict)
    files: tuple = ()
    message: str = ""


# -- shared initial-data helpers --

_SIN_AMPLITUDES = {"sin": 1.0, "half_sin": 0.5, "small_sin": 0.4}


def _sine_initial(name: str):
    if name not in _SIN_AMPLITUDES:
        raise ConfigError(
            f"unknown initial {name!r}; known here: {', '.join(sorted(_SIN_AMPLITUDES))}"
        )
    amp = _SIN_AMPLITUDES[name]
    return (lambda x: amp * np.sin(x)), (lambda x: amp * np.cos(x))


def _recursion_initial(name: str, degree: int) -> np.ndarray:
    k = np.arange(1, degree + 1, dtype=np.float64)
    if name == "inverse_cubic":
        return k**-3.0
    if name == "cubic_bump":
        x = np.pi * k / degree
        return x**3 * (np.pi - x) ** 3 / 20.0
    raise ConfigError(f"unknown initial {name!r}; known here: inverse_cubic, cubic_bump")


def _pressure_law(name: str):
    if name == "linear":
        return isentropic.linear_law()
    if name == "exponential":
        return isentropic.exponential_law()
    if name == "gamma":
        return isentropic.gamma_law()
    raise ConfigError(f"unknown law {name!r}; known: linear, exponential, gamma")


# -- sweep members --

def _member_linear(config: ExperimentConfig, degree: int, shared) -> MemberResult:
    b0 = _recursion_initial(config.initial, degree)
    rhs = make_rhs_imag_modes(degree, zero_last_mode=config.fix)
    dt = config.dt if config.dt is not None else default_dt(degree, 1.0, config.cfl)
    profile = build_mollifier(degree)

    def row(t, b):
        report = norms(imag_modes_to_field(ImagModeState(degree, b)), profile)
        return {"t": t, "l2": report.l2, "l2_sigma": report.weighted_l2,
                "linf": report.linf, "tv": report.tv}

    rows, snaps, outcome, fail, final = _march(b0, rhs, dt, config.t_end, config.snapshots, row)
    series = f"series_N{degree}.csv"
    _write_csv(os.path.join(config.out, series),
               ("t", "l2", "l2_sigma", "linf", "tv"), rows)
    mode_rows = []
    for t, b in snaps.items():
        spec = imag_modes_to_field(ImagModeState(degree, b))
        for k, c in zip(spec.wavenumbers, spec.coeffs):
            mode_rows.append({"t": t, "k": int(k), "re": c.real, "im": c.imag})
    modes = f"modes_N{degree}.csv"
    _write_csv(os.path.join(config.out, modes), ("t", "k", "re", "im"), mode_rows)
    if outcome != "completed":
        return MemberResult(degree, outcome, None, fail, files=(series, modes))
    if config.experiment == "linear-weak-instability":
        metric = float(np.abs(final).max())
    else:
        metric = float(abs(final[-1]))
    extras = {"norm_growth": float(np.linalg.norm(final) / np.linalg.norm(b0))}
    return MemberResult(degree, outcome, metric, extras=extras, files=(series, modes))


def _burgers_setup(config: ExperimentConfig, degree: int):
    u0, du0 = _sine_initial(config.initial)
    problem = burgers.BurgersProblem(u0, degree, variant=config.variant,
                                     sv_order=config.sv_order)
    dt = config.dt if config.dt is not None else default_dt(degree, problem.max_speed(), config.cfl)
    mol = build_mollifier(degree)
    prod_profile = mol if config.variant == "two_thirds" else identity_profile(degree)

    def row(t, c):
        spec = SpectralField(degree, c)
        report = norms(spec, mol)
        inst = burgers.instability_functional(spec)
        return {"t": t, "l2": report.l2, "l2_sigma": report.weighted_l2,
                "l6": report.l6, "maxabs": report.linf, "tv": report.tv,
                "tv_product_over_sqrt_m": inst.product_over_sqrt_m,
                "energy_production": burgers.energy_production(spec, prod_profile)}

    return problem, u0, du0, dt, mol, row


_BURGERS_COLUMNS = ("t", "l2", "l2_sigma", "l6", "maxabs", "tv",
                    "tv_product_over_sqrt_m", "energy_production")


def _run_burgers(config: ExperimentConfig, degree: int):
    problem, u0, du0, dt, mol, row = _burgers_setup(config, degree)
    rows, snaps, outcome, fail, final = _march(
        problem.initial_coeffs(), problem.make_rhs(), dt,
        config.t_end, config.snapshots, row)
    series = f"series_N{degree}.csv"
    _write_csv(os.path.join(config.out, series), _BURGERS_COLUMNS, rows)
    return u0, du0, mol, rows, outcome, fail, final, series


def _member_burgers_rate(config: ExperimentConfig, degree: int, shared) -> MemberResult:
    u0, du0, mol, rows, outcome, fail, final, series = _run_burgers(config, degree)
    if outcome != "completed":
        return MemberResult(degree, outcome, None, fail, files=(series,))
    m = 8 * (2 * degree + 1)
    xs = TWO_PI * np.arange(m) / m
    exact = burgers.solve_characteristics(u0, config.t_end, xs, du0)
    mine = resample(final, m)
    gap = float(np.sqrt(TWO_PI / m * np.sum((mine - exact) ** 2)))
    return MemberResult(degree, outcome, gap, files=(series,))


def _member_burgers_conserve(config: ExperimentConfig, degree: int, shared) -> MemberResult:
    problem, u0, du0, dt, mol, row = _burgers_setup(config, degree)
    c0 = problem.initial_coeffs()
    rows, snaps, outcome, fail, final = _march(c0, problem.make_rhs(), dt,
                                               config.t_end, config.snapshots, row)
    series = f"series_N{degree}.csv"
    _write_csv(os.path.join(config.out, series), _BURGERS_COLUMNS, rows)
    if outcome != "completed":
        return MemberResult(degree, outcome, None, fail, files=(series,))
    weights = mol.factors if config.variant == "two_thirds" else np.ones(2 * degree + 1)
    before = float(np.sum(weights * np.abs(c0) ** 2))
    after = float(np.sum(weights * np.abs(final) ** 2))
    drift = abs(after - before) / before
    return MemberResult(degree, outcome, drift, files=(series,))


def _member_burgers_postshock(config: ExperimentConfig, degree: int, shared) -> MemberResult:
    u0, du0, mol, rows, outcome, fail, final, series = _run_burgers(config, degree)
    if outcome != "completed":
        return MemberResult(degree, outcome, None, fail, files=(series,))
    report = burgers.instability_functional(SpectralField(degree, final))
    extras = {"tv": report.tv, "maxabs": report.maxabs}
    return MemberResult(degree, outcome, report.product_over_sqrt_m,
                        extras=extras, files=(series,))


def _prepare_sv_reference(config: ExperimentConfig) -> dict:
    u0, _ = _sine_initial(config.initial)
    reference = burgers.godunov_reference(u0, config.t_end, 1 << 14)
    from .diagnostics import total_variation

    return {"ref_values": reference.values, "ref_resolution": reference.resolution,
            "ref_tv": total_variation(reference.values)}


def _values_at_centers(coeffs: np.ndarray, m: int) -> np.ndarray:
    """Evaluate a degree-N trig polynomial at the m cell centers (j+1/2)*2pi/m."""
    N = (len(coeffs) - 1) // 2
    k = np.arange(-N, N + 1)
    buf = np.zeros(m, dtype=np.complex128)
    buf[k % m] = coeffs * np.exp(1j * k * np.pi / m)
    return np.fft.ifft(buf).real * m


def _member_burgers_sv(config: ExperimentConfig, degree: int, shared) -> MemberResult:
    u0, du0, mol, rows, outcome, fail, final, series = _run_burgers(config, degree)
    if outcome != "completed":
        return MemberResult(degree, outcome, None, fail, files=(series,))
    ref = shared["ref_values"]
    m = int(shared["ref_resolution"])
    mine = _values_at_centers(final, m)
    gap = float(np.sqrt(TWO_PI / m * np.sum((mine - ref) ** 2)))
    report = burgers.instability_functional(SpectralField(degree, final))
    extras = {"tv": report.tv, "ref_tv": float(shared["ref_tv"])}
    return MemberResult(degree, outcome, gap, extras=extras, files=(series,))


_EULER_COLUMNS = ("t", "energy", "energy_sigma", "enstrophy", "div_defect")


def _euler_initial(config: ExperimentConfig, degree: int) -> euler.VelocityField2D:
    if config.initial == "random":
        return euler.random_divfree(degree, config.seed, decay=2.0)
    if config.initial in ("taylor_green", "shear_layer_smooth"):
        return euler.exact_flow(config.initial, degree)
    raise ConfigError(
        f"unknown initial {config.initial!r}; known here: random, taylor_green, shear_layer_smooth"
    )


def _member_euler(config: ExperimentConfig, degree: int, shared) -> MemberResult:
    if config.variant == "spectral":
        rhs = euler.make_rhs_spectral(degree)
    elif config.variant == "two_thirds":
        rhs = euler.make_rhs_two_thirds(degree)
    else:
        raise ConfigError(f"variant {config.variant!r} is not available for the 2D solver")
    start = _euler_initial(config, degree)
    sigma = euler.radial_two_thirds_multiplier(degree)
    dt = config.dt if config.dt is not None else default_dt(degree, euler.max_speed(start), config.cfl)

    def row(t, c):
        f = euler.VelocityField2D(degree, c)
        return {"t": t, "energy": euler.energy(f),
                "energy_sigma": euler.weighted_energy(f, sigma),
                "enstrophy": euler.enstrophy(f),
                "div_defect": f.divergence_defect()}

    rows, snaps, outcome, fail, final = _march(start.coeffs, rhs, dt,
                                               config.t_end, config.snapshots, row)
    series = f"series_N{degree}.csv"
    _write_csv(os.path.join(config.out, series), _EULER_COLUMNS, rows)
    files = [series]
    if outcome == "completed":
        final_field = euler.VelocityField2D(degree, final)
        omega = euler.values_from_coeffs_2d(euler.vorticity(final_field))
        X1, X2 = euler.grid_points_2d(degree)
        vort_rows = [{"x1": x1, "x2": x2, "omega": w}
                     for x1, x2, w in zip(X1.ravel(), X2.ravel(), omega.ravel())]
        vort = f"vorticity_N{degree}.csv"
        _write_csv(os.path.join(config.out, vort), ("x1", "x2", "omega"), vort_rows)
        files.append(vort)
    else:
        return MemberResult(degree, outcome, None, fail, files=tuple(files))

    if config.experiment == "euler2d-taylor-green":
        dev = final_field.coeffs - start.coeffs
        metric = float(TWO_PI * np.sqrt(np.sum(np.abs(dev) ** 2)))
    else:
        if config.variant == "spectral":
            before, after = euler.energy(start), euler.energy(final_field)
        else:
            before = euler.weighted_energy(start, sigma)
            after = euler.weighted_energy(final_field, sigma)
        metric = abs(after - before) / before
    worst_div = max(r["div_defect"] for r in rows)
    return MemberResult(degree, outcome, metric,
                        extras={"max_div_defect": worst_div}, files=tuple(files))


def _member_isentropic(config: ExperimentConfig, degree: int, shared) -> MemberResult:
    if config.initial != "small_smooth":
        raise ConfigError(f"unknown initial {config.initial!r}; known here: small_smooth")
    law = _pressure_law(config.law)
    start = isentropic.sample_state(lambda x: 0.1 * np.sin(x),
                                    lambda x: 0.1 * np.cos(x), degree)
    vvals = resample(start.v.coeffs, 4 * degree + 1)
    law.check_domain(vvals)
    speed = float(np.sqrt(np.max(law.dq(vvals))))
    dt = config.dt if config.dt is not None else default_dt(degree, speed, config.cfl)

    def row(t, y):
        state = isentropic.IsentropicState.unpack(degree, y)
        return {"t": t,
                "l2_u": float(np.sqrt(TWO_PI * np.sum(np.abs(y[0]) ** 2))),
                "l2_v": float(np.sqrt(TWO_PI * np.sum(np.abs(y[1]) ** 2))),
                "total_entropy": isentropic.total_entropy(state, law)}

    rows, snaps, outcome, fail, final = _march(start.pack(), isentropic.make_rhs(degree, law),
                                               dt, config.t_end, config.snapshots, row)
    series = f"series_N{degree}.csv"
    _write_csv(os.path.join(config.out, series),
               ("t", "l2_u", "l2_v", "total_entropy"), rows)
    if outcome != "completed":
        return MemberResult(degree, outcome, None, fail, files=(series,))
    final_state = isentropic.IsentropicState.unpack(degree, final)
    e0 = isentropic.total_entropy(start, law)
    drift = abs(isentropic.total_entropy(final_state, law) - e0) / abs(e0)
    if config.law == "linear":
        oracle = isentropic.exact_wave_solution(start, config.t_end)
        gap = final - oracle.pack()
        metric = float(np.sqrt(TWO_PI * np.sum(np.abs(gap) ** 2)))
    else:
        metric = drift
    return MemberResult(degree, outcome, metric,
                        extras={"entropy_drift": drift}, files=(series,))


# -- the registry --

@dataclass(frozen=True)
class ExperimentDef:
    name: str
    description: str
    defaults: dict
    member: object
    prepare: object = None


REGISTRY: dict = {}


def _register(name, description, member, prepare=None, **overrides):
    defaults = {
        "variant": "spectral", "N": "32", "dt": "", "cfl": "0.5",
        "t_end": "1.0", "snapshots": "0.0,1.0", "initial": "sin",
        "sv_order": "1", "law": "exponential", "fix": "off",
        "seed": "2026", "out": f"runs/{name}",
    }
    defaults.update(overrides)
    REGISTRY[name] = ExperimentDef(name, description, defaults, member, prepare)


_register(
    "linear-resolved-decay",
    "model recursion with resolved k^-3 data: top mode decays ~N^-2",
    _member_linear,
    N="100,200,400,800", t_end="3.0", snapshots="0.0,1.5,3.0", initial="inverse_cubic",
)
_register(
    "linear-weak-instability",
    "model recursion with under-resolved bump data: top modes grow ~sqrt(N); fix=on stops it",
    _member_linear,
    N="100,200,400", t_end="1.0", snapshots="0.0,0.5,1.0", initial="cubic_bump",
)
_register(
    "burgers-smooth-rate",
    "pre-shock convergence against characteristics (super-algebraic)",
    _member_burgers_rate,
    N="16,32,64", dt="0.0005", t_end="1.0", snapshots="0.0,1.0", initial="half_sin",
)
_register(
    "burgers-conserve",
    "smooth-run conservation drift of the variant's energy at fixed N",
    _member_burgers_conserve,
    N="128", t_end="2.0", snapshots="0.0,2.0", initial="small_sin",
)
_register(
    "burgers-postshock-tv",
    "de-aliased variant past the shock: max|u| * TV^2 growth in N",
    _member_burgers_postshock,
    variant="two_thirds", N="64,128,256,512", t_end="2.0", snapshots="0.0,2.0",
    initial="sin", cfl="0.4",
)
_register(
    "burgers-sv",
    "spectrally-damped variant past the shock vs a fine Godunov reference",
    _member_burgers_sv,
    prepare=_prepare_sv_reference,
    variant="sv", N="64,128,256", t_end="2.0", snapshots="0.0,2.0",
    initial="sin", cfl="0.4",
)
_register(
    "euler2d-conserve",
    "random divergence-free field: energy (or smoothed energy) drift",
    _member_euler,
    N="32", dt="0.001", t_end="2.0", snapshots="0.0,2.0", initial="random",
)
_register(
    "euler2d-taylor-green",
    "stationary cell flow: deviation from the initial data",
    _member_euler,
    N="32", t_end="1.0", snapshots="0.0,1.0", initial="taylor_green",
)
_register(
    "isentropic-entropy",
    "coupled system: total-energy conservation (linear law: wave-solution gap)",
    _member_isentropic,
    N="64", t_end="1.0", snapshots="0.0,1.0", initial="small_smooth",
)


# -- sweep orchestration --

@dataclass(frozen=True)
class SweepResult:
    config: ExperimentConfig
    out_dir: str
    members: tuple
    slope: float | None
    outcome: str
    files: tuple
    manifest_path: str


def effective_config(name: str, config_text: str | None = None,
                     overrides: dict | None = None) -> ExperimentConfig:
    """Defaults for `name`, overlaid with config-file text, then CLI overrides."""
    if name not in REGISTRY:
        raise ConfigError(
            f"unknown experiment {name!r}; registered: {', '.join(REGISTRY)}"
        )
    raw = dict(REGISTRY[name].defaults)
    raw["experiment"] = name
    if config_text is not None:
        file_values = parse_config_text(config_text)
        named = file_values.pop("experiment", None)
        if named is not None and named != name:
            raise ConfigError(
                f"config file is for experiment {named!r}, but {name!r} was requested"
            )
        raw.update(file_values)
    for key, value in (overrides or {}).items():
        if key not in raw:
            raise ConfigError(f"unknown override key {key!r}")
        raw[key] = value
    return build_config(raw)


def _member_job(args):
    name, config, degree, shared = args
    definition = REGISTRY[name]
    try:
        return definition.member(config, degree, shared)
    except (ValueError, RuntimeError, FloatingPointError, ZeroDivisionError) as exc:
        return MemberResult(degree, "aborted", None, message=str(exc))


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> SweepResult:
    """Run the sweep, write per-member CSVs, summary.csv, and manifest.txt."""
    definition = REGISTRY.get(config.experiment)
    if definition is None:
        raise ConfigError(
            f"unknown experiment {config.experiment!r}; registered: {', '.join(REGISTRY)}"
        )
    started = time.monotonic()
    os.makedirs(config.out, exist_ok=True)
    with open(os.path.join(config.out, "config.txt"), "w") as fh:
        fh.write(emit_config(config))

    shared = definition.prepare(config) if definition.prepare is not None else None
    jobs = [(config.experiment, config, degree, shared) for degree in config.n_list]
    if workers is None:
        workers = min(len(jobs), os.cpu_count() or 1)
    if workers <= 1 or len(jobs) == 1:
        members = [_member_job(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            members = list(pool.map(_member_job, jobs))

    usable = [(m.degree, m.error) for m in members
              if m.outcome == "completed" and m.error is not None and m.error > 0.0]
    slope = None
    if len(usable) >= 3:
        slope = fit_rate([n for n, _ in usable], [e for _, e in usable]).slope

    summary_rows = [{"N": m.degree, "error": m.error, "slope": slope} for m in members]
    _write_csv(os.path.join(config.out, "summary.csv"), ("N", "error", "slope"), summary_rows)

    outcome = "completed" if all(m.outcome == "completed" for m in members) else "blowup"
    files = ["config.txt", "summary.csv"]
    for m in members:
        files.extend(m.files)

    lines = [
        f"experiment = {config.experiment}",
        f"version = {__version__}",
        f"outcome = {outcome}",
        f"slope = {_cell(slope)}",
    ]
    for m in members:
        lines.append(f"run_N{m.degree}.outcome = {m.outcome}")
        lines.append(f"run_N{m.degree}.error = {_cell(m.error)}")
        if m.failure_time is not None:
            lines.append(f"run_N{m.degree}.failure_time = {_cell(m.failure_time)}")
        for key in sorted(m.extras):
            lines.append(f"run_N{m.degree}.{key} = {_cell(m.extras[key])}")
        if m.message:
            lines.append(f"run_N{m.degree}.message = {m.message}")
    for name in files:
        lines.append(f"sha256.{name} = {_sha256(os.path.join(config.out, name))}")
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    lines.append(f"timestamp = {stamp} wall = {time.monotonic() - started:.3f}s")
    manifest_path = os.path.join(config.out, "manifest.txt")
    with open(manifest_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")

    return SweepResult(config=config, out_dir=config.out, members=tuple(members),
                       slope=slope, outcome=outcome, files=tuple(files),
                       manifest_path=manifest_path)
