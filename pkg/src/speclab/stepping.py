"""Fixed-step classical RK4 driver with observer hooks and a blow-up guard.

All solvers in the package reduce to a first-order system dy/dt = rhs(t, y)
on a flat numpy array y (real or complex); the driver neither knows nor cares
what the array encodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class OdeState:
    t: float
    y: np.ndarray


@dataclass(frozen=True)
class StepControl:
    """Fixed step dt up to t_end; the final step is shortened to land exactly."""

    dt: float
    t_end: float

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.t_end < 0.0:
            raise ValueError("t_end must be nonnegative")


def default_dt(degree: int, max_speed: float, cfl: float = 0.5) -> float:
    """Advective step limit: cfl * (grid spacing) / speed, speed floored at 1."""
    speed = max(1.0, float(max_speed))
    return cfl * TWO_PI / ((2 * degree + 1) * speed)


@dataclass
class Observer:
    """Collects one row of diagnostics every `every` steps (plus first and last)."""

    name: str
    probe: object  # callable OdeState -> dict
    every: int = 1

    def __post_init__(self):
        if self.every < 1:
            raise ValueError("observer cadence must be >= 1 step")


@dataclass
class RunRecord:
    """Outcome of one integrate() call: per-observer row lists plus the final state."""

    series: dict = field(default_factory=dict)
    outcome: str = "completed"
    failure_time: float | None = None
    steps: int = 0
    final: OdeState | None = None

    def rows(self, name: str) -> list:
        return self.series[name]


def _rk4(t, y, rhs, dt):
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = rhs(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_step(state: OdeState, rhs, dt: float) -> OdeState:
    """One classical Runge-Kutta step of size dt."""
    return OdeState(state.t + dt, _rk4(state.t, state.y, rhs, dt))


def integrate(state: OdeState, rhs, control: StepControl, observers: list[Observer] | None = None) -> RunRecord:
    """March state to control.t_end, recording observers and guarding against blow-up.

    On a non-finite step result the run stops, the record's outcome is set to
    "blowup" with the time of the offending step, and whatever rows were
    collected so far are kept.
    """
    observers = observers or []
    record = RunRecord(series={obs.name: [] for obs in observers})

    def observe(st):
        for obs in observers:
            row = obs.probe(st)
            if row is not None:
                record.series[obs.name].append(row)

    observe(state)
    t_end = control.t_end
    nstep = 0
    while state.t < t_end - 1e-14 * max(1.0, t_end):
        dt = min(control.dt, t_end - state.t)
        y_next = _rk4(state.t, state.y, rhs, dt)
        nstep += 1
        if not np.all(np.isfinite(y_next)):
            record.outcome = "blowup"
            record.failure_time = state.t + dt
            record.steps = nstep
            record.final = state
            return record
        state = OdeState(state.t + dt, y_next)
        is_last = state.t >= t_end - 1e-14 * max(1.0, t_end)
        for obs in observers:
            if is_last or nstep % obs.every == 0:
                row = obs.probe(state)
                if row is not None:
                    record.series[obs.name].append(row)
    record.steps = nstep
    record.final = state
    return record
