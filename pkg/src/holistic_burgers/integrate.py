"""Fixed-step classical Runge-Kutta integration of the semi-discretisation."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .assembly import HolisticOperator, rhs, spectral_bound
from .stencil import GridField

# real-axis stability limit of classical RK4
RK4_REAL_LIMIT = 2.785


class BlowUpError(RuntimeError):
    """Raised when the state stops being finite."""

    def __init__(self, step: int, t: float):
        super().__init__(f"non-finite state at step {step} (t={t:.6g})")
        self.step = step
        self.t = t


@dataclass(frozen=True)
class IntegratorConfig:
    t1: float
    t0: float = 0.0
    dt: float | str = "auto"
    safety: float = 0.4
    output_every: int = 1

    def __post_init__(self):
        if self.t1 < self.t0:
            raise ValueError(f"t1={self.t1} precedes t0={self.t0}")
        if self.dt != "auto" and not float(self.dt) > 0:
            raise ValueError(f"dt must be positive or 'auto', got {self.dt!r}")
        if not 0 < self.safety <= 1:
            raise ValueError(f"safety factor must lie in (0, 1], got {self.safety}")
        if self.output_every < 1:
            raise ValueError("output_every must be at least 1")


def rk4_step(op: HolisticOperator, u: GridField, t: float, dt: float, step: int = 0) -> GridField:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    y = u.values
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            k1 = rhs(op, y, t)
            k2 = rhs(op, y + 0.5 * dt * k1, t + 0.5 * dt)
            k3 = rhs(op, y + 0.5 * dt * k2, t + 0.5 * dt)
            k4 = rhs(op, y + dt * k3, t + dt)
            new = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    except OverflowError:
        # the closure rows use Python floats, which raise instead of returning inf
        raise BlowUpError(step, t + dt) from None
    if not np.all(np.isfinite(new)):
        raise BlowUpError(step, t + dt)
    return u.with_values(new)


def stable_dt(op: HolisticOperator, safety: float = 0.4) -> float:
    bound = spectral_bound(op)
    if bound == 0.0:
        return math.inf
    return safety * RK4_REAL_LIMIT * op.h**2 / bound


def step_plan(op: HolisticOperator, cfg: IntegratorConfig) -> tuple[float, int]:
    """Step size and step count reaching ``t1`` exactly."""
    span = cfg.t1 - cfg.t0
    if span == 0:
        return 0.0, 0
    if cfg.dt == "auto":
        target = stable_dt(op, cfg.safety)
        n = max(1, math.ceil(span / target)) if math.isfinite(target) else 1
    else:
        dt = float(cfg.dt)
        n = max(1, round(span / dt))
        if not math.isclose(n * dt, span, rel_tol=1e-9, abs_tol=1e-12):
            n = math.ceil(span / dt)
        bound = spectral_bound(op)
        if bound * (span / n) / op.h**2 > RK4_REAL_LIMIT:
            warnings.warn(
                f"dt={span / n:.3g} exceeds the RK4 diffusive stability limit "
                f"{RK4_REAL_LIMIT * op.h**2 / bound:.3g}",
                RuntimeWarning,
                stacklevel=3,
            )
    return span / n, n


def integrate(op: HolisticOperator, u0: GridField, cfg: IntegratorConfig) -> list[tuple[float, GridField]]:
    """Integrate from ``t0`` to ``t1``; returns every ``output_every``-th state plus the last."""
    if u0.m != op.m:
        raise ValueError(f"initial state has {u0.m} points, operator expects {op.m}")
    dt, n = step_plan(op, cfg)
    traj = [(cfg.t0, u0)]
    u = u0
    for k in range(n):
        t = cfg.t0 + k * dt
        u = rk4_step(op, u, t, dt, step=k + 1)
        if (k + 1) % cfg.output_every == 0 or k + 1 == n:
            traj.append((cfg.t0 + (k + 1) * dt, u))
    return traj
