"""Fixed-step integration of the Euler equations with Casimir projection."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .poisson import OffOrbitError, SystemSpec

ON_ORBIT_TOL = 1e-8
PROJECTION_TOL = 1e-14
PROJECTION_ITERS = 10


class ProjectionDivergenceError(RuntimeError):
    """Newton projection back onto the orbit failed; the step is too large."""


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    invariants: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def drift(self) -> dict[str, float]:
        return {k: float(np.max(np.abs(v - v[0]))) for k, v in self.invariants.items()}


def _project(sys: SystemSpec, x: np.ndarray) -> np.ndarray:
    orbit = sys.orbit
    if not orbit.casimirs:
        return x
    target = np.asarray(orbit.casimir_values)
    for _ in range(PROJECTION_ITERS):
        r = np.array([c.eval(x) for c in orbit.casimirs]) - target
        if np.max(np.abs(r)) <= PROJECTION_TOL * (1.0 + np.max(np.abs(target))):
            return x
        J = np.array([c.grad(x) for c in orbit.casimirs])
        x = x - J.T @ np.linalg.solve(J @ J.T, r)
    r = np.array([c.eval(x) for c in orbit.casimirs]) - target
    if not np.all(np.isfinite(x)) or np.max(np.abs(r)) > 1e-10:
        raise ProjectionDivergenceError(f"projection did not converge (residual {np.max(np.abs(r)):.3g})")
    return x


def integrate(sys: SystemSpec, x0, t_end: float, dt: float) -> Trajectory:
    """Classical RK4 on ``xdot = pi(x) grad H(x)``, projected onto the orbit after each step.

    The number of steps is ``round(t_end / dt)``. Values of H, F and every
    Casimir are recorded at each stored state.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_end < 0:
        raise ValueError("t_end must be non-negative")
    x = np.asarray(x0, dtype=float).copy()
    r = sys.orbit.max_residual(x)
    if r >= ON_ORBIT_TOL:
        raise OffOrbitError(f"initial point is off the orbit (residual {r:.3g})")

    tensor = sys.structure.tensor
    grad_h = sys.hamiltonian.grad

    def rhs(y):
        return tensor(y) @ grad_h(y)

    n_steps = int(round(t_end / dt))
    states = np.empty((n_steps + 1, sys.dim))
    states[0] = x
    for k in range(n_steps):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * dt * k1)
        k3 = rhs(x + 0.5 * dt * k2)
        k4 = rhs(x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        x = _project(sys, x)
        states[k + 1] = x
    times = dt * np.arange(n_steps + 1)

    inv = {
        sys.hamiltonian.name or "H": np.asarray(sys.hamiltonian.eval(states)),
        sys.integral.name or "F": np.asarray(sys.integral.eval(states)),
    }
    for i, c in enumerate(sys.orbit.casimirs):
        inv[c.name or f"C{i}"] = np.asarray(c.eval(states))
    return Trajectory(times, states, inv)


def drift_report(traj: Trajectory) -> list[dict]:
    """Per-invariant max deviation from the initial value.

    ``relative`` is the deviation over ``|initial value|``, or ``None`` when
    the initial value is zero.
    """
    if len(traj.times) == 0:
        raise ValueError("empty trajectory")
    rows = []
    for name, vals in traj.invariants.items():
        dev = float(np.max(np.abs(vals - vals[0])))
        v0 = abs(float(vals[0]))
        rows.append({"invariant": name, "max_deviation": dev, "relative_deviation": dev / v0 if v0 > 0 else None})
    return rows


def energy_error(sys: SystemSpec, x0, t_end: float, dt: float) -> float:
    traj = integrate(sys, x0, t_end, dt)
    return traj.drift[sys.hamiltonian.name or "H"]


def convergence_slope(sys: SystemSpec, x0, t_end: float, dts) -> tuple[float, list[float]]:
    """Least-squares slope of log(energy error) against log(dt)."""
    errs = [energy_error(sys, x0, t_end, dt) for dt in dts]
    slope = float(np.polyfit(np.log(dts), np.log(errs), 1)[0])
    return slope, errs
