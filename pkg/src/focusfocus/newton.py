"""Batched least-squares Newton iteration for implicit constraint sets."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .scalar_field import ScalarField


@dataclass
class NewtonResult:
    x: np.ndarray          # (N, n) final iterates
    converged: np.ndarray  # (N,) bool
    residual: np.ndarray   # (N,) max-abs residual at the final iterate
    iterations: np.ndarray # (N,) iterations used


def least_squares_newton(
    x0: np.ndarray,
    residual: Callable[[np.ndarray], np.ndarray],
    jacobian: Callable[[np.ndarray], np.ndarray],
    tol: float = 1e-12,
    max_iter: int = 80,
    blowup: float = 1e6,
) -> NewtonResult:
    """Minimum-norm Newton steps ``x <- x - pinv(J) r`` on a batch of starts.

    ``residual`` maps ``(N, n) -> (N, k)`` and ``jacobian`` maps
    ``(N, n) -> (N, k, n)``. The pseudo-inverse keeps the iteration defined
    where the constraint Jacobian drops rank. A start is converged once its
    max-abs residual is below ``tol``; starts that leave the ball of radius
    ``blowup`` are abandoned.
    """
    x = np.array(x0, dtype=float, copy=True)
    if x.ndim == 1:
        x = x[None, :]
    N = x.shape[0]
    converged = np.zeros(N, dtype=bool)
    dead = np.zeros(N, dtype=bool)
    iters = np.zeros(N, dtype=int)
    res = np.full(N, np.inf)

    active = np.arange(N)
    for it in range(max_iter + 1):
        if active.size == 0:
            break
        xa = x[active]
        r = residual(xa)
        rn = np.max(np.abs(r), axis=1) if r.shape[1] else np.zeros(len(active))
        res[active] = rn
        done = rn < tol
        converged[active[done]] = True
        bad = ~np.isfinite(rn) | (np.max(np.abs(xa), axis=1) > blowup)
        dead[active[bad]] = True
        keep = ~(done | bad)
        if it == max_iter:
            break
        active, xa, r = active[keep], xa[keep], r[keep]
        if active.size == 0:
            break
        J = jacobian(xa)
        step = np.einsum("bnk,bk->bn", np.linalg.pinv(J), r)
        x[active] = xa - step
        iters[active] += 1
    res[dead] = np.inf
    return NewtonResult(x, converged, res, iters)


def constraint_functions(fields: Sequence[ScalarField], targets: Sequence[float]):
    """Residual/Jacobian closures for the level set ``{f_i = t_i}``."""
    t = np.asarray(targets, dtype=float)

    def residual(x: np.ndarray) -> np.ndarray:
        if not fields:
            return np.zeros(x.shape[:-1] + (0,))
        return np.stack([f.eval(x) for f in fields], axis=-1) - t

    def jacobian(x: np.ndarray) -> np.ndarray:
        if not fields:
            return np.zeros(x.shape[:-1] + (0, x.shape[-1]))
        return np.stack([f.grad(x) for f in fields], axis=-2)

    return residual, jacobian


def project_to_level_set(
    x0: np.ndarray,
    fields: Sequence[ScalarField],
    targets: Sequence[float],
    tol: float = 1e-12,
    max_iter: int = 80,
) -> NewtonResult:
    residual, jacobian = constraint_functions(fields, targets)
    return least_squares_newton(x0, residual, jacobian, tol=tol, max_iter=max_iter)
