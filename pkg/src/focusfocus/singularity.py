"""Rank-0 points of the moment map and their Williamson-type labels.

The linearization used for classification is the Jacobian of the Hamiltonian
vector field of ``aH + bF`` restricted to the orbit tangent space. At a rank-0
point this operator is Hamiltonian, so its spectrum is closed under negation
and complex conjugation; a focus-focus point is one where some combination
has four distinct eigenvalues ``+-x +- iy`` with ``x, y != 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .newton import least_squares_newton
from .poisson import OffOrbitError, SystemSpec

FOCUS_FOCUS = "focus_focus"
CENTER_CENTER = "center_center"
CENTER_SADDLE = "center_saddle"
SADDLE_SADDLE = "saddle_saddle"
DEGENERATE = "degenerate"

ON_ORBIT_TOL = 1e-8
RANK_TOL = 1e-8
SPECTRAL_TOL = 1e-6
DEDUP_RADIUS = 1e-6
ACCEPT_TOL = 1e-10


class NotRankZeroError(ValueError):
    pass


@dataclass(frozen=True)
class MomentValue:
    h: float
    f: float


@dataclass
class SingularPoint:
    location: np.ndarray
    rank: int
    spectrum: np.ndarray            # complex eigenvalues of the restricted linearization
    label: str
    combination: tuple[float, float]
    residual: float = 0.0
    meta: dict = field(default_factory=dict)

    def moment(self, sys: SystemSpec) -> MomentValue:
        return MomentValue(float(sys.hamiltonian.eval(self.location)), float(sys.integral.eval(self.location)))

    def to_json(self) -> dict:
        spec = sorted(((float(z.real), float(z.imag)) for z in self.spectrum))
        return {
            "location": [float(v) for v in self.location],
            "rank": int(self.rank),
            "spectrum": [list(p) for p in spec],
            "label": self.label,
            "combination": [float(self.combination[0]), float(self.combination[1])],
        }


def _require_on_orbit(sys: SystemSpec, x: np.ndarray) -> None:
    r = sys.orbit.max_residual(x)
    if r >= ON_ORBIT_TOL:
        raise OffOrbitError(f"Casimir residual {r:.3g} at {x}")


def projected_differentials(sys: SystemSpec, x) -> np.ndarray:
    """2 x (n - k) matrix of dH and dF in an orthonormal orbit-tangent basis."""
    x = np.asarray(x, dtype=float)
    B = sys.orbit.tangent_basis(x)
    return np.stack([sys.hamiltonian.grad(x), sys.integral.grad(x)]) @ B


def moment_rank(sys: SystemSpec, x) -> int:
    """Rank of ``(dH, dF)`` restricted to the orbit through ``x``."""
    x = np.asarray(x, dtype=float)
    _require_on_orbit(sys, x)
    s = np.linalg.svd(projected_differentials(sys, x), compute_uv=False)
    thresh = RANK_TOL * (1.0 + s[0])
    return int(np.sum(s >= thresh))


def _flow_jacobian(sys: SystemSpec, field_, x: np.ndarray) -> np.ndarray:
    """Ambient Jacobian of ``x -> pi(x) grad K(x)``."""
    ps = sys.structure
    return np.einsum("ilj,l->ij", ps.derivative(x), field_.grad(x)) + ps.tensor(x) @ field_.hess(x)


def restricted_linearizations(sys: SystemSpec, x) -> tuple[np.ndarray, np.ndarray]:
    """Restricted flow Jacobians of H and F at a rank-0 point."""
    x = np.asarray(x, dtype=float)
    if moment_rank(sys, x) != 0:
        raise NotRankZeroError(f"point {x} is not a rank-0 point of {sys.name!r}")
    B = sys.orbit.tangent_basis(x)
    AH = B.T @ _flow_jacobian(sys, sys.hamiltonian, x) @ B
    AF = B.T @ _flow_jacobian(sys, sys.integral, x) @ B
    return AH, AF


def linearize(sys: SystemSpec, x, a: float, b: float) -> np.ndarray:
    """Jacobian of ``sgrad(aH + bF)`` at ``x`` in an orthonormal orbit-tangent basis."""
    AH, AF = restricted_linearizations(sys, x)
    return a * AH + b * AF


def _pairwise_distinct(ev: np.ndarray, tol: float) -> bool:
    d = np.abs(ev[:, None] - ev[None, :])
    return bool(np.all(d[np.triu_indices(len(ev), 1)] > tol))


def _closed_under(ev: np.ndarray, op, tol: float) -> bool:
    """Greedy matching of ``ev`` against ``op(ev)``."""
    left = list(op(ev))
    for z in ev:
        j = int(np.argmin([abs(z - w) for w in left]))
        if abs(z - left[j]) > tol:
            return False
        left.pop(j)
    return True


def spectrum_label(ev, tol: float | None = None) -> str:
    """Label a 4-eigenvalue spectrum of a single combination.

    Returns ``degenerate`` when eigenvalues coincide or vanish within the
    tolerance, which defaults to ``1e-6`` times the spectral radius.
    """
    ev = np.asarray(ev, dtype=complex)
    rho = float(np.max(np.abs(ev))) if ev.size else 0.0
    if ev.size != 4 or rho == 0.0:
        return DEGENERATE
    tol = SPECTRAL_TOL * rho if tol is None else tol
    if not _pairwise_distinct(ev, tol):
        return DEGENERATE
    if not (_closed_under(ev, np.negative, tol) and _closed_under(ev, np.conj, tol)):
        return DEGENERATE
    re, im = np.abs(ev.real), np.abs(ev.imag)
    if np.all(re > tol) and np.all(im > tol):
        return FOCUS_FOCUS
    if np.any((re <= tol) & (im <= tol)):
        return DEGENERATE
    n_center = int(np.sum(re <= tol)) // 2
    n_saddle = int(np.sum(im <= tol)) // 2
    if n_center + n_saddle != 2:
        return DEGENERATE
    return {2: CENTER_CENTER, 1: CENTER_SADDLE, 0: SADDLE_SADDLE}[n_center]


def classify(sys: SystemSpec, x, n_combinations: int = 16, seed: int = 0) -> SingularPoint:
    """Label a rank-0 point by scanning combinations ``(cos t, sin t)``.

    Angles are ``2 pi (k + u_k) / n`` with jitter ``u_k ~ U[0, 1)``. The first
    combination with a focus-focus spectrum wins; otherwise the first
    non-degenerate label is reported. Linearly dependent H/F linearizations
    give ``degenerate`` regardless of spectra.
    """
    x = np.asarray(x, dtype=float)
    AH, AF = restricted_linearizations(sys, x)
    rng = np.random.default_rng(seed)
    ks = np.arange(n_combinations)
    angles = 2.0 * np.pi * (ks + rng.uniform(0.0, 1.0, n_combinations)) / n_combinations

    pair = np.stack([AH.ravel(), AF.ravel()])
    sv = np.linalg.svd(pair, compute_uv=False)
    independent = sv[1] > RANK_TOL * (1.0 + sv[0])

    fallback = None
    for t in angles:
        a, b = float(np.cos(t)), float(np.sin(t))
        ev = np.linalg.eigvals(a * AH + b * AF)
        lab = spectrum_label(ev)
        if not independent:
            lab = DEGENERATE
        if lab == FOCUS_FOCUS:
            return SingularPoint(x.copy(), 0, ev, lab, (a, b))
        if fallback is None and lab != DEGENERATE:
            fallback = (lab, ev, (a, b))
    if fallback is None:
        a, b = float(np.cos(angles[0])), float(np.sin(angles[0]))
        return SingularPoint(x.copy(), 0, np.linalg.eigvals(a * AH + b * AF), DEGENERATE, (a, b))
    lab, ev, ab = fallback
    return SingularPoint(x.copy(), 0, ev, lab, ab)


def _critical_system(sys: SystemSpec):
    """Residual/Jacobian of ``grad H = C^T mu``, ``grad F = C^T nu``, ``C(x) = c``.

    Unknowns are ``z = (x, mu, nu)``; the system is overdetermined and its
    zero set is exactly the rank-0 points on the orbit.
    """
    n = sys.dim
    cas = sys.orbit.casimirs
    k = len(cas)
    H, F = sys.hamiltonian, sys.integral
    target = np.asarray(sys.orbit.casimir_values, dtype=float)

    def split(z):
        return z[:, :n], z[:, n:n + k], z[:, n + k:]

    def residual(z):
        x, mu, nu = split(z)
        if k:
            C = np.stack([c.grad(x) for c in cas], axis=1)           # (N, k, n)
            cv = np.stack([c.eval(x) for c in cas], axis=1) - target
            rH = H.grad(x) - np.einsum("bkn,bk->bn", C, mu)
            rF = F.grad(x) - np.einsum("bkn,bk->bn", C, nu)
            return np.concatenate([rH, rF, cv], axis=1)
        return np.concatenate([H.grad(x), F.grad(x)], axis=1)

    def jacobian(z):
        x, mu, nu = split(z)
        N = z.shape[0]
        J = np.zeros((N, 2 * n + k, n + 2 * k))
        JH = H.hess(x)
        JF = F.hess(x)
        if k:
            C = np.stack([c.grad(x) for c in cas], axis=1)
            CH = np.stack([c.hess(x) for c in cas], axis=1)          # (N, k, n, n)
            JH = JH - np.einsum("bk,bkij->bij", mu, CH)
            JF = JF - np.einsum("bk,bkij->bij", nu, CH)
            J[:, :n, n:n + k] = -np.swapaxes(C, 1, 2)
            J[:, n:2 * n, n + k:] = -np.swapaxes(C, 1, 2)
            J[:, 2 * n:, :n] = C
        J[:, :n, :n] = JH
        J[:, n:2 * n, :n] = JF
        return J

    return residual, jacobian


def find_rank0_points(sys: SystemSpec, n_restarts: int = 200, seed: int = 0, box: float = 3.0,
                      n_combinations: int = 16) -> list[SingularPoint]:
    """Locate and classify rank-0 points on the orbit from random restarts.

    Restarts are uniform in ``[-box, box]^n`` projected onto the orbit; each is
    refined by Gauss-Newton on the Lagrange conditions for both integrals.
    Limits closer than ``1e-6`` are merged, keeping the smallest residual.
    Results are sorted lexicographically by location.
    """
    if n_restarts < 1:
        raise ValueError("n_restarts must be >= 1")
    rng = np.random.default_rng(seed)
    n, k = sys.dim, len(sys.orbit.casimirs)
    x0 = sys.orbit.sample(n_restarts, rng, box=box)
    if len(x0) == 0:
        return []
    if k:
        # least-squares multipliers at the start points
        Ct_pinv = np.linalg.pinv(np.swapaxes(sys.orbit.casimir_jacobian(x0), 1, 2))
        mu = np.einsum("bkn,bn->bk", Ct_pinv, sys.hamiltonian.grad(x0))
        nu = np.einsum("bkn,bn->bk", Ct_pinv, sys.integral.grad(x0))
        z0 = np.concatenate([x0, mu, nu], axis=1)
    else:
        z0 = x0
    residual, jacobian = _critical_system(sys)
    res = least_squares_newton(z0, residual, jacobian, tol=1e-12, max_iter=100)

    cands = []
    for z, ok, r in zip(res.x, res.converged, res.residual):
        if not ok:
            continue
        x = z[:n]
        if sys.orbit.max_residual(x) >= ACCEPT_TOL:
            continue
        try:
            D = projected_differentials(sys, x)
        except ValueError:
            continue
        if np.max(np.abs(D)) >= ACCEPT_TOL:
            continue
        cands.append((float(r), x))
    cands.sort(key=lambda t: t[0])
    kept: list[tuple[float, np.ndarray]] = []
    for r, x in cands:
        if all(np.linalg.norm(x - y) > DEDUP_RADIUS for _, y in kept):
            kept.append((r, x))
    kept.sort(key=lambda t: tuple(np.round(t[1], 9)))
    points = []
    for i, (r, x) in enumerate(kept):
        sp = classify(sys, x, n_combinations=n_combinations, seed=seed + i)
        sp.residual = r
        points.append(sp)
    return points
