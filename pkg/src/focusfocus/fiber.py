"""Sampling fibers of the moment map and measuring focus-focus complexity."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .newton import project_to_level_set
from .poisson import SystemSpec
from .singularity import MomentValue, SingularPoint, find_rank0_points

FIBER_TOL = 1e-8
NEWTON_TOL = 1e-12
NEWTON_ITERS = 80
MIN_EMPTY_RESTARTS = 500
LINK_FACTOR = 3.0


class FiberError(RuntimeError):
    pass


class EmptyFiberError(FiberError):
    """Every one of at least 500 restarts failed: the fiber is taken to be empty."""


class FiberSolverError(FiberError):
    """No restart converged but the budget was too small for an emptiness verdict."""


@dataclass
class FiberSample:
    moment: MomentValue
    points: np.ndarray
    edges: np.ndarray                 # (E, 2) index pairs closer than link_radius
    n_components: int
    labels: np.ndarray                # component id per point
    rank0_on_fiber: list[SingularPoint]
    link_radius: float
    n_restarts: int
    meta: dict = field(default_factory=dict)

    @property
    def complexity(self) -> int:
        return len(self.rank0_on_fiber)

    def to_json(self, include_points: bool = True) -> dict:
        out = {
            "moment": {"h": self.moment.h, "f": self.moment.f},
            "n_points": int(len(self.points)),
            "n_components": int(self.n_components),
            "complexity": int(self.complexity),
            "link_radius": float(self.link_radius),
            "rank0": [p.to_json() for p in self.rank0_on_fiber],
        }
        if include_points:
            out["points"] = [[float(v) for v in p] for p in self.points]
        return out


def fiber_constraints(sys: SystemSpec, moment: MomentValue):
    fields = list(sys.orbit.casimirs) + [sys.hamiltonian, sys.integral]
    targets = list(sys.orbit.casimir_values) + [moment.h, moment.f]
    return fields, targets


def fiber_residuals(sys: SystemSpec, moment: MomentValue, x) -> np.ndarray:
    """Absolute residuals of all fiber equations, shape ``(..., k + 2)``."""
    fields, targets = fiber_constraints(sys, moment)
    x = np.asarray(x, dtype=float)
    return np.abs(np.stack([np.asarray(f.eval(x)) for f in fields], axis=-1) - np.asarray(targets))


def project_to_fiber(sys: SystemSpec, moment: MomentValue, x0: np.ndarray):
    fields, targets = fiber_constraints(sys, moment)
    return project_to_level_set(x0, fields, targets, tol=NEWTON_TOL, max_iter=NEWTON_ITERS)


def _draw_fiber_points(sys, moment, n_points, rng, box, max_restarts, batch):
    found = []
    n_found = 0
    used = 0
    while n_found < n_points and used < max_restarts:
        size = min(batch, max_restarts - used)
        x0 = rng.uniform(-box, box, size=(size, sys.dim))
        res = project_to_fiber(sys, moment, x0)
        used += size
        good = res.x[res.converged]
        good = good[np.max(fiber_residuals(sys, moment, good), axis=-1) < FIBER_TOL] if len(good) else good
        found.append(good)
        n_found += len(good)
    pts = np.concatenate(found, axis=0)[:n_points] if found else np.zeros((0, sys.dim))
    return pts, used


def farthest_point_subset(points: np.ndarray, n: int) -> np.ndarray:
    """Indices of ``n`` points chosen greedily to maximize spacing, starting at index 0."""
    N = len(points)
    if n >= N:
        return np.arange(N)
    P = np.ascontiguousarray(points, dtype=float)
    sq = np.einsum("ij,ij->i", P, P)
    chosen = np.empty(n, dtype=int)
    chosen[0] = 0
    # squared distances via |a|^2 - 2 a.b + |b|^2; only their ordering matters
    dist = sq - 2.0 * (P @ P[0]) + sq[0]
    tmp = np.empty_like(dist)
    for i in range(1, n):
        j = int(np.argmax(dist))
        chosen[i] = j
        np.matmul(P, P[j], out=tmp)
        tmp *= -2.0
        tmp += sq
        tmp += sq[j]
        np.minimum(dist, tmp, out=dist)
    return np.sort(chosen)


def link_graph(points: np.ndarray, link_radius: float | None = None):
    """Neighbor graph and connected components of a point cloud.

    The default radius is 3x the median nearest-neighbor distance.
    """
    n = len(points)
    if n == 0:
        return np.zeros((0, 2), dtype=int), 0, np.zeros(0, dtype=int), 0.0
    tree = cKDTree(points)
    if link_radius is None:
        if n == 1:
            link_radius = 0.0
        else:
            d, _ = tree.query(points, k=2)
            link_radius = LINK_FACTOR * float(np.median(d[:, 1]))
    edges = tree.query_pairs(link_radius, output_type="ndarray")
    adj = coo_matrix((np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(n, n)) if len(edges) \
        else coo_matrix((n, n))
    n_comp, labels = connected_components(adj, directed=False)
    return edges, int(n_comp), labels, float(link_radius)


def sample_fiber(
    sys: SystemSpec,
    moment: MomentValue,
    n_points: int = 5000,
    seed: int = 0,
    link_radius: float | None = None,
    box: float = 2.0,
    max_restarts: int | None = None,
    n_rank0_restarts: int = 200,
    oversample: int = 4,
) -> FiberSample:
    """Sample ``{Casimirs = c, H = h, F = f}`` and annotate its rank-0 points.

    ``oversample * n_points`` projected restarts are thinned to ``n_points``
    by farthest-point selection. Newton projection piles points up where the
    constraint map contracts, and the evenly spread subset keeps the
    median-based linking radius meaningful everywhere on the fiber.

    Raises :class:`EmptyFiberError` when no restart out of at least 500
    converges, and :class:`FiberSolverError` when none converged within a
    smaller budget.
    """
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    rng = np.random.default_rng(seed)
    n_raw = n_points * max(int(oversample), 1)
    if max_restarts is None:
        max_restarts = max(5 * n_raw, MIN_EMPTY_RESTARTS)
    pts, used = _draw_fiber_points(sys, moment, n_raw, rng, box, max_restarts,
                                   batch=max(n_raw, MIN_EMPTY_RESTARTS))
    pts = pts[farthest_point_subset(pts, n_points)]
    if len(pts) == 0:
        if used >= MIN_EMPTY_RESTARTS:
            raise EmptyFiberError(f"no convergent restarts out of {used} for moment {moment}")
        raise FiberSolverError(f"no convergent restarts out of {used} (< {MIN_EMPTY_RESTARTS}) for {moment}")
    edges, n_comp, labels, r = link_graph(pts, link_radius)
    rank0 = [
        p for p in find_rank0_points(sys, n_restarts=n_rank0_restarts, seed=seed)
        if abs(sys.hamiltonian.eval(p.location) - moment.h) < FIBER_TOL
        and abs(sys.integral.eval(p.location) - moment.f) < FIBER_TOL
    ]
    return FiberSample(moment, pts, edges, n_comp, labels, rank0, r, used)


# --- explicit fibers -----------------------------------------------------------

def oracle_fiber_e3(q: float, sign: int, direction) -> np.ndarray:
    """Point of the singular e(3) fiber over ``q * direction``.

    ``m1 = +-sqrt(2) q2``, ``m2 = -+sqrt(2) q1``, ``m3 = 0``.
    """
    d = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(d) - 1.0) > 1e-12:
        raise ValueError(f"direction must be a unit vector, |d| = {np.linalg.norm(d)}")
    if q <= 0:
        raise ValueError("q must be positive")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    qv = q * d
    r2 = np.sqrt(2.0)
    m = np.array([sign * r2 * qv[1], -sign * r2 * qv[0], 0.0])
    return np.concatenate([m, qv])


def oracle_fiber_lambda(c: float, lam: float, sign: int, theta: float, phi: float) -> np.ndarray:
    """Point of the singular fiber of the lam-family orbit ``f1 = c^2, f2 = 0``.

    ``q`` lies on the ellipsoid ``(q1^2 + q2^2)/(1 - 2 lam) + q3^2 = c^2`` at
    spherical angles ``(theta, phi)``; ``m1 = +-q2 k``, ``m2 = -+q1 k``,
    ``m3 = 0`` with ``k = sqrt(2 / (1 - 2 lam))``.
    """
    if lam >= 0.5:
        raise ValueError("lambda must be < 1/2")
    if c <= 0:
        raise ValueError("c must be positive")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    a = np.sqrt(1.0 - 2.0 * lam)
    st = np.sin(theta)
    qv = np.array([c * a * st * np.cos(phi), c * a * st * np.sin(phi), c * np.cos(theta)])
    k = np.sqrt(2.0 / (1.0 - 2.0 * lam))
    m = np.array([sign * k * qv[1], -sign * k * qv[0], 0.0])
    return np.concatenate([m, qv])


def _oracle_linear_map(c: float, lam: float, sign: int) -> np.ndarray:
    """6x3 matrix ``L`` with oracle point ``= L d`` for unit directions ``d``."""
    a = np.sqrt(1.0 - 2.0 * lam)
    k = np.sqrt(2.0 / (1.0 - 2.0 * lam))
    Q = c * np.diag([a, a, 1.0])
    M = sign * k * np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]) @ Q
    return np.vstack([M, Q])


def oracle_distance(points, c: float, lam: float = 0.0, iters: int = 20) -> np.ndarray:
    """Distance from each point to the two-sphere oracle surface.

    Minimizes ``|x - L_s d|`` over unit ``d`` and both signs ``s`` by
    Riemannian Gauss-Newton on the sphere, started from the normalized
    ``q``-part (rescaled by the ellipsoid axes).
    """
    X = np.atleast_2d(np.asarray(points, dtype=float))
    a = np.sqrt(1.0 - 2.0 * lam)
    best = np.full(len(X), np.inf)
    for s in (1, -1):
        L = _oracle_linear_map(c, lam, s)
        d = X[:, 3:] / np.array([a, a, 1.0])
        nrm = np.linalg.norm(d, axis=1, keepdims=True)
        d = np.where(nrm > 0, d / np.where(nrm > 0, nrm, 1.0), np.array([0.0, 0.0, 1.0]))
        for _ in range(iters):
            r = X - d @ L.T                                   # (N, 6)
            P = np.eye(3)[None] - d[:, :, None] * d[:, None, :]
            JL = np.einsum("ij,bjk->bik", L, P)              # tangent Jacobian (N, 6, 3)
            step = np.einsum("bkn,bn->bk", np.linalg.pinv(JL), r)
            d = d + step
            d /= np.linalg.norm(d, axis=1, keepdims=True)
        best = np.minimum(best, np.linalg.norm(X - d @ L.T, axis=1))
    return best


# --- moment image -------------------------------------------------------------

@dataclass
class MomentCell:
    h: float
    f: float
    exists: str        # "true" | "false" | "unknown"
    complexity: int


def moment_image(
    sys: SystemSpec,
    h_range: tuple[float, float],
    f_range: tuple[float, float],
    resolution: int,
    seed: int = 0,
    restarts_per_cell: int = MIN_EMPTY_RESTARTS,
    box: float = 2.0,
    n_rank0_restarts: int = 200,
) -> list[MomentCell]:
    """Tabulate fiber existence and rank-0 counts on a node-centered grid.

    Nodes are ``resolution`` equispaced values per axis (endpoints included);
    each node owns the cell of half-spacing around it. Existence is decided
    by projecting ``restarts_per_cell`` random starts onto the node's fiber;
    a cell with no convergence is ``false`` when at least 500 restarts were
    tried and ``unknown`` otherwise. Complexity counts rank-0 points whose
    moment value falls in the cell.
    """
    if resolution < 1:
        raise ValueError("resolution must be positive")
    hs = np.linspace(h_range[0], h_range[1], resolution) if resolution > 1 else np.array([np.mean(h_range)])
    fs = np.linspace(f_range[0], f_range[1], resolution) if resolution > 1 else np.array([np.mean(f_range)])
    dh = (hs[1] - hs[0]) if resolution > 1 else max(h_range[1] - h_range[0], 1.0)
    df = (fs[1] - fs[0]) if resolution > 1 else max(f_range[1] - f_range[0], 1.0)

    counts = np.zeros((len(hs), len(fs)), dtype=int)
    for p in find_rank0_points(sys, n_restarts=n_rank0_restarts, seed=seed):
        mv = p.moment(sys)
        i = int(np.round((mv.h - hs[0]) / dh)) if dh else 0
        j = int(np.round((mv.f - fs[0]) / df)) if df else 0
        if 0 <= i < len(hs) and 0 <= j < len(fs):
            counts[i, j] += 1

    rng = np.random.default_rng(seed)
    cells = []
    for i, h in enumerate(hs):
        for j, f in enumerate(fs):
            x0 = rng.uniform(-box, box, size=(restarts_per_cell, sys.dim))
            res = project_to_fiber(sys, MomentValue(float(h), float(f)), x0)
            if counts[i, j] > 0 or res.converged.any():
                exists = "true"
            elif restarts_per_cell >= MIN_EMPTY_RESTARTS:
                exists = "false"
            else:
                exists = "unknown"
            cells.append(MomentCell(float(h), float(f), exists, int(counts[i, j])))
    return cells
