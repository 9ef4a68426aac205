"""Poisson structures, brackets, coadjoint orbits and the built-in systems.

Coordinates on the six-dimensional duals are ``x = (m1, m2, m3, q1, q2, q3)``.
The canonical four-dimensional model uses ``x = (p1, p2, q1, q2)`` with
``{q_i, p_i} = 1``, so the flow of ``H`` is ``qdot = dH/dp``, ``pdot = -dH/dq``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .newton import NewtonResult, project_to_level_set
from .scalar_field import Polynomial, ScalarField, polynomial_field

EPS3 = np.zeros((3, 3, 3))
for _i, _j, _k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
    EPS3[_i, _j, _k] = 1.0
    EPS3[_j, _i, _k] = -1.0

REGULARITY_TOL = 1e-8


class OffOrbitError(ValueError):
    """A point does not satisfy the Casimir constraints of its orbit."""


class DegenerateOrbitError(ValueError):
    """Casimir differentials are dependent, so the orbit tangent is undefined."""


@dataclass(frozen=True)
class PoissonStructure:
    """A bracket tensor ``pi(x)`` on R^n together with its Casimir functions.

    ``derivative(x)[i, j, l]`` is ``d pi_ij / d x_l``. For Lie-Poisson
    structures both are read off the structure constants table.
    """

    name: str
    dim: int
    tensor: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    casimirs: tuple[ScalarField, ...] = ()
    params: dict = field(default_factory=dict, compare=False)
    structure_constants: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for c in self.casimirs:
            if c.dim != self.dim:
                raise ValueError(f"Casimir {c.name!r} has dim {c.dim}, structure has {self.dim}")


def lie_poisson(structure_constants, casimirs: Sequence[ScalarField] = (), name: str = "custom",
                params: dict | None = None) -> PoissonStructure:
    """Lie-Poisson structure with ``pi_ij(x) = sum_k c[i, j, k] x_k``.

    ``c[i, j, k]`` is the structure constant of ``[e_i, e_j] = sum_k c^k_ij e_k``.
    """
    c = np.array(structure_constants, dtype=float)
    if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
        raise ValueError(f"structure constants must have shape (n, n, n), got {c.shape}")
    if not np.array_equal(c, -np.swapaxes(c, 0, 1)):
        raise ValueError("structure constants are not antisymmetric in the first two indices")
    n = c.shape[0]
    flat = c.reshape(n * n, n)

    def tensor(x):
        x = np.asarray(x, dtype=float)
        return (x @ flat.T).reshape(x.shape[:-1] + (n, n))

    def derivative(x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(c, x.shape[:-1] + (n, n, n))

    return PoissonStructure(name, n, tensor, derivative, tuple(casimirs), dict(params or {}), c)


def canonical(dof: int = 2) -> PoissonStructure:
    """Canonical structure on R^(2 dof), coordinates ``(p_1..p_d, q_1..q_d)``."""
    n = 2 * dof
    P = np.zeros((n, n))
    for i in range(dof):
        P[dof + i, i] = 1.0   # {q_i, p_i} = 1
        P[i, dof + i] = -1.0

    def tensor(x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(P, x.shape[:-1] + (n, n)).copy()

    def derivative(x):
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape[:-1] + (n, n, n))

    return PoissonStructure(f"canonical{n}", n, tensor, derivative, (), {"dof": dof})


def _coord(dim: int, i: int) -> Polynomial:
    return Polynomial.coordinate(dim, i)


def lambda_constants(lam: float) -> np.ndarray:
    """Structure constants of ``{m,m} = eps m``, ``{m,q} = eps q``, ``{q,q} = lam eps m``."""
    c = np.zeros((6, 6, 6))
    c[0:3, 0:3, 0:3] = EPS3
    c[0:3, 3:6, 3:6] = EPS3
    c[3:6, 0:3, 3:6] = EPS3   # {q_i, m_j} = eps_ijk q_k
    c[3:6, 3:6, 0:3] = lam * EPS3
    return c


def lambda_casimirs(lam: float) -> tuple[ScalarField, ScalarField]:
    m = [_coord(6, i) for i in range(3)]
    q = [_coord(6, 3 + i) for i in range(3)]
    f1 = lam * sum(mi * mi for mi in m) + sum(qi * qi for qi in q)
    f2 = sum(mi * qi for mi, qi in zip(m, q))
    return polynomial_field(f1, "f1"), polynomial_field(f2, "f2")


def lambda_family(lam: float, name: str | None = None) -> PoissonStructure:
    """One-parameter family containing e(3)* (lam = 0) and so(4)* (lam = 1)."""
    lam = float(lam)
    if name is None:
        name = "e3" if lam == 0.0 else ("so4" if lam == 1.0 else "lambda")
    return lie_poisson(lambda_constants(lam), lambda_casimirs(lam), name, {"lambda": lam})


def e3() -> PoissonStructure:
    return lambda_family(0.0, "e3")


def so4() -> PoissonStructure:
    """so(4)* with Casimirs ``|m|^2 + |q|^2`` and ``m.q``."""
    return lambda_family(1.0, "so4")


def so3_so3() -> PoissonStructure:
    """so(3)* + so(3)* in coordinates ``(s1, s2, s3, p1, p2, p3)``."""
    c = np.zeros((6, 6, 6))
    c[0:3, 0:3, 0:3] = EPS3
    c[3:6, 3:6, 3:6] = EPS3
    s = [_coord(6, i) for i in range(3)]
    p = [_coord(6, 3 + i) for i in range(3)]
    cs = (polynomial_field(sum(v * v for v in s), "s2"), polynomial_field(sum(v * v for v in p), "p2"))
    return lie_poisson(c, cs, "so3+so3")


# --- brackets ---------------------------------------------------------------

def _check_dims(ps: PoissonStructure, *fields: ScalarField) -> None:
    for f in fields:
        if f.dim != ps.dim:
            raise ValueError(f"field {f.name!r} has dim {f.dim}, structure {ps.name!r} has dim {ps.dim}")


def _check_point(ps: PoissonStructure, x: np.ndarray) -> None:
    if x.shape[-1] != ps.dim:
        raise ValueError(f"point has dim {x.shape[-1]}, structure {ps.name!r} has dim {ps.dim}")


def bracket(ps: PoissonStructure, f: ScalarField, g: ScalarField, x) -> float | np.ndarray:
    """``{f, g}(x) = grad f . pi(x) . grad g``.

    Summed over the upper triangle as ``pi_ij (f_i g_j - f_j g_i)`` so that
    swapping ``f`` and ``g`` flips the sign bit-exactly.
    """
    _check_dims(ps, f, g)
    x = np.asarray(x, dtype=float)
    _check_point(ps, x)
    P = ps.tensor(x)
    gf, gg = f.grad(x), g.grad(x)
    iu, ju = np.triu_indices(ps.dim, 1)
    terms = P[..., iu, ju] * (gf[..., iu] * gg[..., ju] - gf[..., ju] * gg[..., iu])
    out = np.sum(terms, axis=-1)
    return float(out) if out.ndim == 0 else out


def sgrad(ps: PoissonStructure, h: ScalarField, x) -> np.ndarray:
    """Hamiltonian vector field ``xdot_i = {x_i, h} = (pi(x) grad h)_i``."""
    _check_dims(ps, h)
    x = np.asarray(x, dtype=float)
    _check_point(ps, x)
    return np.einsum("...ij,...j->...i", ps.tensor(x), h.grad(x))


def jacobi_defect(ps: PoissonStructure, x) -> float:
    """Max over coordinate triples of the cyclic sum ``pi_il d_l pi_jk + cyc``."""
    x = np.asarray(x, dtype=float)
    P = ps.tensor(x)
    D = ps.derivative(x)
    T = np.einsum("...il,...jkl->...ijk", P, D)
    cyc = T + np.einsum("...ijk->...jki", T) + np.einsum("...ijk->...kij", T)
    return float(np.max(np.abs(cyc)))


# --- orbits and systems -----------------------------------------------------

@dataclass(frozen=True)
class OrbitSpec:
    structure: PoissonStructure
    casimir_values: tuple[float, ...] = ()

    def __post_init__(self):
        if len(self.casimir_values) != len(self.structure.casimirs):
            raise ValueError(
                f"{self.structure.name!r} has {len(self.structure.casimirs)} Casimirs, "
                f"got {len(self.casimir_values)} values"
            )

    @property
    def dim(self) -> int:
        return self.structure.dim

    @property
    def casimirs(self) -> tuple[ScalarField, ...]:
        return self.structure.casimirs

    def residual(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if not self.casimirs:
            return np.zeros(x.shape[:-1] + (0,))
        vals = np.stack([np.asarray(c.eval(x)) for c in self.casimirs], axis=-1)
        return vals - np.asarray(self.casimir_values)

    def max_residual(self, x) -> float:
        r = self.residual(x)
        return float(np.max(np.abs(r))) if r.size else 0.0

    def casimir_jacobian(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if not self.casimirs:
            return np.zeros((0, self.dim))
        return np.stack([c.grad(x) for c in self.casimirs], axis=-2)

    def tangent_basis(self, x) -> np.ndarray:
        """Orthonormal basis (columns) of the kernel of the Casimir differentials."""
        x = np.asarray(x, dtype=float)
        C = self.casimir_jacobian(x)
        k = C.shape[0]
        if k == 0:
            return np.eye(self.dim)
        _, s, Vt = np.linalg.svd(C)
        if s[-1] < REGULARITY_TOL:
            raise DegenerateOrbitError(f"Casimir gradients dependent at {x} (sigma_min={s[-1]:.3g})")
        return Vt[k:].T

    def project(self, x0, tol: float = 1e-12, max_iter: int = 50) -> NewtonResult:
        return project_to_level_set(x0, self.casimirs, self.casimir_values, tol=tol, max_iter=max_iter)

    def sample(self, n: int, rng: np.random.Generator, box: float = 2.0,
               tol: float = 1e-12, max_iter: int = 50) -> np.ndarray:
        """Uniform ambient draws in ``[-box, box]^n`` Newton-projected onto the orbit.

        Returns only converged points, so the count may be below ``n``.
        """
        x0 = rng.uniform(-box, box, size=(n, self.dim))
        if not self.casimirs:
            return x0
        res = self.project(x0, tol=tol, max_iter=max_iter)
        return res.x[res.converged]


@dataclass(frozen=True)
class SystemSpec:
    """An integrable pair ``(H, F)`` on one symplectic leaf."""

    name: str
    orbit: OrbitSpec
    hamiltonian: ScalarField
    integral: ScalarField

    def __post_init__(self):
        _check_dims(self.orbit.structure, self.hamiltonian, self.integral)

    @property
    def structure(self) -> PoissonStructure:
        return self.orbit.structure

    @property
    def dim(self) -> int:
        return self.orbit.dim

    def with_casimirs(self, values: Sequence[float]) -> "SystemSpec":
        return SystemSpec(self.name, OrbitSpec(self.structure, tuple(float(v) for v in values)),
                          self.hamiltonian, self.integral)


def involution_defect(sys: SystemSpec, n_samples: int = 1000, seed: int = 0, box: float = 2.0) -> float:
    """Max ``|{H, F}|`` over points drawn in a box and projected onto the orbit."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    pts = sys.orbit.sample(n_samples, rng, box=box)
    if len(pts) == 0:
        raise RuntimeError(f"no sample converged onto the orbit of {sys.name!r}")
    vals = bracket(sys.structure, sys.hamiltonian, sys.integral, pts)
    return float(np.max(np.abs(vals)))


# --- so(4) = so(3) + so(3) --------------------------------------------------

_SP_TO_MQ = np.block([[np.eye(3), np.eye(3)], [-np.eye(3), np.eye(3)]])
_MQ_TO_SP = np.linalg.inv(_SP_TO_MQ)


def sp_to_mq(x_sp) -> np.ndarray:
    """``m = s + p``, ``q = p - s``."""
    x = np.asarray(x_sp, dtype=float)
    if x.shape[-1] != 6:
        raise ValueError("expected 6 coordinates (s1, s2, s3, p1, p2, p3)")
    s, p = x[..., :3], x[..., 3:]
    return np.concatenate([s + p, p - s], axis=-1)


def mq_to_sp(x_mq) -> np.ndarray:
    """Inverse of :func:`sp_to_mq`: ``s = (m - q)/2``, ``p = (m + q)/2``."""
    x = np.asarray(x_mq, dtype=float)
    if x.shape[-1] != 6:
        raise ValueError("expected 6 coordinates (m1, m2, m3, q1, q2, q3)")
    m, q = x[..., :3], x[..., 3:]
    return np.concatenate([(m - q) / 2.0, (m + q) / 2.0], axis=-1)


def sp_coordinate_fields() -> list[ScalarField]:
    """``s_i`` and ``p_i`` as linear functions of ``(m, q)``."""
    fields = []
    for row, nm in zip(_MQ_TO_SP, ["s1", "s2", "s3", "p1", "p2", "p3"]):
        terms = {tuple(int(j == i) for j in range(6)): float(v) for i, v in enumerate(row) if v != 0.0}
        fields.append(polynomial_field(Polynomial(6, terms), nm))
    return fields


def so4_orbit_values_from_sp(s: float, p: float) -> tuple[float, float]:
    """Casimir values ``(|m|^2 + |q|^2, m.q)`` of the orbit ``|s| = s, |p| = p``."""
    return 2.0 * (s * s + p * p), p * p - s * s


def so4_orbit_cm_from_sp(s: float, p: float) -> tuple[float, float]:
    """``(c, m)`` with ``f1 = c^2`` and ``f2 = m c``."""
    f1, f2 = so4_orbit_values_from_sp(s, p)
    c = float(np.sqrt(f1))
    return c, (f2 / c if c else 0.0)


def so4_orbit_sp_from_cm(c: float, m: float) -> tuple[float, float]:
    f1, f2 = c * c, m * c
    # f1 = 2(s^2 + p^2), f2 = p^2 - s^2
    s2 = (f1 / 2.0 - f2) / 2.0
    p2 = (f1 / 2.0 + f2) / 2.0
    if s2 < 0 or p2 < 0:
        raise ValueError(f"no so(3)+so(3) radii for c={c}, m={m}")
    return float(np.sqrt(s2)), float(np.sqrt(p2))


def rescale_lambda_tensor(lam: float, x_tilde) -> np.ndarray:
    """Bracket tensor of the lam-family pushed to ``(m, q~)`` with ``q = sqrt(lam) q~``."""
    if lam <= 0:
        raise ValueError("rescaling needs lam > 0")
    x_tilde = np.asarray(x_tilde, dtype=float)
    r = np.sqrt(lam)
    x = np.concatenate([x_tilde[..., :3], r * x_tilde[..., 3:]], axis=-1)
    D = np.diag([1.0, 1.0, 1.0, 1 / r, 1 / r, 1 / r])
    return D @ lambda_family(lam).tensor(x) @ D.T


# --- built-in catalog -------------------------------------------------------

def _form41_fields() -> tuple[ScalarField, ScalarField]:
    m = [_coord(6, i) for i in range(3)]
    q3 = _coord(6, 5)
    H = 0.5 * sum(mi * mi for mi in m) + q3 * q3
    return polynomial_field(H, "H"), polynomial_field(m[2], "G")


def canonical_focus_model() -> SystemSpec:
    """``f1 = p1 q1 + p2 q2``, ``f2 = p1 q2 - p2 q1`` on canonical R^4."""
    p1, p2, q1, q2 = (_coord(4, i) for i in range(4))
    f1 = polynomial_field(p1 * q1 + p2 * q2, "f1")
    f2 = polynomial_field(p1 * q2 - p2 * q1, "f2")
    return SystemSpec("canonical4", OrbitSpec(canonical(2), ()), f1, f2)


def remark_system() -> SystemSpec:
    """``H = (p1^2 + p2^2)/2 + (q1^2 + q2^2 - 1)^2``, ``F = p1 q2 - p2 q1``.

    A mechanical system on R^4 with a simple focus-focus point at the origin.
    """
    p1, p2, q1, q2 = (_coord(4, i) for i in range(4))
    H = 0.5 * (p1 * p1 + p2 * p2) + (q1 * q1 + q2 * q2 - 1.0) ** 2
    F = p1 * q2 - p2 * q1
    return SystemSpec("remark-r4", OrbitSpec(canonical(2), ()),
                      polynomial_field(H, "H"), polynomial_field(F, "F"))


def e3_form41(q: float = 1.0, m: float = 0.0) -> SystemSpec:
    """``H = |m|^2/2 + q3^2``, ``G = m3`` on the e(3)* orbit ``|q|^2 = q^2, m.q = m q``."""
    H, G = _form41_fields()
    return SystemSpec("e3-form41", OrbitSpec(e3(), (q * q, m * q)), H, G)


def lambda_form41(lam: float = 0.1, c: float = 1.0, m: float = 0.0) -> SystemSpec:
    """The same pair on the orbit ``lam |m|^2 + |q|^2 = c^2, m.q = m c`` of the lam-bracket."""
    H, G = _form41_fields()
    return SystemSpec("lambda-form41", OrbitSpec(lambda_family(lam, "lambda"), (c * c, m * c)), H, G)


BUILTIN_NAMES = ("canonical4", "remark-r4", "e3-form41", "lambda-form41")


def builtin_system(name: str, casimirs: Sequence[float] | None = None, lam: float | None = None) -> SystemSpec:
    """Look up a built-in system by name, optionally overriding orbit values / lambda."""
    if name == "canonical4":
        sys = canonical_focus_model()
    elif name == "remark-r4":
        sys = remark_system()
    elif name == "e3-form41":
        sys = e3_form41()
    elif name == "lambda-form41":
        sys = lambda_form41(0.1 if lam is None else lam)
    else:
        raise KeyError(f"unknown built-in system {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
    if casimirs is not None:
        sys = sys.with_casimirs(casimirs)
    return sys


def catalog() -> list[SystemSpec]:
    return [builtin_system(n) for n in BUILTIN_NAMES]


# --- JSON descriptors ---------------------------------------------------------

def system_from_descriptor(desc: dict) -> SystemSpec:
    """Build a system from the JSON descriptor used by the CLI config files.

    ``{"bracket": "e3"|"so4"|"lambda"|"canonical4"|"custom", "lambda": float,
    "structure_constants": [[[...]]], "casimirs": [records...],
    "casimir_values": [...], "hamiltonian": [records...], "integral": [records...]}``

    ``casimirs`` is only read for ``custom`` brackets. A ``"builtin"`` key
    short-circuits to :func:`builtin_system`.
    """
    from .scalar_field import field_from_records

    if "builtin" in desc:
        return builtin_system(desc["builtin"], desc.get("casimir_values"), desc.get("lambda"))
    kind = desc.get("bracket")
    if kind == "e3":
        ps = e3()
    elif kind == "so4":
        ps = so4()
    elif kind == "lambda":
        if "lambda" not in desc:
            raise ValueError("lambda bracket needs a 'lambda' value")
        ps = lambda_family(float(desc["lambda"]), "lambda")
    elif kind == "canonical4":
        ps = canonical(2)
    elif kind == "custom":
        if "structure_constants" not in desc:
            raise ValueError("custom bracket needs 'structure_constants'")
        c = np.asarray(desc["structure_constants"], dtype=float)
        dim = c.shape[0]
        cas = [field_from_records(dim, recs, f"C{i}") for i, recs in enumerate(desc.get("casimirs", []))]
        ps = lie_poisson(c, cas, "custom")
    else:
        raise ValueError(f"unknown bracket kind {kind!r}")
    values = tuple(float(v) for v in desc.get("casimir_values", []))
    for key in ("hamiltonian", "integral"):
        if key not in desc:
            raise ValueError(f"descriptor is missing {key!r}")
    H = field_from_records(ps.dim, desc["hamiltonian"], "H")
    F = field_from_records(ps.dim, desc["integral"], "F")
    return SystemSpec(desc.get("name", kind), OrbitSpec(ps, values), H, F)
