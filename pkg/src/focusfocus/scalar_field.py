"""Smooth observables on R^n with value, gradient and Hessian access.

Polynomial fields carry exact derivatives generated term by term from the
monomial list and compiled to plain arithmetic, so a single point costs a few
microseconds and a batch of points is evaluated with numpy broadcasting.
Arbitrary callables fall back to central differences.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

Monomial = tuple[int, ...]

ANALYTIC = "analytic"
FINITE_DIFFERENCE = "finite_difference"


class Polynomial:
    """Sparse real polynomial, a mapping from exponent tuples to coefficients."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[Monomial, float] | None = None):
        if dim <= 0:
            raise ValueError(f"dimension must be positive, got {dim}")
        self.dim = dim
        clean: dict[Monomial, float] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != dim:
                raise ValueError(f"exponent vector {exps} has length {len(exps)}, expected {dim}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = float(c)
            if c != 0.0:
                clean[exps] = clean.get(exps, 0.0) + c
        self.terms = {k: v for k, v in clean.items() if v != 0.0}

    @classmethod
    def from_terms(cls, dim: int, terms: Iterable[tuple[float, Sequence[int]]]) -> "Polynomial":
        acc: dict[Monomial, float] = {}
        for c, exps in terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != dim:
                raise ValueError(f"exponent vector {exps} has length {len(exps)}, expected {dim}")
            acc[exps] = acc.get(exps, 0.0) + float(c)
        return cls(dim, acc)

    @classmethod
    def coordinate(cls, dim: int, i: int) -> "Polynomial":
        e = [0] * dim
        e[i] = 1
        return cls(dim, {tuple(e): 1.0})

    @classmethod
    def constant(cls, dim: int, c: float) -> "Polynomial":
        return cls(dim, {(0,) * dim: c})

    def derivative(self, i: int) -> "Polynomial":
        out: dict[Monomial, float] = {}
        for exps, c in self.terms.items():
            k = exps[i]
            if k == 0:
                continue
            e = list(exps)
            e[i] = k - 1
            e = tuple(e)
            out[e] = out.get(e, 0.0) + c * k
        return Polynomial(self.dim, out)

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.dim != self.dim:
                raise ValueError("dimension mismatch")
            return other
        return Polynomial.constant(self.dim, float(other))

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0.0) + v
        return Polynomial(self.dim, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.dim, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        other = self._coerce(other)
        out: dict[Monomial, float] = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                k = tuple(a + b for a, b in zip(ka, kb))
                out[k] = out.get(k, 0.0) + va * vb
        return Polynomial(self.dim, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        out = Polynomial.constant(self.dim, 1.0)
        for _ in range(int(n)):
            out = out * self
        return out

    def to_records(self) -> list[dict]:
        return [{"coeff": c, "exponents": list(e)} for e, c in sorted(self.terms.items())]

    def __repr__(self) -> str:
        return f"Polynomial(dim={self.dim}, terms={self.terms!r})"


def _monomial_source(c: float, exps: Monomial) -> str:
    factors = [repr(c)]
    for i, e in enumerate(exps):
        if e == 1:
            factors.append(f"x{i}")
        elif e > 1:
            factors.append(f"x{i}**{e}")
    return "*".join(factors)


def _poly_source(p: Polynomial) -> str:
    if not p.terms:
        return "0.0"
    return " + ".join(_monomial_source(c, e) for e, c in sorted(p.terms.items()))


def _compile(dim: int, exprs: list[str]) -> Callable:
    args = ", ".join(f"x{i}" for i in range(dim))
    body = exprs[0] if len(exprs) == 1 else "(" + ", ".join(exprs) + ",)"
    ns: dict = {}
    exec(f"def _f({args}):\n    return {body}\n", ns)
    return ns["_f"]


def _as_points(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class ScalarField:
    """A smooth function R^n -> R.

    ``eval``, ``grad`` and ``hess`` accept a single point of shape ``(n,)`` or a
    batch of shape ``(..., n)`` and return values of shape ``()``/``(...)``,
    ``(n,)``/``(..., n)`` and ``(n, n)``/``(..., n, n)`` respectively.
    """

    dim: int
    eval: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Callable[[np.ndarray], np.ndarray]
    derivative_mode: str = ANALYTIC
    name: str = ""
    poly: Polynomial | None = field(default=None, repr=False, compare=False)

    def __call__(self, x):
        return self.eval(x)


def _polynomial_field(poly: Polynomial, name: str = "") -> ScalarField:
    n = poly.dim
    first = [poly.derivative(i) for i in range(n)]
    second = [[first[i].derivative(j) for j in range(n)] for i in range(n)]
    f_val = _compile(n, [_poly_source(poly)])
    f_grad = _compile(n, [_poly_source(d) for d in first])
    f_hess = _compile(n, [_poly_source(second[i][j]) for i in range(n) for j in range(n)])

    def _batched(fn, x: np.ndarray, width: int):
        cols = np.moveaxis(x, -1, 0)
        out = fn(*cols)
        lead = x.shape[:-1]
        if width == 0:
            return np.broadcast_to(np.asarray(out, dtype=float), lead).copy()
        arrs = [np.broadcast_to(np.asarray(o, dtype=float), lead) for o in out]
        return np.stack(arrs, axis=-1)

    def eval_(x):
        x = _as_points(x)
        if x.ndim == 1:
            return float(f_val(*x.tolist()))
        return _batched(f_val, x, 0)

    def grad_(x):
        x = _as_points(x)
        if x.ndim == 1:
            return np.array(f_grad(*x.tolist()), dtype=float)
        return _batched(f_grad, x, n)

    def hess_(x):
        x = _as_points(x)
        if x.ndim == 1:
            return np.array(f_hess(*x.tolist()), dtype=float).reshape(n, n)
        return _batched(f_hess, x, n * n).reshape(x.shape[:-1] + (n, n))

    return ScalarField(n, eval_, grad_, hess_, ANALYTIC, name, poly)


def make_polynomial_field(dim: int, terms: Iterable[tuple[float, Sequence[int]]], name: str = "") -> ScalarField:
    """Build a polynomial field from ``(coefficient, exponents)`` pairs."""
    if dim <= 0:
        raise ValueError(f"dimension must be positive, got {dim}")
    return _polynomial_field(Polynomial.from_terms(dim, terms), name)


def polynomial_field(poly: Polynomial, name: str = "") -> ScalarField:
    return _polynomial_field(poly, name)


def field_from_records(dim: int, records: Iterable[Mapping], name: str = "") -> ScalarField:
    """Load a polynomial from JSON-style ``{"coeff": c, "exponents": [...]}`` records."""
    terms = []
    for rec in records:
        try:
            terms.append((float(rec["coeff"]), list(rec["exponents"])))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"bad polynomial record {rec!r}") from exc
    return make_polynomial_field(dim, terms, name)


def fd_steps(x: np.ndarray) -> np.ndarray:
    """Scale-aware central-difference steps, 1e-5 * (1 + |x_i|)."""
    return 1e-5 * (1.0 + np.abs(x))


def _fd_grad(f: Callable, x: np.ndarray, steps: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    g = np.empty_like(x)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        h = steps[..., i, None] * e
        g[..., i] = (f(x + h) - f(x - h)) / (2.0 * steps[..., i])
    return g


def _fd_hess(f: Callable, x: np.ndarray, steps: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    H = np.empty(x.shape + (n,))
    f0 = f(x)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = 1.0
        hi = steps[..., i, None] * ei
        H[..., i, i] = (f(x + hi) - 2.0 * f0 + f(x - hi)) / steps[..., i] ** 2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = 1.0
            hj = steps[..., j, None] * ej
            v = (f(x + hi + hj) - f(x + hi - hj) - f(x - hi + hj) + f(x - hi - hj)) / (
                4.0 * steps[..., i] * steps[..., j]
            )
            H[..., i, j] = v
            H[..., j, i] = v
    return H


def field_from_callable(dim: int, fn: Callable[[np.ndarray], float], name: str = "") -> ScalarField:
    """Wrap a user function; derivatives come from central differences.

    ``fn`` must accept a batch ``(..., dim)`` and return ``(...)``; plain
    per-point functions are vectorized automatically.
    """
    if dim <= 0:
        raise ValueError(f"dimension must be positive, got {dim}")

    def eval_(x):
        x = _as_points(x)
        if x.ndim == 1:
            return float(fn(x))
        try:
            out = np.asarray(fn(x), dtype=float)
            if out.shape == x.shape[:-1]:
                return out
        except Exception:
            pass
        flat = x.reshape(-1, dim)
        return np.array([float(fn(p)) for p in flat]).reshape(x.shape[:-1])

    def grad_(x):
        x = _as_points(x)
        return _fd_grad(eval_, x, fd_steps(x))

    def hess_(x):
        x = _as_points(x)
        return _fd_hess(eval_, x, fd_steps(x))

    return ScalarField(dim, eval_, grad_, hess_, FINITE_DIFFERENCE, name)


def product(f: ScalarField, g: ScalarField) -> ScalarField:
    """Pointwise product; exact for polynomials, product rule otherwise."""
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    if f.poly is not None and g.poly is not None:
        return polynomial_field(f.poly * g.poly, f"({f.name})*({g.name})")

    def eval_(x):
        return f.eval(x) * g.eval(x)

    def grad_(x):
        fv, gv = np.asarray(f.eval(x))[..., None], np.asarray(g.eval(x))[..., None]
        return fv * g.grad(x) + gv * f.grad(x)

    def hess_(x):
        fv, gv = np.asarray(f.eval(x)), np.asarray(g.eval(x))
        fg, gg = f.grad(x), g.grad(x)
        cross = fg[..., :, None] * gg[..., None, :]
        return fv[..., None, None] * g.hess(x) + gv[..., None, None] * f.hess(x) + cross + np.swapaxes(cross, -1, -2)

    mode = ANALYTIC if f.derivative_mode == g.derivative_mode == ANALYTIC else FINITE_DIFFERENCE
    return ScalarField(f.dim, eval_, grad_, hess_, mode, f"({f.name})*({g.name})")


def finite_difference_check(f: ScalarField, x, step: float = 1e-5) -> dict:
    """Compare analytic derivatives against central differences at ``x``.

    Returns ``{"grad_error": ..., "hess_error": ...}`` with max absolute
    discrepancies. The Hessian is differenced from the analytic gradient.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    x = np.asarray(x, dtype=float)
    n = f.dim
    g = f.grad(x)
    H = f.hess(x)
    g_fd = np.empty(n)
    H_fd = np.empty((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = step
        g_fd[i] = (f.eval(x + e) - f.eval(x - e)) / (2 * step)
        H_fd[:, i] = (f.grad(x + e) - f.grad(x - e)) / (2 * step)
    return {
        "grad_error": float(np.max(np.abs(g - g_fd))),
        "hess_error": float(np.max(np.abs(H - H_fd))),
    }
