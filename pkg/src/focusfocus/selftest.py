"""Fast property checks bundled with the CLI ``selftest`` subcommand.

Every check returns plain numbers so the JSON artifact is byte-identical for
a fixed seed. No timings are recorded.
"""
from __future__ import annotations

import numpy as np

from . import dynamics, fiber, obstruction, poisson, singularity
from .scalar_field import Polynomial, polynomial_field, product
from .singularity import MomentValue


def _check(name: str, value, threshold, passed: bool) -> dict:
    return {"name": name, "value": value, "threshold": threshold, "passed": bool(passed)}


def random_polynomial(dim: int, rng: np.random.Generator, n_terms: int = 4, max_deg: int = 2) -> Polynomial:
    terms = {}
    for _ in range(n_terms):
        e = tuple(int(v) for v in rng.integers(0, max_deg + 1, size=dim))
        terms[e] = float(rng.normal())
    return Polynomial(dim, terms)


def bracket_axiom_defects(ps: poisson.PoissonStructure, n_points: int, seed: int) -> dict:
    """Antisymmetry (exact), Leibniz and Jacobi defects on random points."""
    rng = np.random.default_rng(seed)
    antisym = 0.0
    leibniz = 0.0
    jacobi = 0.0
    for _ in range(n_points):
        x = rng.uniform(-2, 2, ps.dim)
        f, g, h = (polynomial_field(random_polynomial(ps.dim, rng)) for _ in range(3))
        antisym = max(antisym, abs(poisson.bracket(ps, f, g, x) + poisson.bracket(ps, g, f, x)))
        lhs = poisson.bracket(ps, product(f, g), h, x)
        rhs = f.eval(x) * poisson.bracket(ps, g, h, x) + g.eval(x) * poisson.bracket(ps, f, h, x)
        leibniz = max(leibniz, abs(lhs - rhs))
        jacobi = max(jacobi, poisson.jacobi_defect(ps, x))
    return {"antisymmetry": antisym, "leibniz": leibniz, "jacobi": jacobi}


def run_selftest(seed: int = 0) -> dict:
    checks = []

    for sys in poisson.catalog():
        d = poisson.involution_defect(sys, 1000, seed)
        checks.append(_check(f"involution[{sys.name}]", d, 1e-10, d < 1e-10))

    structures = [poisson.canonical(2), poisson.e3(), poisson.so4(), poisson.lambda_family(0.1)]
    for ps in structures:
        d = bracket_axiom_defects(ps, 100, seed)
        checks.append(_check(f"antisymmetry[{ps.name}]", d["antisymmetry"], 0.0, d["antisymmetry"] == 0.0))
        checks.append(_check(f"leibniz[{ps.name}]", d["leibniz"], 1e-8, d["leibniz"] < 1e-8))
        checks.append(_check(f"jacobi[{ps.name}]", d["jacobi"], 1e-8, d["jacobi"] < 1e-8))

    canon = poisson.canonical_focus_model()
    origin = np.zeros(4)
    lab = singularity.classify(canon, origin, 16, seed).label
    checks.append(_check("canonical_origin_label", lab, "focus_focus", lab == singularity.FOCUS_FOCUS))
    rng = np.random.default_rng(seed)
    err = 0.0
    for t in rng.uniform(0, 2 * np.pi, 20):
        a, b = np.cos(t), np.sin(t)
        ev = np.sort_complex(np.linalg.eigvals(singularity.linearize(canon, origin, a, b)))
        ref = np.sort_complex(np.array([a + 1j * b, a - 1j * b, -a + 1j * b, -a - 1j * b]))
        err = max(err, float(np.max(np.abs(ev - ref))))
    checks.append(_check("canonical_spectrum", err, 1e-10, err < 1e-10))

    e3sys = poisson.e3_form41(1.0, 0.0)
    fs = fiber.sample_fiber(e3sys, MomentValue(1.0, 0.0), 2000, seed, link_radius=None)
    labels = sorted(p.label for p in fs.rank0_on_fiber)
    checks.append(_check("e3_fiber_complexity", fs.complexity, 2, fs.complexity == 2))
    checks.append(_check("e3_fiber_labels", labels, ["focus_focus"] * 2, labels == ["focus_focus"] * 2))
    checks.append(_check("e3_fiber_components", fs.n_components, 1, fs.n_components == 1))
    dist = float(np.max(fiber.oracle_distance(fs.points, 1.0)))
    checks.append(_check("e3_oracle_distance", dist, 1e-5, dist < 1e-5))

    for m in (0.2, 0.8, 1.4, 2.0, 2.6, 3.0):
        sys = poisson.e3_form41(1.0, m)
        labs = [singularity.classify(sys, np.array([0, 0, e * m, 0, 0, e]), 16, seed).label for e in (1, -1)]
        want_ff = m < 2 * np.sqrt(2)
        ok = all((lb == singularity.FOCUS_FOCUS) == want_ff for lb in labs)
        checks.append(_check(f"focus_window[m={m}]", labs, "focus_focus" if want_ff else "not focus_focus", ok))

    res = obstruction.consistency_check()
    checks.append(_check("obstruction_consistency", len(res["contradictions"]), 0, not res["contradictions"]))

    x0 = np.array([0.0, 8.0, 4.0, 1.0, 0.0, 0.0])
    traj = dynamics.integrate(e3sys, x0, 5.0, 1e-3)
    cdrift = max(traj.drift["f1"], traj.drift["f2"])
    checks.append(_check("casimir_drift", cdrift, 1e-9, cdrift < 1e-9))

    return {"seed": seed, "passed": all(c["passed"] for c in checks), "checks": checks}
