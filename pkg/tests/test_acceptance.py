"""Acceptance gate: one PASS/FAIL line per criterion (see the terminal summary)."""
import time

import numpy as np
import pytest

from focusfocus import cli, dynamics, fiber, obstruction, poisson, singularity
from focusfocus.selftest import bracket_axiom_defects
from focusfocus.singularity import FOCUS_FOCUS, MomentValue

SQRT8 = 2 * np.sqrt(2)


@pytest.fixture(scope="module")
def e3_fibers():
    sys = poisson.e3_form41(1.0, 0.0)
    t0 = time.perf_counter()
    samples = [fiber.sample_fiber(sys, MomentValue(1.0, 0.0), n_points=5000, seed=s) for s in range(10)]
    return samples, time.perf_counter() - t0


def test_involution_suite(record):
    t0 = time.perf_counter()
    defects = {sys.name: poisson.involution_defect(sys, 1000, seed=0) for sys in poisson.catalog()}
    elapsed = time.perf_counter() - t0
    worst = max(defects.values())
    record(1, "involution defect < 1e-10 on all catalog systems, < 5 s",
           len(defects) == 4 and worst < 1e-10 and elapsed < 5.0, f"max {worst:.2e}, {elapsed:.2f} s")


def test_bracket_axioms(record):
    structures = [poisson.canonical(2), poisson.e3(), poisson.so4(), poisson.lambda_family(0.1),
                  poisson.so3_so3()]
    rows = {ps.name: bracket_axiom_defects(ps, 100, seed=1) for ps in structures}
    antisym = max(r["antisymmetry"] for r in rows.values())
    leib = max(r["leibniz"] for r in rows.values())
    jac = max(r["jacobi"] for r in rows.values())
    record(2, "antisymmetry exact, Leibniz and Jacobi < 1e-8",
           antisym == 0.0 and leib < 1e-8 and jac < 1e-8,
           f"antisym {antisym:.1e}, leibniz {leib:.1e}, jacobi {jac:.1e}")


def test_canonical_spectrum(record):
    sys = poisson.canonical_focus_model()
    origin = np.zeros(4)
    label = singularity.classify(sys, origin).label
    rng = np.random.default_rng(3)
    err = 0.0
    for t in rng.uniform(0, 2 * np.pi, 20):
        a, b = np.cos(t), np.sin(t)
        ev = np.sort_complex(np.linalg.eigvals(singularity.linearize(sys, origin, a, b)))
        ref = np.sort_complex(np.array([a + 1j * b, a - 1j * b, -a + 1j * b, -a - 1j * b]))
        err = max(err, float(np.max(np.abs(ev - ref))))
    record(3, "canonical origin is focus_focus, spectrum = {+-a+-ib} to 1e-10",
           label == FOCUS_FOCUS and err < 1e-10, f"label {label}, max err {err:.1e}")


def test_complexity_two_fiber(record, e3_fibers):
    samples, elapsed = e3_fibers
    counts = {(fs.complexity, fs.n_components) for fs in samples}
    labels_ok = all(sorted(p.label for p in fs.rank0_on_fiber) == [FOCUS_FOCUS] * 2 for fs in samples)
    record(4, "e(3)* fiber at (1,0): 2 focus_focus points, 1 component, 10 seeds, < 60 s",
           counts == {(2, 1)} and labels_ok and elapsed < 60.0,
           f"(complexity, components) = {sorted(counts)}, {elapsed:.1f} s")


def test_oracle_distance(record, e3_fibers):
    pts = e3_fibers[0][0].points
    dist = fiber.oracle_distance(pts, 1.0)
    record(5, "5000 fiber points within 1e-5 of the two-sphere oracle",
           len(pts) == 5000 and float(dist.max()) < 1e-5, f"max distance {dist.max():.1e}")


def test_lambda_fiber(record):
    sys = poisson.lambda_form41(0.1, 1.0, 0.0)
    mv = MomentValue(1.0, 0.0)
    fs = fiber.sample_fiber(sys, mv, n_points=5000, seed=0)
    labels = sorted(p.label for p in fs.rank0_on_fiber)
    rng = np.random.default_rng(6)
    res = 0.0
    for sign in (1, -1):
        for th, ph in zip(rng.uniform(0, np.pi, 200), rng.uniform(0, 2 * np.pi, 200)):
            x = fiber.oracle_fiber_lambda(1.0, 0.1, sign, th, ph)
            res = max(res, float(np.max(np.abs(fiber.fiber_residuals(sys, mv, x)))))
    dist = float(fiber.oracle_distance(fs.points, 1.0, 0.1).max())
    record(6, "lambda=0.1 fiber: 2 focus_focus, 1 component, ellipsoid residual < 1e-10",
           labels == [FOCUS_FOCUS] * 2 and fs.n_components == 1 and res < 1e-10,
           f"labels {labels}, components {fs.n_components}, oracle residual {res:.1e}, "
           f"sample distance {dist:.1e}")


def test_focus_window(record):
    got = {}
    for m in (0.2, 0.8, 1.4, 2.0, 2.6, 3.0):
        sys = poisson.e3_form41(1.0, m)
        got[m] = [singularity.classify(sys, np.array([0, 0, s * m, 0, 0, s])).label for s in (1, -1)]
    inside = all(got[m] == [FOCUS_FOCUS] * 2 for m in (0.2, 0.8, 1.4, 2.0, 2.6))
    outside = FOCUS_FOCUS not in got[3.0]
    record(7, "P+- focus_focus for m < 2 sqrt 2, not at m = 3",
           inside and outside, f"m=3.0 -> {got[3.0]}")


def test_splitting(record):
    sys = poisson.e3_form41(1.0, 0.5)
    pts = [p for p in singularity.find_rank0_points(sys, seed=0) if p.label == FOCUS_FOCUS]
    vals = [p.moment(sys) for p in pts]
    gap = abs(vals[0].h - vals[1].h) + abs(vals[0].f - vals[1].f) if len(vals) == 2 else 0.0
    record(8, "at m = 0.5 the two focus points have distinct moment values",
           len(vals) == 2 and gap > 1e-3, f"{[(v.h, v.f) for v in vals]}")


EXPECTED_TABLE = {
    "cp2": 1, "T2xT2": 1, "M2xM3": 1, "T2xS2": 1, "M2xS2": 1,
    "S2xS2": 2, "S2xS2_unequal": 1, "S2xR2": 1,
    "T*S2_exact": 2, "T*S2_magnetic": 1,
    "e3_m0": 2, "e3_m0.3": 1, "so4_m0": 2, "so4_m0.5": 1,
}
EXPECTED_CONDITIONS = {"S2xS2": "equal_factor_areas", "T*S2_exact": "magnetic_form_exact",
                       "e3_m0": "m_equals_zero", "so4_m0": "m_equals_zero"}


def _generic_descriptors(n, seed):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        yield obstruction.ManifoldDescriptor(
            "generic", compact=bool(rng.integers(2)), dim_h2=int(rng.integers(0, 8)),
            pi2_trivial=bool(rng.integers(2)))


def test_obstruction_table(record):
    cat = obstruction.catalog_descriptors()
    mismatches = []
    for name, want in EXPECTED_TABLE.items():
        desc = cat[name]
        if obstruction.max_complexity(desc) != want:
            mismatches.append(name)
            continue
        v2 = obstruction.admits_complexity(desc, 2)
        if want == 1 and v2.status != obstruction.FORBIDDEN:
            mismatches.append(name)
        if want == 2 and (v2.status != obstruction.CONDITIONAL or v2.condition != EXPECTED_CONDITIONS[name]):
            mismatches.append(name)
    fuzz_bad = 0
    for desc in _generic_descriptors(1000, seed=9):
        statuses = [obstruction.admits_complexity(desc, n).status for n in range(1, 10)]
        if statuses[0] == obstruction.FORBIDDEN:
            fuzz_bad += 1
        first = next((i for i, s in enumerate(statuses) if s == obstruction.FORBIDDEN), len(statuses))
        if any(s != obstruction.FORBIDDEN for s in statuses[first:]):
            fuzz_bad += 1
    record(9, "obstruction table 100% agreement; monotone and n=1 admissible on 1000 descriptors",
           not mismatches and fuzz_bad == 0, f"mismatches {mismatches}, fuzz violations {fuzz_bad}")


def test_dynamics(record):
    sys = poisson.e3_form41(1.0, 0.0)
    t0 = time.perf_counter()
    x0 = sys.orbit.sample(8, np.random.default_rng(10))[0]
    drift = dynamics.integrate(sys, x0, 100.0, 1e-3).drift
    # high-energy start keeps the errors above the roundoff floor
    slope, errs = dynamics.convergence_slope(sys, np.array([0.0, 8.0, 4.0, 1.0, 0.0, 0.0]), 100.0,
                                             [2e-3, 1e-3, 5e-4])
    elapsed = time.perf_counter() - t0
    cas = max(drift["f1"], drift["f2"])
    ok = cas < 1e-9 and drift["H"] < 1e-6 and drift["G"] < 1e-6 and abs(slope - 4) <= 0.5 and elapsed < 30
    record(10, "Casimir drift < 1e-9, H and G drift < 1e-6, slope 4 +- 0.5, < 30 s", ok,
           f"casimir {cas:.1e}, H {drift['H']:.1e}, G {drift['G']:.1e}, slope {slope:.2f}, {elapsed:.1f} s")


def test_selftest_determinism(record, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    codes = [cli.main(["selftest", "--seed", "7", "--out", str(p)]) for p in (a, b)]
    same = a.read_bytes() == b.read_bytes()
    record(11, "selftest artifacts byte-identical for the same seed",
           same and codes == [0, 0], f"exit codes {codes}")
