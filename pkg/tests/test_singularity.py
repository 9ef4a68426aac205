import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from focusfocus import dynamics, poisson, singularity
from focusfocus.poisson import OffOrbitError
from focusfocus.singularity import (
    CENTER_CENTER,
    CENTER_SADDLE,
    DEGENERATE,
    FOCUS_FOCUS,
    SADDLE_SADDLE,
    NotRankZeroError,
    spectrum_label,
)

nonzero = st.floats(0.05, 5.0)


@given(nonzero, nonzero, st.floats(1e-3, 1e3))
def test_label_is_scale_invariant(x, y, scale):
    ev = np.array([x + 1j * y, x - 1j * y, -x + 1j * y, -x - 1j * y])
    assert spectrum_label(ev) == FOCUS_FOCUS
    assert spectrum_label(scale * ev) == FOCUS_FOCUS


@pytest.mark.parametrize("ev, label", [
    ([1j, -1j, 2j, -2j], CENTER_CENTER),
    ([1j, -1j, 2.0, -2.0], CENTER_SADDLE),
    ([1.0, -1.0, 2.0, -2.0], SADDLE_SADDLE),
    ([1j, -1j, 1j, -1j], DEGENERATE),
    ([0, 0, 1j, -1j], DEGENERATE),
    ([1.0, 2.0, 3.0, 4.0], DEGENERATE),
])
def test_spectrum_labels(ev, label):
    assert spectrum_label(np.array(ev, dtype=complex)) == label


def test_canonical_origin_and_regular_points():
    sys = poisson.canonical_focus_model()
    assert singularity.moment_rank(sys, np.zeros(4)) == 0
    assert singularity.moment_rank(sys, np.array([1.0, 0.0, 0.0, 0.0])) == 2
    assert singularity.classify(sys, np.zeros(4)).label == FOCUS_FOCUS
    with pytest.raises(NotRankZeroError):
        singularity.classify(sys, np.array([1.0, 0.2, 0.0, 0.0]))


def test_off_orbit_point_is_rejected():
    with pytest.raises(OffOrbitError):
        singularity.moment_rank(poisson.e3_form41(1.0, 0.0), np.ones(6))


def test_double_well_origin_is_focus_focus():
    pts = singularity.find_rank0_points(poisson.remark_system(), n_restarts=100, seed=0)
    origin = [p for p in pts if np.linalg.norm(p.location) < 1e-8]
    assert len(origin) == 1 and origin[0].label == FOCUS_FOCUS


def test_e3_orbit_has_exactly_the_two_poles():
    sys = poisson.e3_form41(1.0, 0.0)
    pts = singularity.find_rank0_points(sys, seed=0)
    assert len(pts) == 2
    locs = sorted(p.location[5] for p in pts)
    assert np.allclose(locs, [-1.0, 1.0], atol=1e-10)
    assert all(np.allclose(p.location[:5], 0, atol=1e-10) for p in pts)
    assert all(p.moment(sys).h == pytest.approx(1.0) for p in pts)


def test_find_rank0_points_is_deterministic():
    sys = poisson.lambda_form41(0.1, 1.0, 0.0)
    a = [p.to_json() for p in singularity.find_rank0_points(sys, seed=3)]
    b = [p.to_json() for p in singularity.find_rank0_points(sys, seed=3)]
    assert a == b
    assert sum(p["label"] == FOCUS_FOCUS for p in a) == 2


@given(st.floats(0.1, 2.7))
@settings(max_examples=15, deadline=None)
def test_poles_stay_focus_focus_below_the_bound(m):
    sys = poisson.e3_form41(1.0, m)
    assert singularity.classify(sys, np.array([0, 0, m, 0, 0, 1.0])).label == FOCUS_FOCUS


def test_equilibria_stay_fixed_under_the_flow():
    sys = poisson.e3_form41(1.0, 0.5)
    for p in singularity.find_rank0_points(sys, seed=0):
        traj = dynamics.integrate(sys, p.location, 10.0, 1e-2)
        assert np.max(np.abs(traj.states - p.location)) < 1e-10


def test_singular_point_json_shape():
    sys = poisson.canonical_focus_model()
    js = singularity.classify(sys, np.zeros(4)).to_json()
    assert js["rank"] == 0 and len(js["spectrum"]) == 4 and all(len(z) == 2 for z in js["spectrum"])
