import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from focusfocus.newton import least_squares_newton, project_to_level_set
from focusfocus.scalar_field import make_polynomial_field

SPHERE = make_polynomial_field(3, [(1.0, (2, 0, 0)), (1.0, (0, 2, 0)), (1.0, (0, 0, 2))])
PLANE = make_polynomial_field(3, [(1.0, (0, 0, 1))])


@given(st.integers(0, 10_000))
@settings(max_examples=30)
def test_projection_lands_on_the_circle(seed):
    x0 = np.random.default_rng(seed).uniform(-2, 2, (20, 3))
    res = project_to_level_set(x0, [SPHERE, PLANE], [1.0, 0.0])
    x = res.x[res.converged]
    assert res.converged.mean() > 0.9
    assert np.allclose(np.linalg.norm(x, axis=1), 1.0, atol=1e-12)
    assert np.allclose(x[:, 2], 0.0, atol=1e-12)


def test_unreachable_targets_do_not_converge():
    res = project_to_level_set(np.ones((5, 3)), [SPHERE], [-1.0], max_iter=30)
    assert not res.converged.any()


def test_blowup_is_abandoned():
    res = least_squares_newton(np.array([[1.0]]), lambda x: np.exp(-x), lambda x: -np.exp(-x)[..., None],
                               max_iter=200, blowup=10.0)
    assert not res.converged[0] and np.isinf(res.residual[0])
