"""Focus-focus singularities of integrable systems on Poisson manifolds."""
from .poisson import (
    OrbitSpec,
    PoissonStructure,
    SystemSpec,
    bracket,
    builtin_system,
    catalog,
    involution_defect,
    sgrad,
)
from .scalar_field import ScalarField, finite_difference_check, make_polynomial_field
from .singularity import MomentValue, SingularPoint, classify, find_rank0_points, linearize, moment_rank

__version__ = "0.1.0"
