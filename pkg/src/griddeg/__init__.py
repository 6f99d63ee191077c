"""Local testers for junta-degree and degree over grids."""
from .distance import FamilySpec, FamilyTooLarge, exact_distance, random_function_at_distance, random_member
from .field_poly import EvalSet, PrimeField, ReducedPolynomial, balanced_size, graded_basis, is_degree_d_on
from .fourier import NoiseSpec, char_expectation, collision_probability, sse_check
from .grid import DomainMismatch, DomainTooLarge, FunctionOracle, GridDomain
from .groups import AbelianGroup
from .hitting_set import HittingSet, build_hitting_set, verify_hitting_set
from .junta_poly import JuntaPolynomial, count_nonroots, interpolate, junta_degree, junta_degree_by_definition
from .lower_bound import AsymmetricGrid, bad_fraction, fooling_certificate, hard_function
from .testers import (
    JuntaTesterConfig,
    TestVerdict,
    WeakDegConfig,
    deg_test,
    estimate_rejection,
    junta_test_recursive,
    junta_test_rephrased,
    lift_general_grid,
    weak_deg_test,
)

__version__ = "0.1.0"
