import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from griddeg.grid import FunctionOracle, GridDomain
from griddeg.groups import AbelianGroup
from griddeg.junta_poly import (
    JuntaPolynomial,
    count_nonroots,
    evaluate,
    from_difference_basis,
    interpolate,
    junta_degree,
    junta_degree_by_definition,
    junta_degree_of_table,
    random_junta_polynomial,
    random_member_table,
    to_difference_basis,
)

Z2, Z3, Z5 = (AbelianGroup.cyclic(m) for m in (2, 3, 5))


def oracle(table, group):
    table = np.asarray(table)
    return FunctionOracle(GridDomain(table.shape), group, table=table)


def brute_evaluate(P, x):
    """Sum of the coefficients whose pattern matches x on its support."""
    total = P.group.zero()
    for a, g in P.coeffs.items():
        if all(x[i] == b for i, b in a):
            total = P.group.add(total, g)
    return total


def test_evaluate_examples():
    assert evaluate(JuntaPolynomial(Z3, 3, 2), (1, 2)) == (0,)
    P = JuntaPolynomial(Z5, 2, 1, {(1,): 4})
    assert evaluate(P, (1,)) == (4,) and evaluate(P, (0,)) == (0,)
    Q = JuntaPolynomial(Z5, 3, 2, {(): 2, (1, 1): 4})
    assert evaluate(Q, (1, 1)) == (1,)
    assert evaluate(Q, (1, 2)) == (2,)


def test_interpolate_examples():
    const = interpolate(oracle(np.full((3, 3), 2), Z5))
    assert const.coeffs == {(): (2,)}
    ind = interpolate(oracle([0, 1], Z3))
    assert ind.coeffs == {((0, 1),): (1,)}
    point = np.zeros((3, 3), dtype=int)
    point[2, 2] = 1
    assert interpolate(oracle(point, Z2)).coeffs == {((0, 2), (1, 2)): (1,)}
    # AND of "x_i != 0": (delta_1 + delta_2)(x1) * (delta_1 + delta_2)(x2)
    both = np.all(np.indices((3, 3)) != 0, axis=0).astype(int)
    P = interpolate(oracle(both, Z2))
    assert len(P.coeffs) == 4 and P.degree == 2
    for x in itertools.product(range(3), repeat=2):
        assert evaluate(P, x) == (int(both[x]),)


def test_junta_degree_examples():
    assert junta_degree(oracle(np.full((2, 2, 2), 1), Z3)) == 0
    assert junta_degree(oracle((np.indices((3, 3))[0] == 1).astype(int), Z2)) == 1
    xor = np.indices((2, 2)).sum(axis=0) % 2
    # over Z2 the parity is x1 + x2, a sum of 1-juntas; over Z3 it is not
    assert junta_degree(oracle(xor, Z2)) == junta_degree_by_definition(oracle(xor, Z2)) == 1
    assert junta_degree(oracle(xor, Z3)) == junta_degree_by_definition(oracle(xor, Z3)) == 2


def test_uniqueness_exhaustive():
    """interpolate and evaluate are inverse on all 81 functions Z2^2 -> Z3."""
    for values in itertools.product(range(3), repeat=4):
        table = np.array(values).reshape(2, 2)
        P = interpolate(oracle(table, Z3))
        assert np.array_equal(P.to_table()[..., 0], table)
        assert interpolate(P.to_oracle()) == P


def test_count_nonroots_examples():
    assert count_nonroots(JuntaPolynomial(Z3, 2, 2, {(1, 0): 1})) == 2
    assert count_nonroots(JuntaPolynomial(Z3, 2, 2)) == 0
    assert count_nonroots(JuntaPolynomial(Z5, 3, 3, {(): 4})) == 27


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]), st.integers(1, 3), st.integers(0, 3))
def test_nonroot_bound_property(seed, s, n, d):
    d = min(d, n)
    rng = np.random.default_rng(seed)
    P = random_junta_polynomial(AbelianGroup.cyclic(6), s, n, d, rng)
    if not P.is_zero:
        assert count_nonroots(P) >= s ** (n - d)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_table_interpolation_matches_pointwise_evaluation(seed):
    rng = np.random.default_rng(seed)
    P = random_junta_polynomial(AbelianGroup((4, 3)), 3, 3, 2, rng)
    table = P.to_table()
    for x in itertools.product(range(3), repeat=3):
        assert tuple(table[x]) == brute_evaluate(P, x) == evaluate(P, x)


def test_member_tables_have_bounded_degree():
    rng = np.random.default_rng(1)
    for d in range(4):
        table = random_member_table(Z5, 3, 4, d, rng)
        assert junta_degree_of_table(table, Z5) <= d


def test_degree_by_definition_on_composite_group():
    rng = np.random.default_rng(2)
    Z4 = AbelianGroup.cyclic(4)
    for _ in range(30):
        table = rng.integers(0, 4, size=(2, 3, 2, 1))
        assert junta_degree_of_table(table, Z4) == junta_degree_by_definition(table, Z4)


def test_dump_parse_round_trip():
    P = JuntaPolynomial(Z5, 3, 3, {(): 1, (0, 2, 1): 3, (1, 0, 0): 4})
    assert JuntaPolynomial.parse(P.dump(), Z5, 3, 3) == P


def test_difference_basis_examples():
    const = JuntaPolynomial(Z3, 2, 3, {(): 2})
    assert to_difference_basis(const, "star", 1) == {(0, 0, 0): (2,)}
    P = JuntaPolynomial(Z3, 2, 3, {(1, 0, 0): 1})
    assert to_difference_basis(P, "star", 1) == {(1, 0, 0): (1,), (0, 0, 1): (1,)}


@pytest.mark.parametrize("mode,L", [("star", 3), ("star", 1), ("matching", 2)])
def test_difference_basis_round_trip(mode, L):
    rng = np.random.default_rng(3)
    for _ in range(100):
        P = random_junta_polynomial(Z3, 3, 4, 2, rng)
        h = to_difference_basis(P, mode, L)
        assert from_difference_basis(h, Z3, 3, 4, mode, L) == P
