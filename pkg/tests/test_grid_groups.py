from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from griddeg.grid import (
    DomainMismatch,
    DomainTooLarge,
    FunctionOracle,
    GridDomain,
    enumerate_points,
    fraction_disagree,
    hamming_weight,
)
from griddeg.groups import AbelianGroup, GroupMismatch, prime_power_components


def test_enumeration_order():
    pts = list(enumerate_points(GridDomain((2, 3))))
    assert len(pts) == 6
    assert pts[0] == (0, 0) and pts[-1] == (1, 2)
    assert list(enumerate_points(GridDomain((1,)))) == [(0,)]
    assert len(list(enumerate_points(GridDomain((3, 3, 3))))) == 27


def test_points_array_matches_stream():
    D = GridDomain((2, 3, 2))
    assert [tuple(p) for p in D.points_array()] == list(enumerate_points(D))


def test_budget_refusal():
    with pytest.raises(DomainTooLarge):
        GridDomain.symmetric(10, 9).points_array(budget=10**6)
    with pytest.raises(DomainTooLarge):
        list(enumerate_points(GridDomain.symmetric(10, 9), budget=10**6))


def test_huge_cardinality_is_exact():
    assert GridDomain.symmetric(7, 40).cardinality == 7**40


def test_hamming_weight():
    assert hamming_weight((0, 0, 0)) == 0
    assert hamming_weight((1, 0, 2)) == 2
    assert hamming_weight((2,) * 7) == 7


def test_fraction_disagree():
    D = GridDomain.symmetric(2, 2)
    Z2 = AbelianGroup.cyclic(2)
    x = np.indices((2, 2))
    f = FunctionOracle(D, Z2, table=x[0])
    g = FunctionOracle(D, Z2, table=x[1])
    assert fraction_disagree(f, f) == 0
    assert fraction_disagree(f, g) == Fraction(1, 2)
    h = f.table.copy()
    h[1, 1, 0] ^= 1
    assert fraction_disagree(f, FunctionOracle(D, Z2, table=h)) == Fraction(1, 4)
    with pytest.raises(DomainMismatch):
        fraction_disagree(f, FunctionOracle(GridDomain((2, 3)), Z2, table=np.zeros((2, 3), dtype=int)))


def test_callback_oracle_counts_queries():
    D = GridDomain.symmetric(3, 2)
    f = FunctionOracle.from_callback(D, AbelianGroup.cyclic(5), lambda x: (x[0] + x[1]) % 5)
    assert f((2, 2)) == (4,)
    out = f.evaluate_many(np.array([[0, 1], [2, 2]]))
    assert out.tolist() == [[1], [4]]
    assert f.query_count >= 2
    dense = f.to_dense()
    assert dense.table[..., 0].tolist() == [[0, 1, 2], [1, 2, 3], [2, 3, 4]]


def test_group_arithmetic():
    Z5 = AbelianGroup.cyclic(5)
    assert Z5.add((2,), (4,)) == (1,)
    assert Z5.int_mul((2,), 7) == (4,)
    assert Z5.int_mul((3,), 0) == Z5.zero()
    Z23 = AbelianGroup.parse("Z2xZ3")
    assert Z23.neg((1, 2)) == (1, 1)
    assert Z23.descriptor == "Z2xZ3"
    with pytest.raises(GroupMismatch):
        Z5.add((5,), (0,))


def _repeated_add(G, g, m):
    acc = G.zero()
    for _ in range(abs(m)):
        acc = G.add(acc, g)
    return acc if m >= 0 else G.neg(acc)


@given(st.integers(-20, 20), st.integers(0, 5), st.integers(0, 2))
def test_int_mul_matches_repeated_addition(m, a, b):
    G = AbelianGroup((6, 3))
    g = (a, b)
    assert G.int_mul(g, m) == _repeated_add(G, g, m)
    assert G.add(g, G.zero()) == g
    assert G.int_mul(g, -1) == G.neg(g)


def test_prime_power_split():
    comps = prime_power_components(AbelianGroup((12, 5)))
    assert sorted((q, e) for _, q, e in comps) == [(2, 2), (3, 1), (5, 1)]
