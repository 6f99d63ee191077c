import itertools

import numpy as np
from hypothesis import given, settings, strategies as st

from griddeg.linalg import (
    in_column_span_mod_p,
    inverse_mod_p,
    nullspace_mod_p,
    rank_mod_p,
    solvable_mod_prime_power,
    solve_mod_p,
    tall_in_column_span_mod_p,
)


def span_by_enumeration(M, v, m):
    """Is v = M x (mod m) for some x?  Tries every x."""
    for x in itertools.product(range(m), repeat=M.shape[1]):
        if np.array_equal(M @ np.array(x) % m, v % m):
            return True
    return False


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 5]))
def test_span_mod_p(seed, p):
    rng = np.random.default_rng(seed)
    M = rng.integers(0, p, size=(4, 3))
    v = rng.integers(0, p, size=4)
    expected = span_by_enumeration(M, v, p)
    assert in_column_span_mod_p(M, v, p) == expected
    assert tall_in_column_span_mod_p(M, v, p) == expected
    x = solve_mod_p(M, v, p)
    assert (x is not None) == expected
    if x is not None:
        assert np.array_equal(M @ x % p, v % p)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(2, 2), (2, 3), (3, 2)]))
def test_span_mod_prime_power(seed, qe):
    q, e = qe
    rng = np.random.default_rng(seed)
    M = rng.integers(0, q**e, size=(3, 2)) * rng.integers(0, 2, size=(3, 2))
    v = M @ rng.integers(0, q**e, size=2) if rng.random() < 0.5 else rng.integers(0, q**e, size=3)
    assert solvable_mod_prime_power(M, v, q, e) == span_by_enumeration(M, v, q**e)


def test_rank_inverse_nullspace():
    rng = np.random.default_rng(0)
    p = 7
    for _ in range(20):
        A = rng.integers(0, p, size=(5, 5))
        r = rank_mod_p(A, p)
        K = nullspace_mod_p(A, p)
        assert len(K) == 5 - r
        assert not np.any(A @ K.T % p) if len(K) else True
        if r == 5:
            assert np.array_equal(A @ inverse_mod_p(A, p) % p, np.eye(5, dtype=int))
