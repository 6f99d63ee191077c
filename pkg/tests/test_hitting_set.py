import itertools

import numpy as np
import pytest

from griddeg.groups import AbelianGroup
from griddeg.hitting_set import (
    build_hitting_set,
    code_dimension,
    random_sign_sums,
    reed_muller_generator,
    sign_sum,
    verify_hitting_set,
    verify_one_point_separation,
)
from griddeg.junta_poly import JuntaPolynomial, random_junta_polynomial

Z5 = AbelianGroup.cyclic(5)


@pytest.fixture(scope="module")
def sets():
    return {(d, s): build_hitting_set(16, d, s, np.random.default_rng(10 * d + s)) for d in (1, 2) for s in (2, 3)}


def test_code_dimension():
    assert code_dimension(16, 1) == 6  # 16 * 2 = 32 < 64
    assert code_dimension(16, 2) == 9  # 120 * 4 = 480 < 512


def test_reed_muller_distances():
    G = reed_muller_generator(4, 2)
    words = (np.indices((2,) * G.shape[0]).reshape(G.shape[0], -1).T @ G) % 2
    weights = words.sum(axis=1)
    assert sorted(set(weights.tolist()) - {0, 16}) == [4, 6, 8, 10, 12]


def test_distances_and_size(sets):
    for (d, s), hs in sets.items():
        assert len(hs.U) == 2**hs.w
        dist = (hs.U[:, None] != hs.U[None]).sum(axis=2)[~np.eye(len(hs.U), dtype=bool)]
        assert dist.min() >= 4 and dist.max() <= 12
        assert verify_hitting_set(hs)


def test_sign_identity_per_coordinate(sets):
    hs = sets[(1, 2)]
    for i in range(16):
        assert hs.chi[hs.U[:, i] == 1].sum() == 0


def test_sign_sums_vanish(sets):
    rng = np.random.default_rng(0)
    for (d, s), hs in sets.items():
        assert not random_sign_sums(hs.U, hs.chi, d, s, Z5, 200, rng).any()
        P = random_junta_polynomial(Z5, s, 16, d, rng)
        assert sign_sum(P, hs.U, hs.chi) == (0,)


def test_separation_on_constructed_sets(sets):
    for (d, s), hs in sets.items():
        assert verify_one_point_separation(hs.U, hs.chi, d, s, Z5)
        assert verify_one_point_separation(hs.U, hs.chi, d, s, AbelianGroup.cyclic(4))


def test_separation_counterexamples():
    k = 6
    U = np.zeros((2, k), dtype=int)
    U[1, 0] = 1
    assert not verify_one_point_separation(U, np.ones(2, dtype=int), 1, 2, Z5)
    for d in (0, 1):
        assert not verify_one_point_separation(U[:1], np.ones(1, dtype=int), d, 2, Z5)


def brute_separates(U, d, s, group):
    """Enumerate every junta-polynomial with support patterns of size <= d (tiny cases)."""
    k = U.shape[1]
    patterns = [tuple((i, b) for i, b in zip(I, bs))
                for r in range(d + 1) for I in itertools.combinations(range(k), r)
                for bs in itertools.product(range(1, s), repeat=r)]
    for coeffs in itertools.product(range(group.order), repeat=len(patterns)):
        P = JuntaPolynomial(group, s, k, dict(zip(patterns, coeffs)))
        values = [P.to_table()[tuple(y)][0] for y in U]
        if sum(v != 0 for v in values) == 1:
            return False
    return True


@pytest.mark.parametrize("m", [2, 4])
def test_separation_matches_enumeration(m):
    rng = np.random.default_rng(m)
    group = AbelianGroup.cyclic(m)
    for _ in range(6):
        U = np.unique(rng.integers(0, 2, size=(3, 3)), axis=0)
        chi = np.ones(len(U), dtype=int)
        assert verify_one_point_separation(U, chi, 1, 2, group) == brute_separates(U, 1, 2, group)
