import itertools
from fractions import Fraction

import numpy as np
import pytest

from griddeg.fourier import (
    NoiseSpec,
    bernoulli_expectation_bruteforce,
    char_expectation,
    char_expectation_bruteforce,
    character,
    collision_probability,
    collision_probability_direct,
    collision_probability_fourier,
    fourier_transform,
    inverse_transform,
    sample_noise,
    sse_check,
    sse_exponent,
    tail_bound_holds,
)


def test_transform_examples():
    ft = fourier_transform(np.ones((3, 3)))
    assert abs(ft[(0, 0)] - 1) < 1e-12
    assert np.allclose(np.delete(ft.coeffs.ravel(), 0), 0)
    chi = fourier_transform(character((1, 2), 3))
    assert abs(chi[(1, 2)] - 1) < 1e-12 and abs(np.abs(chi.coeffs).sum() - 1) < 1e-12
    delta = np.zeros((4, 4))
    delta[0, 0] = 1
    assert np.allclose(fourier_transform(delta).coeffs, 1 / 16)


def test_inverse_round_trip():
    f = np.random.default_rng(0).random((3, 3, 3))
    assert np.allclose(inverse_transform(fourier_transform(f)), f)


def test_char_expectation_examples():
    for kind in ("bernoulli", "spherical"):
        assert char_expectation((0, 0, 0, 0), NoiseSpec(kind, Fraction(1, 2)), 3) == 1
    full = NoiseSpec("bernoulli", Fraction(2, 3))
    assert full.rho(3) == 0 and char_expectation((1, 0, 2), full, 3) == 0
    # s=3, n=4, nu=1/2, two nontrivial coordinates, against a hand enumeration
    noise = NoiseSpec("spherical", Fraction(1, 2))
    alpha = (1, 2, 0, 0)
    w = np.exp(2j * np.pi / 3)
    total = 0
    for I in itertools.combinations(range(4), 2):
        for shifts in itertools.product((1, 2), repeat=2):
            z = [0] * 4
            for i, v in zip(I, shifts):
                z[i] = v
            total += w ** (np.dot(alpha, z) % 3)
    assert abs(total / (6 * 4) - float(char_expectation(alpha, noise, 3))) < 1e-12
    assert char_expectation_bruteforce(np.array([alpha]), noise, 3) == [char_expectation(alpha, noise, 3)]


def test_bernoulli_closed_form():
    for s, rate in ((3, 0.25), (4, 0.6), (5, 1.0)):
        for alpha in itertools.product(range(s), repeat=3):
            rho = 1 - rate * s / (s - 1)
            weight = sum(a != 0 for a in alpha)
            assert abs(bernoulli_expectation_bruteforce(alpha, rate, s) - rho**weight) < 1e-12


def test_collision_examples():
    noise = NoiseSpec("spherical", Fraction(1, 2))
    assert collision_probability(np.zeros((3,) * 4, dtype=bool), noise, 3, 4) == 0
    assert collision_probability(np.ones((3,) * 4, dtype=bool), noise, 3, 4) == 1
    half = np.indices((2, 2, 2))[0] == 0
    assert collision_probability(half, NoiseSpec("bernoulli", Fraction(1, 2)), 2, 3) == Fraction(1, 4)


def test_collision_routes_agree():
    rng = np.random.default_rng(1)
    for kind, rate in (("spherical", Fraction(2, 3)), ("bernoulli", Fraction(1, 5))):
        noise = NoiseSpec(kind, rate)
        A = rng.random((3,) * 3) < 0.3
        exact = collision_probability(A, noise, 3, 3)
        assert exact == collision_probability_direct(A, noise, 3, 3)
        assert abs(float(exact) - collision_probability_fourier(A, noise, 3, 3)) < 1e-12


def test_collision_monte_carlo():
    rng = np.random.default_rng(2)
    A = rng.random((3,) * 4) < 0.4
    noise = NoiseSpec("spherical", Fraction(1, 2))
    exact = float(collision_probability(A, noise, 3, 4))
    m = 100_000
    xs = rng.integers(0, 3, size=(m, 4))
    moved = np.argsort(rng.random((m, 4)), axis=1)[:, :2]
    ys = xs.copy()
    rows = np.arange(m)[:, None]
    ys[rows, moved] = (xs[rows, moved] + rng.integers(1, 3, size=(m, 2))) % 3
    hits = A[tuple(xs.T)] & A[tuple(ys.T)]
    sigma = np.sqrt(exact * (1 - exact) / m)
    assert abs(hits.mean() - exact) <= 3 * sigma


def test_sample_noise():
    rng = np.random.default_rng(3)
    x = (0, 1, 2, 0, 1)
    assert sample_noise(x, NoiseSpec("bernoulli", 0), 3, rng) == x
    y = sample_noise(x, NoiseSpec("spherical", 1), 3, rng)
    assert all(a != b for a, b in zip(x, y))
    changes = np.array([sample_noise((0,) * 4, NoiseSpec("bernoulli", Fraction(1, 2)), 3, rng) for _ in range(25_000)])
    assert abs((changes != 0).mean() - 0.5) < 0.01


def test_sse_examples():
    empty = sse_check(np.zeros((3,) * 3, dtype=bool), Fraction(1, 3), 3, 3)
    assert empty.ok and empty.lhs == 0 and empty.bound == 0
    full = sse_check(np.ones((3,) * 3, dtype=bool), Fraction(1, 3), 3, 3)
    assert full.ok and full.lhs == 1 and full.bound == 2
    assert sse_exponent(3) == pytest.approx(1 / (2**14 * np.log2(3)))
    assert not sse_check(np.ones((2,) * 3, dtype=bool), Fraction(1, 3), 2, 3).asserted


def test_spherical_rate_must_be_integral():
    with pytest.raises(ValueError):
        NoiseSpec("spherical", Fraction(1, 3)).radius(4)
    snapped, moved = NoiseSpec.snapped_sphere(0.3, 4)
    assert snapped.rate == Fraction(1, 4) and moved


def test_tail_bound():
    _, _, ok = tail_bound_holds(12, Fraction(1, 2), 4)
    assert ok
