"""The asymmetric grid S_i = {0, 1, a_i} on which degree-1 testing needs many queries.

g_i(x) = x_i (x_i - 1) has junta-degree 1 but is far from degree 1.  A
non-adaptive one-sided tester with query matrix M must accept g_i whenever
the vector of its answers g_M lies in the column space of M, and a second
column j with the same {0, 1, *} pattern as column i gives an explicit
combination: g_M = a_i (a_i - 1) / (a_i - a_j) * (M_i - M_j).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .field_poly import EvalSet, PrimeField, is_prime
from .grid import FunctionOracle, GridDomain

STAR = 2  # zeta symbol for any entry outside {0, 1}


class NoCollision(ValueError):
    pass


def smallest_prime_at_least(m: int) -> int:
    p = max(2, m)
    while not is_prime(p):
        p += 1
    return p


@dataclass(frozen=True)
class AsymmetricGrid:
    """Coordinates are 0-indexed; a_i = i + 2 (the 1-indexed choice a_i = i + 1)."""

    n: int
    p: int
    a: tuple

    @classmethod
    def canonical(cls, n: int) -> "AsymmetricGrid":
        p = smallest_prime_at_least(n + 2)
        return cls(n, p, tuple(i + 2 for i in range(n)))

    def __post_init__(self):
        if self.p < self.n + 2 or not is_prime(self.p):
            raise ValueError(f"need a prime p >= n+2, got p={self.p}, n={self.n}")
        a = tuple(int(v) % self.p for v in self.a)
        if len(a) != self.n or len(set(a)) != self.n or {0, 1} & set(a):
            raise ValueError(f"a = {a} must be {self.n} distinct elements outside {{0, 1}}")
        object.__setattr__(self, "a", a)

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.p)

    @property
    def domain(self) -> GridDomain:
        return GridDomain((3,) * self.n)

    @property
    def eval_sets(self) -> tuple:
        return tuple(EvalSet(self.field, (0, 1, ai)) for ai in self.a)

    def values(self, indices: np.ndarray) -> np.ndarray:
        """Grid coordinates (0, 1, 2) to field values (0, 1, a_i), column-wise."""
        indices = np.asarray(indices, dtype=np.int64)
        a = np.asarray(self.a, dtype=np.int64)
        return np.where(indices == 2, a[: indices.shape[-1]], indices)

    def random_query_matrix(self, ell: int, rng: np.random.Generator) -> np.ndarray:
        """ell uniformly random grid points, as field values (ell x n)."""
        return self.values(rng.integers(0, 3, size=(ell, self.n)))


def hard_function(i: int, grid: AsymmetricGrid) -> FunctionOracle:
    """g(x) = x_i (x_i - 1) as a callback oracle over grid coordinates."""
    if not 0 <= i < grid.n:
        raise ValueError(f"coordinate {i} outside [0, {grid.n})")
    p = grid.p

    def g(points):
        v = grid.values(points)[:, i]
        return (v * (v - 1) % p)[:, None]

    return FunctionOracle.from_callback(grid.domain, grid.field, g, vectorized=True)


def zeta(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=np.int64)
    return np.where((M == 0) | (M == 1), M, STAR)


def zeta_collision(M: np.ndarray, i: int) -> int | None:
    """The first j != i whose zeta-column equals column i's, if any."""
    Z = zeta(M).reshape(-1, np.asarray(M).shape[-1])
    same = np.all(Z == Z[:, [i]], axis=0)
    same[i] = False
    hits = np.flatnonzero(same)
    return int(hits[0]) if hits.size else None


@dataclass(frozen=True)
class Certificate:
    i: int
    j: int
    coefficients: np.ndarray  # length n, supported on {i, j}
    verified: bool


def fooling_certificate(M: np.ndarray, i: int, j: int, grid: AsymmetricGrid) -> Certificate:
    M = np.asarray(M, dtype=np.int64).reshape(-1, grid.n)
    Z = zeta(M)
    if i == j or not np.array_equal(Z[:, i], Z[:, j]):
        raise NoCollision(f"columns {i} and {j} do not share a zeta-column")
    p = grid.p
    ai, aj = grid.a[i], grid.a[j]
    ci = ai * (ai - 1) * pow(ai - aj, -1, p) % p
    c = np.zeros(grid.n, dtype=np.int64)
    c[i], c[j] = ci, (-ci) % p
    g_M = M[:, i] * (M[:, i] - 1) % p
    return Certificate(i, j, c, bool(np.array_equal(M @ c % p, g_M)))


def bad_indices(M: np.ndarray, n: int) -> np.ndarray:
    """Indices whose zeta-column appears nowhere else in M."""
    Z = zeta(np.asarray(M).reshape(-1, n))
    if Z.shape[0] == 0:
        return np.zeros(0, dtype=np.int64) if n > 1 else np.arange(n)
    _, inverse, counts = np.unique(Z.T, axis=0, return_inverse=True, return_counts=True)
    return np.flatnonzero(counts[inverse.reshape(-1)] == 1)


def bad_fraction(M: np.ndarray, grid: AsymmetricGrid) -> Fraction:
    return Fraction(len(bad_indices(M, grid.n)), grid.n)


def verify_all_certificates(M: np.ndarray, grid: AsymmetricGrid) -> tuple[int, int]:
    """(number of non-bad indices, number whose certificate checks), vectorized over i."""
    M = np.asarray(M, dtype=np.int64).reshape(-1, grid.n)
    n, p = grid.n, grid.p
    Z = zeta(M)
    if M.shape[0] == 0:
        return n if n > 1 else 0, n if n > 1 else 0
    _, inverse = np.unique(Z.T, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    I, J = [], []
    for cls in np.unique(inverse):
        members = np.flatnonzero(inverse == cls)
        if len(members) > 1:
            for pos, i in enumerate(members):
                I.append(i)
                J.append(members[1] if pos == 0 else members[0])
    if not I:
        return 0, 0
    I, J = np.array(I), np.array(J)
    a = np.asarray(grid.a, dtype=np.int64)
    inv = np.array([pow(int(v), -1, p) for v in (a[I] - a[J]) % p], dtype=np.int64)
    c = a[I] * (a[I] - 1) % p * inv % p
    lhs = (M[:, I] - M[:, J]) * c[None, :] % p
    rhs = M[:, I] * (M[:, I] - 1) % p
    ok = np.all(lhs == rhs, axis=0)
    return len(I), int(ok.sum())
