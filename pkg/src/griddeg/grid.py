"""Grid domains, points and query-counted function oracles."""
from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np

from .groups import AbelianGroup, as_group

DEFAULT_POINT_BUDGET = 10**7


class DomainTooLarge(ValueError):
    pass


class DomainMismatch(ValueError):
    pass


@dataclass(frozen=True)
class GridDomain:
    """The product grid Z_{s1} x ... x Z_{sn}, coordinates canonicalized to 0..s_i-1."""

    sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if any(s < 1 for s in sizes):
            raise ValueError(f"grid sizes must be positive, got {sizes}")
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def symmetric(cls, s: int, n: int) -> "GridDomain":
        return cls((s,) * n)

    @property
    def n(self) -> int:
        return len(self.sizes)

    @property
    def cardinality(self) -> int:
        # Python ints never overflow, so this is exact for any grid.
        return math.prod(self.sizes)

    @property
    def is_symmetric(self) -> bool:
        return len(set(self.sizes)) <= 1

    @property
    def alphabet(self) -> int:
        """The common coordinate size of a symmetric grid."""
        if not self.is_symmetric:
            raise DomainMismatch(f"grid {self.sizes} is not symmetric")
        return self.sizes[0] if self.sizes else 1

    def contains(self, x: Sequence[int]) -> bool:
        return len(x) == self.n and all(0 <= int(v) < s for v, s in zip(x, self.sizes))

    def check_point(self, x: Sequence[int]) -> tuple:
        x = tuple(int(v) for v in x)
        if not self.contains(x):
            raise ValueError(f"point {x} is not in grid {self.sizes}")
        return x

    def check_budget(self, budget: int = DEFAULT_POINT_BUDGET) -> None:
        if self.cardinality > budget:
            raise DomainTooLarge(
                f"grid {self.sizes} has {self.cardinality} points, budget is {budget}"
            )

    def points_array(self, budget: int = DEFAULT_POINT_BUDGET) -> np.ndarray:
        """All points as an (N, n) array in lexicographic order."""
        self.check_budget(budget)
        if self.n == 0:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.indices(self.sizes, dtype=np.int64)
        return grids.reshape(self.n, -1).T.copy()


def enumerate_points(domain: GridDomain, budget: int | None = None) -> Iterator[tuple]:
    """Yield every grid point once, lexicographically (last coordinate fastest).

    With ``budget`` set, refuse grids larger than it.
    """
    if budget is not None:
        domain.check_budget(budget)
    return itertools.product(*(range(s) for s in domain.sizes))


def hamming_weight(x: Sequence[int]) -> int:
    return sum(1 for v in x if v != 0)


def hamming_distance(x: Sequence[int], y: Sequence[int]) -> int:
    if len(x) != len(y):
        raise ValueError("points of different lengths")
    return sum(1 for a, b in zip(x, y) if a != b)


class FunctionOracle:
    """Query access to f: grid -> codomain, with an exact query counter.

    The backing is either a dense table of shape ``sizes + (r,)`` (r = number
    of cyclic factors of the codomain's additive group) or a callback.  A
    callback takes one point tuple, or, with ``vectorized=True``, an (N, n)
    array of points and returns the N values at once.
    """

    def __init__(
        self,
        domain: GridDomain,
        codomain,
        *,
        table: np.ndarray | None = None,
        callback: Callable | None = None,
        vectorized: bool = False,
        budget: int = DEFAULT_POINT_BUDGET,
    ):
        if (table is None) == (callback is None):
            raise ValueError("give exactly one of table or callback")
        self.domain = domain
        self.codomain = codomain
        self.group: AbelianGroup = as_group(codomain)
        self._callback = callback
        self._vectorized = vectorized
        self._lock = threading.Lock()
        self._count = 0
        if table is not None:
            domain.check_budget(budget)
            table = np.asarray(table, dtype=np.int64)
            if table.shape == domain.sizes:
                table = table[..., None]
            if table.shape != domain.sizes + (self.group.arity,):
                raise DomainMismatch(
                    f"table shape {table.shape} does not match grid {domain.sizes} "
                    f"with codomain {self.group}"
                )
            table = self.group.reduce_array(table)
            table.setflags(write=False)
        self._table = table

    # -- construction helpers --------------------------------------------------

    @classmethod
    def from_table(cls, domain: GridDomain, codomain, values) -> "FunctionOracle":
        return cls(domain, codomain, table=np.asarray(values))

    @classmethod
    def from_callback(cls, domain, codomain, fn, vectorized=False) -> "FunctionOracle":
        return cls(domain, codomain, callback=fn, vectorized=vectorized)

    # -- introspection -----------------------------------------------------

    @property
    def is_dense(self) -> bool:
        return self._table is not None

    @property
    def table(self) -> np.ndarray:
        """Read-only dense table (does not count as queries)."""
        if self._table is None:
            raise TypeError("oracle is callback-backed; call to_dense() first")
        return self._table

    @property
    def query_count(self) -> int:
        return self._count

    def reset_count(self) -> None:
        with self._lock:
            self._count = 0

    def _bump(self, k: int) -> None:
        with self._lock:
            self._count += k

    # -- evaluation --------------------------------------------------------

    def _native(self, row: np.ndarray):
        if self.group is not self.codomain and self.group.arity == 1:
            return int(row[0])
        return tuple(int(v) for v in row)

    def __call__(self, x: Sequence[int]):
        x = self.domain.check_point(x)
        return self._native(self.evaluate_many(np.asarray([x], dtype=np.int64))[0])

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at each row of ``points``; returns an (N, r) array."""
        points = np.asarray(points, dtype=np.int64)
        if points.ndim != 2 or points.shape[1] != self.domain.n:
            raise DomainMismatch(f"points of shape {points.shape} for grid {self.domain.sizes}")
        self._bump(len(points))
        if self._table is not None:
            return self._table[tuple(points.T)]
        if self._vectorized:
            out = np.asarray(self._callback(points), dtype=np.int64)
        else:
            out = np.asarray([self._as_row(self._callback(tuple(int(v) for v in p))) for p in points],
                             dtype=np.int64)
        return self.group.reduce_array(out.reshape(len(points), self.group.arity))

    def _as_row(self, value):
        if isinstance(value, (int, np.integer)):
            return (int(value),)
        return tuple(value)

    def to_dense(self, budget: int = DEFAULT_POINT_BUDGET) -> "FunctionOracle":
        """Query every point once and return a dense copy (counts s^n queries here)."""
        if self._table is not None:
            return self
        pts = self.domain.points_array(budget)
        vals = self.evaluate_many(pts)
        return FunctionOracle(
            self.domain, self.codomain, table=vals.reshape(self.domain.sizes + (self.group.arity,))
        )

    def map_points(self, domain: GridDomain, transform: Callable[[np.ndarray], np.ndarray]) -> "FunctionOracle":
        """Lazily precompose with a point map; queries are forwarded (and counted) here."""

        def fn(points):
            return self.evaluate_many(transform(points))

        return FunctionOracle(domain, self.codomain, callback=fn, vectorized=True)


def fraction_disagree(f: FunctionOracle, g: FunctionOracle) -> Fraction:
    """Exact fraction of grid points where two dense oracles differ."""
    if f.domain != g.domain:
        raise DomainMismatch(f"grids {f.domain.sizes} and {g.domain.sizes} differ")
    if f.group != g.group:
        raise DomainMismatch(f"codomains {f.group} and {g.group} differ")
    diff = np.any(f.table != g.table, axis=-1)
    return Fraction(int(diff.sum()), f.domain.cardinality)
