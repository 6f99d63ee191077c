"""Finite abelian groups given as products of cyclic groups.

Elements are plain tuples of residues.  Every table-valued computation in the
package stores group values in an integer array whose trailing axis has one
entry per cyclic factor, so vectorized arithmetic is just ``% orders``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterator, Sequence

import numpy as np

GroupElement = tuple


class GroupMismatch(ValueError):
    pass


@dataclass(frozen=True)
class AbelianGroup:
    """Z_{m1} x ... x Z_{mr}."""

    orders: tuple

    def __post_init__(self):
        orders = tuple(int(m) for m in self.orders)
        if not orders:
            raise ValueError("a group needs at least one cyclic factor")
        if any(m < 1 for m in orders):
            raise ValueError(f"cyclic orders must be positive, got {orders}")
        object.__setattr__(self, "orders", orders)

    @classmethod
    def cyclic(cls, m: int) -> "AbelianGroup":
        return cls((m,))

    @classmethod
    def parse(cls, text: str) -> "AbelianGroup":
        """Parse a descriptor such as ``Z5`` or ``Z2xZ3``."""
        parts = text.strip().split("x")
        orders = []
        for part in parts:
            m = re.fullmatch(r"Z(\d+)", part.strip())
            if m is None:
                raise ValueError(f"bad group descriptor {text!r}")
            orders.append(int(m.group(1)))
        return cls(tuple(orders))

    @property
    def descriptor(self) -> str:
        return "x".join(f"Z{m}" for m in self.orders)

    @property
    def arity(self) -> int:
        return len(self.orders)

    @property
    def order(self) -> int:
        return math.prod(self.orders)

    @property
    def exponent(self) -> int:
        return reduce(math.lcm, self.orders, 1)

    def __str__(self):
        return self.descriptor

    # -- elements -----------------------------------------------------------

    def element(self, value) -> GroupElement:
        """Canonicalize an int (cyclic groups only) or residue sequence."""
        if isinstance(value, (int, np.integer)):
            if self.arity != 1:
                raise GroupMismatch(f"scalar {value} given for {self}")
            value = (value,)
        value = tuple(int(v) for v in value)
        if len(value) != self.arity:
            raise GroupMismatch(f"{value} has wrong arity for {self}")
        return tuple(v % m for v, m in zip(value, self.orders))

    def check(self, a: GroupElement) -> None:
        if len(a) != self.arity or any(not 0 <= v < m for v, m in zip(a, self.orders)):
            raise GroupMismatch(f"{a} is not a canonical element of {self}")

    def zero(self) -> GroupElement:
        return (0,) * self.arity

    def is_zero(self, a: GroupElement) -> bool:
        return not any(a)

    def add(self, a: GroupElement, b: GroupElement) -> GroupElement:
        self.check(a)
        self.check(b)
        return tuple((x + y) % m for x, y, m in zip(a, b, self.orders))

    def sub(self, a: GroupElement, b: GroupElement) -> GroupElement:
        return self.add(a, self.neg(b))

    def neg(self, a: GroupElement) -> GroupElement:
        self.check(a)
        return tuple((-x) % m for x, m in zip(a, self.orders))

    def int_mul(self, g: GroupElement, m: int) -> GroupElement:
        """g added to itself m times (negated for m < 0)."""
        self.check(g)
        return tuple((x * (m % o)) % o for x, o in zip(g, self.orders))

    def elements(self) -> Iterator[GroupElement]:
        import itertools

        return itertools.product(*(range(m) for m in self.orders))

    def random_element(self, rng: np.random.Generator, nonzero: bool = False) -> GroupElement:
        while True:
            g = tuple(int(rng.integers(m)) for m in self.orders)
            if not (nonzero and self.is_zero(g)):
                return g

    # -- arrays ---------------------------------------------------------------

    @property
    def orders_array(self) -> np.ndarray:
        return np.asarray(self.orders, dtype=np.int64)

    def reduce_array(self, values: np.ndarray) -> np.ndarray:
        """Canonicalize an array whose trailing axis indexes cyclic factors."""
        return np.mod(values, self.orders_array)


def prime_power_components(group: AbelianGroup) -> list[tuple[int, int, int]]:
    """Split each cyclic factor into prime-power pieces.

    Returns ``(factor_index, q, e)`` triples: Z_m is the direct sum of the
    Z_{q^e} over the prime powers exactly dividing m.
    """
    out = []
    for idx, m in enumerate(group.orders):
        for q, e in factorize(m).items():
            out.append((idx, q, e))
    return out


def factorize(m: int) -> dict[int, int]:
    factors: dict[int, int] = {}
    q = 2
    while q * q <= m:
        while m % q == 0:
            factors[q] = factors.get(q, 0) + 1
            m //= q
        q += 1
    if m > 1:
        factors[m] = factors.get(m, 0) + 1
    return factors


def as_group(codomain) -> AbelianGroup:
    """The additive group underlying a codomain (group or prime field)."""
    if isinstance(codomain, AbelianGroup):
        return codomain
    additive = getattr(codomain, "additive_group", None)
    if additive is None:
        raise TypeError(f"{codomain!r} has no additive group")
    return additive


def orders_of(codomain) -> Sequence[int]:
    return as_group(codomain).orders
