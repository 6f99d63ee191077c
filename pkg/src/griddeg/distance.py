"""Exact distances to the junta-degree-d and degree-d families on tiny grids.

Junta family: a member of junta-degree <= d splits along one coordinate as
P(x', b) = P0(x') + [b != 0] Q_b(x') with P0 of junta-degree <= d and each
Q_b of junta-degree <= d-1, all independent.  So the distance is the minimum
over P0 of dist(f_0, P0) + sum_b dist_{d-1}(f_b - P0), and only P0 needs to
be enumerated; at d-1 = 0 the inner problem is a (weighted) majority vote.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .field_poly import EvalSet, PrimeField
from .grid import FunctionOracle, GridDomain
from .groups import AbelianGroup, as_group
from .junta_poly import evaluate_tensor

DEFAULT_FAMILY_CAP = 10**8
CHUNK_ENTRIES = 2 * 10**6  # members x points handled per vectorized step


class FamilyTooLarge(ValueError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"family enumeration needs {count} members, cap is {cap}")
        self.count = count


@dataclass(frozen=True)
class FamilySpec:
    """``kind`` is ``junta-degree`` (any group codomain) or ``degree`` (prime
    field codomain, with one evaluation set per coordinate)."""

    kind: str
    d: int
    domain: GridDomain
    codomain: object
    eval_sets: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("junta-degree", "degree"):
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.d < 0:
            raise ValueError("d must be non-negative")
        if self.kind == "degree":
            if not isinstance(self.codomain, PrimeField):
                raise ValueError("the degree family needs a prime-field codomain")
            sets = self.eval_sets
            if sets is None:
                sets = tuple(EvalSet.standard(self.codomain, s) for s in self.domain.sizes)
            elif isinstance(sets, EvalSet):
                sets = (sets,) * self.domain.n
            sets = tuple(sets)
            if [S.s for S in sets] != list(self.domain.sizes):
                raise ValueError("evaluation sets do not match the grid sizes")
            object.__setattr__(self, "eval_sets", sets)

    @property
    def group(self) -> AbelianGroup:
        return as_group(self.codomain)

    def member_count(self) -> int:
        if self.kind == "degree":
            return self.codomain.p ** len(degree_monomials(self.domain.sizes, self.d))
        return self.group.order ** junta_pattern_count(self.domain.sizes, self.d)


def junta_pattern_count(sizes: Sequence[int], d: int) -> int:
    return sum(
        math.prod(sizes[i] - 1 for i in D)
        for k in range(min(d, len(sizes)) + 1)
        for D in itertools.combinations(range(len(sizes)), k)
    )


def degree_monomials(sizes: Sequence[int], d: int) -> list[tuple]:
    """Exponent vectors with e_i <= s_i - 1 and total degree <= d, graded."""
    ranges = [range(s) for s in sizes]
    exps = [e for e in itertools.product(*ranges) if sum(e) <= d]
    return sorted(exps, key=lambda e: (sum(e), [-v for v in e]))


# -- member enumeration -------------------------------------------------------


def _junta_basis(sizes: tuple) -> np.ndarray:
    """(N, #patterns) 0/1 matrix of the monomials prod delta_{a_i}(x_i), #a <= d."""
    n = len(sizes)
    pts = np.indices(sizes).reshape(n, -1).T if n else np.zeros((1, 0), dtype=np.int64)
    return pts


def _junta_columns(sizes: tuple, d: int) -> np.ndarray:
    pts = _junta_basis(sizes)
    cols = []
    for k in range(min(d, len(sizes)) + 1):
        for D in itertools.combinations(range(len(sizes)), k):
            for a in itertools.product(*(range(1, sizes[i]) for i in D)):
                col = np.ones(len(pts), dtype=np.int64)
                for i, b in zip(D, a):
                    col &= pts[:, i] == b
                cols.append(col)
    return np.array(cols, dtype=np.int64).T.reshape(len(pts), -1)


def _digits(indices: np.ndarray, base: int, width: int) -> np.ndarray:
    """Base-``base`` digits of each index, most significant first."""
    out = np.empty((len(indices), width), dtype=np.int64)
    rest = indices.copy()
    for j in range(width - 1, -1, -1):
        out[:, j] = rest % base
        rest //= base
    return out


def _member_chunks(columns: np.ndarray, elements: np.ndarray, orders: np.ndarray, chunk: int):
    """Yield (start index, tables of shape (C, N, r)) over all coefficient choices."""
    n_pat = columns.shape[1]
    base = len(elements)
    total = base**n_pat
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        coeffs = elements[_digits(idx, base, n_pat)]  # (C, pat, r)
        yield start, np.einsum("np,cpr->cnr", columns, coeffs) % orders


def _encode(values: np.ndarray, orders: np.ndarray) -> np.ndarray:
    """Mixed-radix integer code of group elements along the last axis."""
    code = np.zeros(values.shape[:-1], dtype=np.int64)
    for j, m in enumerate(orders):
        code = code * m + values[..., j]
    return code


def _decode(code: int, orders: np.ndarray) -> np.ndarray:
    out = []
    for m in orders[::-1]:
        out.append(code % m)
        code //= m
    return np.array(out[::-1], dtype=np.int64)


def _majority(codes: np.ndarray, weights: np.ndarray, n_codes: int) -> tuple[np.ndarray, np.ndarray]:
    """Per row: weighted count of the most common code, and the smallest such code."""
    rows = codes.shape[0]
    flat = (np.arange(rows)[:, None] * n_codes + codes).ravel()
    counts = np.bincount(flat, weights=np.broadcast_to(weights, codes.shape).ravel(), minlength=rows * n_codes)
    counts = counts.reshape(rows, n_codes)
    return counts.max(axis=1), counts.argmax(axis=1)


# -- junta family ----------------------------------------------------------


def _junta_distance(table: np.ndarray, W: np.ndarray, group: AbelianGroup, d: int, cap: int):
    """Weighted distance (an integer) from the table to junta-degree <= d, and a witness."""
    sizes = table.shape[:-1]
    n = len(sizes)
    orders = group.orders_array
    if d >= n:
        return 0, table.copy()
    if d == 0:
        codes = _encode(table, orders).reshape(1, -1)
        best, arg = _majority(codes, W.reshape(1, -1), group.order)
        cost = int(W.sum()) - int(round(best[0]))
        return cost, np.broadcast_to(_decode(int(arg[0]), orders), table.shape).copy()

    # slice along the largest coordinate so the enumerated part is smallest
    axis = max(range(n), key=lambda i: (sizes[i], i))
    t = np.moveaxis(table, axis, n - 1)
    w = np.moveaxis(W, axis, n - 1)
    sub = t.shape[:-2]
    N = math.prod(sub)
    slices = t.reshape(N, sizes[axis], group.arity)
    wslices = w.reshape(N, sizes[axis]).astype(np.float64)

    columns = _junta_columns(sub, d)
    count = group.order ** columns.shape[1]
    if count > cap:
        raise FamilyTooLarge(count, cap)
    elements = np.array(list(group.elements()), dtype=np.int64)
    chunk = max(1, CHUNK_ENTRIES // max(1, N * sizes[axis]))

    best_cost, best_index = None, None
    for start, P0 in _member_chunks(columns, elements, orders, chunk):
        cost = (np.any(P0 != slices[None, :, 0, :], axis=-1) * wslices[:, 0]).sum(axis=1)
        for b in range(1, sizes[axis]):
            resid = (slices[None, :, b, :] - P0) % orders
            if d == 1:
                top, _ = _majority(_encode(resid, orders), wslices[:, b][None, :], group.order)
                cost = cost + (wslices[:, b].sum() - top)
            else:
                inner = [
                    _junta_distance(r.reshape(sub + (group.arity,)), wslices[:, b].reshape(sub), group, d - 1, cap)[0]
                    for r in resid
                ]
                cost = cost + np.asarray(inner, dtype=np.float64)
        i = int(np.argmin(cost))
        c = int(round(cost[i]))
        if best_cost is None or c < best_cost:
            best_cost, best_index = c, start + i

    # rebuild the witness from the best P0
    coeffs = elements[_digits(np.array([best_index]), len(elements), columns.shape[1])][0]
    P0 = (columns @ coeffs) % orders
    witness = np.empty_like(slices)
    witness[:, 0, :] = P0
    for b in range(1, sizes[axis]):
        resid = (slices[:, b, :] - P0) % orders
        _, Q = _junta_distance(resid.reshape(sub + (group.arity,)), wslices[:, b].reshape(sub).astype(np.int64),
                               group, d - 1, cap)
        witness[:, b, :] = (P0 + Q.reshape(N, group.arity)) % orders
    witness = np.moveaxis(witness.reshape(sub + (sizes[axis], group.arity)), n - 1, axis)
    return best_cost, witness


def merge_twins(table: np.ndarray, axes=None):
    """Merge coordinate values whose slices of the table coincide.

    Returns (merged table, integer weights, class maps).  An optimal member can
    always be taken constant on such twins (copying one twin slice onto the
    other keeps junta-degree, and the better copy does no worse), so the
    weighted distance on the merged grid equals the distance on the original.
    """
    n = table.ndim - 1
    axes = range(n) if axes is None else axes
    W = np.ones(table.shape[:-1], dtype=np.int64)
    maps = [np.arange(s) for s in table.shape[:-1]]
    for ax in axes:
        moved = np.moveaxis(table, ax, 0)
        flat = moved.reshape(moved.shape[0], -1)
        _, first, inverse = np.unique(flat, axis=0, return_index=True, return_inverse=True)
        inverse = inverse.reshape(-1)
        order = np.argsort(first)  # classes in order of first appearance
        rank = np.empty_like(order)
        rank[order] = np.arange(len(order))
        keep = first[order]
        multiplicity = np.bincount(rank[inverse], minlength=len(keep))
        table = np.take(table, keep, axis=ax)
        W = np.take(W, keep, axis=ax) * multiplicity.reshape([-1 if i == ax else 1 for i in range(n)])
        maps[ax] = rank[inverse]
    return table, W, maps


def _degree_distance(table: np.ndarray, family: FamilySpec, cap: int):
    p = family.codomain.p
    sizes = family.domain.sizes
    exps = degree_monomials(sizes, family.d)
    count = p ** len(exps)
    if count > cap:
        raise FamilyTooLarge(count, cap)
    pts = family.domain.points_array()
    vals = np.stack([S.values(pts[:, i]) for i, S in enumerate(family.eval_sets)], axis=1) if len(sizes) else pts
    cols = np.ones((len(pts), len(exps)), dtype=np.int64)
    for j, e in enumerate(exps):
        for i, ei in enumerate(e):
            if ei:
                cols[:, j] = cols[:, j] * pow_array(vals[:, i], ei, p) % p
    target = table.reshape(-1)
    elements = np.arange(p, dtype=np.int64)
    chunk = max(1, CHUNK_ENTRIES // len(pts))
    best_cost, best_table = None, None
    for _, members in _member_chunks(cols, elements[:, None], np.array([p]), chunk):
        cost = (members[..., 0] != target[None, :]).sum(axis=1)
        i = int(np.argmin(cost))
        if best_cost is None or int(cost[i]) < best_cost:
            best_cost, best_table = int(cost[i]), members[i]
    return best_cost, best_table.reshape(table.shape)


def pow_array(x: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.ones_like(x)
    for _ in range(e):
        out = out * x % p
    return out


def exact_distance(
    f: FunctionOracle, family: FamilySpec, cap: int = DEFAULT_FAMILY_CAP, reduce_twins=False
) -> tuple[Fraction, FunctionOracle]:
    """Exact normalized distance from f to the family, with a nearest member.

    ``reduce_twins`` (junta family only) merges identical coordinate slices
    first: True for every axis, or an iterable of axes.
    """
    if f.domain != family.domain:
        raise ValueError(f"function grid {f.domain.sizes} differs from family grid {family.domain.sizes}")
    table = f.table
    N = f.domain.cardinality
    if family.kind == "degree":
        cost, witness = _degree_distance(table, family, cap)
    else:
        group = family.group
        if reduce_twins:
            merged, W, maps = merge_twins(table, None if reduce_twins is True else reduce_twins)
            cost, w = _junta_distance(merged, W, group, family.d, cap)
            witness = w[np.ix_(*maps)] if maps else w
        else:
            cost, witness = _junta_distance(table, np.ones(table.shape[:-1], dtype=np.int64), group, family.d, cap)
    return Fraction(cost, N), FunctionOracle(f.domain, f.codomain, table=witness)


# -- random inputs -----------------------------------------------------------


def random_member(family: FamilySpec, rng: np.random.Generator) -> FunctionOracle:
    sizes = family.domain.sizes
    if family.kind == "degree":
        p = family.codomain.p
        pts = family.domain.points_array()
        vals = np.stack([S.values(pts[:, i]) for i, S in enumerate(family.eval_sets)], axis=1)
        table = np.zeros(len(pts), dtype=np.int64)
        for e in degree_monomials(sizes, family.d):
            term = np.full(len(pts), int(rng.integers(p)), dtype=np.int64)
            for i, ei in enumerate(e):
                term = term * pow_array(vals[:, i], ei, p) % p
            table = (table + term) % p
        return FunctionOracle(family.domain, family.codomain, table=table.reshape(sizes))
    group = family.group
    weights = (np.indices(sizes) != 0).sum(axis=0)
    coeffs = np.stack([rng.integers(0, m, size=sizes) for m in group.orders], axis=-1)
    coeffs[weights > family.d] = 0
    return FunctionOracle(family.domain, family.codomain, table=evaluate_tensor(coeffs, group))


@dataclass(frozen=True)
class CorruptedFunction:
    oracle: FunctionOracle
    corrupted: int
    upper_bound: Fraction  # corrupted / |grid|
    measured: Fraction | None


def random_function_at_distance(
    family: FamilySpec, delta, rng: np.random.Generator, measure: bool = True, cap: int = DEFAULT_FAMILY_CAP
) -> CorruptedFunction:
    """A random member with ceil(delta * |grid|) random points changed to other values."""
    N = family.domain.cardinality
    k = math.ceil(Fraction(delta) * N)
    if not 0 <= k <= N:
        raise ValueError(f"distance {delta} outside [0, 1]")
    member = random_member(family, rng)
    group = family.group
    table = member.table.reshape(N, group.arity).copy()
    if k and group.order < 2:
        raise ValueError("cannot corrupt values in the trivial group")
    for idx in rng.choice(N, size=k, replace=False):
        old = tuple(table[idx])
        while True:
            new = group.random_element(rng)
            if new != old:
                break
        table[idx] = new
    oracle = FunctionOracle(family.domain, family.codomain, table=table.reshape(family.domain.sizes + (group.arity,)))
    measured = exact_distance(oracle, family, cap)[0] if measure else None
    return CorruptedFunction(oracle, k, Fraction(k, N), measured)
