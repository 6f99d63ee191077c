"""Junta-polynomials over Z_s^n with coefficients in a finite abelian group.

A junta-polynomial is a sum of terms g_a * prod_{i: a_i != 0} delta_{a_i}(x_i),
where delta_b(y) is 1 if y == b and 0 otherwise.  Patterns a are stored
sparsely as sorted ``((index, symbol), ...)`` tuples, so the all-zero pattern
(the constant term) is the empty tuple.
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .grid import DEFAULT_POINT_BUDGET, DomainTooLarge, FunctionOracle, GridDomain
from .groups import AbelianGroup, GroupElement, as_group, prime_power_components
from .linalg import rank_mod_p, solvable_mod_prime_power

Pattern = tuple


def sparse_pattern(a) -> Pattern:
    """Normalize a dense pattern (tuple of symbols) or (index, symbol) pairs."""
    a = tuple(a)
    if a and isinstance(a[0], tuple):
        return tuple(sorted((int(i), int(b)) for i, b in a if b))
    return tuple((i, int(b)) for i, b in enumerate(a) if b)


def dense_pattern(a: Pattern, n: int) -> tuple:
    out = [0] * n
    for i, b in a:
        out[i] = b
    return tuple(out)


class JuntaPolynomial:
    def __init__(self, group: AbelianGroup, s: int, n: int, coeffs: Mapping | None = None):
        if s < 1 or n < 0:
            raise ValueError(f"bad alphabet/arity s={s}, n={n}")
        self.group = group
        self.s = s
        self.n = n
        self.coeffs: dict[Pattern, GroupElement] = {}
        for a, g in (coeffs or {}).items():
            a = sparse_pattern(a)
            if any(not (0 <= i < n and 1 <= b < s) for i, b in a):
                raise ValueError(f"pattern {a} out of range for s={s}, n={n}")
            g = group.element(g)
            total = group.add(self.coeffs.get(a, group.zero()), g)
            if group.is_zero(total):
                self.coeffs.pop(a, None)
            else:
                self.coeffs[a] = total

    @property
    def degree(self) -> int:
        return max((len(a) for a in self.coeffs), default=0)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, JuntaPolynomial):
            return NotImplemented
        return (self.group, self.s, self.n, self.coeffs) == (other.group, other.s, other.n, other.coeffs)

    def __repr__(self):
        return f"JuntaPolynomial({self.group}, s={self.s}, n={self.n}, terms={len(self.coeffs)})"

    def __call__(self, x) -> GroupElement:
        return evaluate(self, x)

    def coefficient_tensor(self) -> np.ndarray:
        shape = (self.s,) * self.n + (self.group.arity,)
        if math.prod(shape) > DEFAULT_POINT_BUDGET:
            raise DomainTooLarge(f"coefficient tensor of shape {shape} exceeds budget")
        out = np.zeros(shape, dtype=np.int64)
        for a, g in self.coeffs.items():
            out[dense_pattern(a, self.n)] = g
        return out

    def to_table(self) -> np.ndarray:
        return evaluate_tensor(self.coefficient_tensor(), self.group)

    def to_oracle(self) -> FunctionOracle:
        return FunctionOracle(GridDomain.symmetric(self.s, self.n), self.group, table=self.to_table())

    def dump(self) -> str:
        """One ``a -> value`` line per nonzero term, patterns written densely."""
        lines = []
        for a in sorted(self.coeffs, key=lambda a: dense_pattern(a, self.n)):
            pat = " ".join(str(v) for v in dense_pattern(a, self.n))
            val = ",".join(str(v) for v in self.coeffs[a])
            lines.append(f"{pat} -> {val}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def parse(cls, text: str, group: AbelianGroup, s: int, n: int) -> "JuntaPolynomial":
        coeffs: dict = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                lhs, rhs = line.split("->")
                pat = tuple(int(v) for v in lhs.split())
                val = tuple(int(v) for v in rhs.split(","))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: cannot parse {line!r}") from exc
            if len(pat) != n:
                raise ValueError(f"line {lineno}: pattern has {len(pat)} symbols, expected {n}")
            coeffs[pat] = val
        return cls(group, s, n, coeffs)


def evaluate(P: JuntaPolynomial, x) -> GroupElement:
    x = tuple(int(v) for v in x)
    if len(x) != P.n:
        raise ValueError(f"point of arity {len(x)} for a polynomial in {P.n} variables")
    total = P.group.zero()
    for a, g in P.coeffs.items():
        if all(x[i] == b for i, b in a):
            total = P.group.add(total, g)
    return total


# -- dense transforms ------------------------------------------------------
#
# In one variable f(0) = g_0 and f(b) = g_0 + g_b, so peeling a variable maps
# the slice at b != 0 to f(..., b, ...) - f(..., 0, ...).  Doing it for every
# variable, last first, is the n-step induction on the number of variables.


def interpolate_tensor(table: np.ndarray, group: AbelianGroup) -> np.ndarray:
    """Coefficient tensor g_a of the table's junta-polynomial (same shape)."""
    coeffs = np.array(table, dtype=np.int64)
    nvars = coeffs.ndim - 1
    for axis in reversed(range(nvars)):
        base = np.take(coeffs, [0], axis=axis)
        coeffs = coeffs - base
        idx = [slice(None)] * coeffs.ndim
        idx[axis] = 0
        coeffs[tuple(idx)] = base.squeeze(axis)
    return group.reduce_array(coeffs)


def evaluate_tensor(coeffs: np.ndarray, group: AbelianGroup) -> np.ndarray:
    table = np.array(coeffs, dtype=np.int64)
    nvars = table.ndim - 1
    for axis in range(nvars):
        base = np.take(table, [0], axis=axis)
        table = table + base
        idx = [slice(None)] * table.ndim
        idx[axis] = 0
        table[tuple(idx)] = base.squeeze(axis)
    return group.reduce_array(table)


@lru_cache(maxsize=64)
def _pattern_weights(shape: tuple) -> np.ndarray:
    if not shape:
        return np.zeros((), dtype=np.int64)
    grids = np.indices(shape, dtype=np.int64)
    return (grids != 0).sum(axis=0)


def junta_degree_of_table(table: np.ndarray, group: AbelianGroup) -> int:
    """Junta-degree of a dense table of shape ``sizes + (r,)``.

    Works for any grid (the peeling step never needs equal sizes).
    """
    coeffs = interpolate_tensor(table, group)
    nonzero = np.any(coeffs != 0, axis=-1)
    if not nonzero.any():
        return 0
    return int(_pattern_weights(nonzero.shape)[nonzero].max())


def _symmetric_dense(f: FunctionOracle) -> tuple[int, int]:
    if not f.domain.is_symmetric:
        raise ValueError(f"grid {f.domain.sizes} is not symmetric; lift it first")
    return f.domain.alphabet, f.domain.n


def interpolate(f: FunctionOracle) -> JuntaPolynomial:
    """The unique junta-polynomial agreeing with a dense oracle on Z_s^n."""
    s, n = _symmetric_dense(f)
    coeffs = interpolate_tensor(f.table, f.group)
    nz = np.argwhere(np.any(coeffs != 0, axis=-1))
    terms = {tuple(int(v) for v in idx): tuple(int(v) for v in coeffs[tuple(idx)]) for idx in nz}
    return JuntaPolynomial(f.group, s, n, terms)


def junta_degree(f: FunctionOracle) -> int:
    return junta_degree_of_table(f.table, f.group)


def count_nonroots(P: JuntaPolynomial, budget: int = DEFAULT_POINT_BUDGET) -> int:
    if P.s**P.n > budget:
        raise DomainTooLarge(f"{P.s}^{P.n} points exceed budget {budget}")
    if P.is_zero:
        return 0
    return int(np.any(P.to_table() != 0, axis=-1).sum())


def patterns_up_to(s: int, n: int, d: int) -> Iterable[Pattern]:
    """All sparse patterns over Z_s^n with at most d nonzero symbols."""
    for size in range(min(d, n) + 1):
        for support in itertools.combinations(range(n), size):
            for symbols in itertools.product(range(1, s), repeat=size):
                yield tuple(zip(support, symbols))


def random_junta_polynomial(
    group: AbelianGroup, s: int, n: int, d: int, rng: np.random.Generator, density: float = 1.0
) -> JuntaPolynomial:
    """Random coefficients on each pattern of weight <= d (each kept with prob. density)."""
    coeffs = {}
    for a in patterns_up_to(s, n, d):
        if density >= 1.0 or rng.random() < density:
            coeffs[a] = group.random_element(rng)
    return JuntaPolynomial(group, s, n, coeffs)


def random_member_table(group: AbelianGroup, s: int, n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Dense table of a uniformly random junta-degree-d function on Z_s^n."""
    shape = (s,) * n
    weights = _pattern_weights(shape)
    coeffs = np.stack([rng.integers(0, m, size=shape) for m in group.orders], axis=-1)
    coeffs[weights > d] = 0
    return evaluate_tensor(coeffs, group)


# -- difference basis ------------------------------------------------------


def _partner(i: int, mode: str, n: int, L: int) -> int:
    return n - 1 if mode == "star" else L + i


def _check_basis_args(n: int, mode: str, L: int) -> None:
    if mode == "star":
        if not 0 <= L <= n - 1:
            raise ValueError(f"star basis needs 0 <= L <= n-1, got L={L}, n={n}")
    elif mode == "matching":
        if L < 0 or 2 * L > n:
            raise ValueError(f"matching basis needs 2L <= n, got L={L}, n={n}")
    else:
        raise ValueError(f"mode must be 'star' or 'matching', got {mode!r}")


def _merge_onto_partners(dense: list, moved: dict) -> tuple | None:
    """Multiply delta factors landing on partner variables; None if they clash."""
    for v, symbols in moved.items():
        required = set(symbols)
        if dense[v]:
            required.add(dense[v])
        if len(required) > 1:
            return None
        dense[v] = required.pop()
    return tuple(dense)


def to_difference_basis(P: JuntaPolynomial, mode: str, L: int) -> dict:
    """Coefficients h_a in the basis that replaces delta_{a_i}(x_i), i < L, by
    delta_{a_i}(x_i) - delta_{a_i}(x_partner).

    The partner of i is the last variable (``star``) or variable L+i
    (``matching``).  Keys are dense patterns.
    """
    _check_basis_args(P.n, mode, L)
    group = P.group
    out: dict[tuple, GroupElement] = {}
    for a, g in P.coeffs.items():
        dense = list(dense_pattern(a, P.n))
        rewritten = [i for i in range(L) if dense[i]]
        for r in range(len(rewritten) + 1):
            for kept in itertools.combinations(rewritten, r):
                new = list(dense)
                moved: dict[int, list] = {}
                for i in rewritten:
                    if i not in kept:
                        moved.setdefault(_partner(i, mode, P.n, L), []).append(new[i])
                        new[i] = 0
                key = _merge_onto_partners(new, moved)
                if key is not None:
                    out[key] = group.add(out.get(key, group.zero()), g)
    return {k: v for k, v in out.items() if not group.is_zero(v)}


def from_difference_basis(
    coeffs: Mapping, group: AbelianGroup, s: int, n: int, mode: str, L: int
) -> JuntaPolynomial:
    """Expand difference-basis coefficients back into a junta-polynomial."""
    _check_basis_args(n, mode, L)
    terms: dict[tuple, GroupElement] = {}
    for a, h in coeffs.items():
        dense = list(a)
        rewritten = [i for i in range(L) if dense[i]]
        for r in range(len(rewritten) + 1):
            for swapped in itertools.combinations(rewritten, r):
                new = list(dense)
                moved: dict[int, list] = {}
                for i in swapped:
                    moved.setdefault(_partner(i, mode, n, L), []).append(new[i])
                    new[i] = 0
                key = _merge_onto_partners(new, moved)
                if key is not None:
                    term = group.int_mul(group.element(h), (-1) ** r)
                    terms[key] = group.add(terms.get(key, group.zero()), term)
    return JuntaPolynomial(group, s, n, terms)


# -- definition-based oracle -------------------------------------------------


def _cylinder_matrix(sizes: tuple, d: int) -> np.ndarray:
    """Columns are indicators of [x^D = b] over all |D| = d and b in the sub-grid."""
    points = GridDomain(sizes).points_array()
    cols = []
    for D in itertools.combinations(range(len(sizes)), d):
        sub = points[:, list(D)]
        for b in itertools.product(*(range(sizes[i]) for i in D)):
            cols.append(np.all(sub == np.asarray(b, dtype=np.int64), axis=1))
    return np.array(cols, dtype=np.int64).T


def is_sum_of_juntas(table: np.ndarray, group: AbelianGroup, d: int) -> bool:
    """Is the table a sum of functions each depending on at most d coordinates?

    Membership in the subgroup generated by g*[x^D = b], checked separately on
    each prime-power component of the group (exact, via chain-ring elimination).
    """
    sizes = table.shape[:-1]
    if d >= len(sizes):
        return True
    M = _cylinder_matrix(sizes, d)
    flat = table.reshape(-1, group.arity)
    for idx, q, e in prime_power_components(group):
        target = flat[:, idx] % q**e
        if not target.any():
            continue
        if e == 1:
            if rank_mod_p(np.hstack([M, target[:, None]]), q) != rank_mod_p(M, q):
                return False
        elif not solvable_mod_prime_power(M, target, q, e):
            return False
    return True


def junta_degree_by_definition(f: FunctionOracle | np.ndarray, group: AbelianGroup | None = None) -> int:
    """Smallest d with f a sum of d-juntas, by brute-force span membership."""
    if isinstance(f, FunctionOracle):
        table, group = f.table, f.group
    else:
        table = np.asarray(f)
    group = as_group(group)
    n = table.ndim - 1
    for d in range(n + 1):
        if is_sum_of_juntas(table, group, d):
            return d
    return n


def pattern_matrix(points: np.ndarray, patterns: list) -> np.ndarray:
    """0/1 matrix with entry [x matches a] for x in the rows of points, a in patterns."""
    points = np.asarray(points, dtype=np.int64)
    out = np.ones((len(points), len(patterns)), dtype=np.int64)
    for j, a in enumerate(patterns):
        for i, b in a:
            out[:, j] &= points[:, i] == b
    return out
