"""Polynomials over prime fields, evaluated on grids S^n with S a set of field points."""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from .grid import DEFAULT_POINT_BUDGET, DomainTooLarge
from .groups import AbelianGroup
from .linalg import (
    inverse_mod_p,
    solve_mod_p,
    tall_in_column_span_mod_p,
)

LINALG_BUDGET = 2 * 10**6  # matrix entries allowed in a single elimination


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, math.isqrt(p) + 1))


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not is_prime(int(self.p)):
            raise ValueError(f"{self.p} is not prime")
        object.__setattr__(self, "p", int(self.p))

    @classmethod
    def parse(cls, text: str) -> "PrimeField":
        m = re.fullmatch(r"\s*F(\d+)\s*", text)
        if m is None:
            raise ValueError(f"bad field descriptor {text!r}")
        return cls(int(m.group(1)))

    @property
    def descriptor(self) -> str:
        return f"F{self.p}"

    def __str__(self):
        return self.descriptor

    @property
    def additive_group(self) -> AbelianGroup:
        return AbelianGroup.cyclic(self.p)

    def element(self, v: int) -> int:
        return int(v) % self.p

    def inv(self, v: int) -> int:
        v = int(v) % self.p
        if v == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(v, -1, self.p)


@dataclass(frozen=True)
class EvalSet:
    """An ordered set S = (sigma_0, ..., sigma_{s-1}) of distinct field points.

    Grid coordinate i stands for the field element sigma_i.
    """

    field: PrimeField
    points: tuple

    def __post_init__(self):
        pts = tuple(int(v) % self.field.p for v in self.points)
        if len(pts) < 2:
            raise ValueError("an evaluation set needs at least 2 points")
        if len(set(pts)) != len(pts):
            raise ValueError(f"evaluation points {pts} are not distinct")
        object.__setattr__(self, "points", pts)

    @classmethod
    def standard(cls, field: PrimeField, s: int) -> "EvalSet":
        """The set {0, 1, ..., s-1}."""
        return cls(field, tuple(range(s)))

    @property
    def s(self) -> int:
        return len(self.points)

    @property
    def p(self) -> int:
        return self.field.p

    def values(self, indices) -> np.ndarray:
        """Map grid coordinates to field elements."""
        return np.asarray(self.points, dtype=np.int64)[np.asarray(indices, dtype=np.int64)]


# -- polynomials -------------------------------------------------------------


class ReducedPolynomial:
    """A sparse polynomial over F_p: exponent tuple -> nonzero coefficient.

    When built by :func:`reduce` or :func:`interpolate_polynomial` it carries
    the evaluation set it is reduced against (individual degrees <= s-1).
    """

    def __init__(self, field: PrimeField, n: int, terms: Mapping | None = None, eval_set: EvalSet | None = None):
        self.field = field
        self.n = n
        self.eval_set = eval_set
        self.terms: dict[tuple, int] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(v) for v in e)
            if len(e) != n or any(v < 0 for v in e):
                raise ValueError(f"bad exponent {e} for {n} variables")
            c = (self.terms.get(e, 0) + int(c)) % field.p
            if c:
                self.terms[e] = c
            else:
                self.terms.pop(e, None)
        if eval_set is not None and any(v >= eval_set.s for e in self.terms for v in e):
            raise ValueError("polynomial is not reduced with respect to its evaluation set")

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    @property
    def individual_degree(self) -> int:
        return max((max(e, default=0) for e in self.terms), default=0)

    def __eq__(self, other):
        if not isinstance(other, ReducedPolynomial):
            return NotImplemented
        return (self.field, self.n, self.terms) == (other.field, other.n, other.terms)

    def __repr__(self):
        return f"ReducedPolynomial({self.field}, n={self.n}, {self.to_text()!r})"

    def __call__(self, x: Sequence[int]) -> int:
        """Evaluate at a point given by field values."""
        p = self.field.p
        total = 0
        for e, c in self.terms.items():
            term = c
            for xi, ei in zip(x, e):
                term = term * pow(int(xi), ei, p) % p
            total += term
        return total % p

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        """Evaluate at the rows of X (field values); returns an int array."""
        X = np.asarray(X, dtype=np.int64) % self.field.p
        p = self.field.p
        out = np.zeros(len(X), dtype=np.int64)
        for e, c in self.terms.items():
            term = np.full(len(X), c, dtype=np.int64)
            for i, ei in enumerate(e):
                if ei:
                    term = term * _power_mod(X[:, i], ei, p) % p
            out = (out + term) % p
        return out

    def table(self, S: EvalSet) -> np.ndarray:
        """Dense table over S^n indexed by grid coordinates, shape (s,)*n."""
        if S.s**self.n > DEFAULT_POINT_BUDGET:
            raise DomainTooLarge(f"{S.s}^{self.n} points exceed budget")
        grids = np.indices((S.s,) * self.n, dtype=np.int64).reshape(self.n, -1).T
        return self.evaluate_many(S.values(grids)).reshape((S.s,) * self.n)

    def to_text(self) -> str:
        """Terms ``c * x1^e1 ... xn^en`` joined by `` + ``, highest degree first."""
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda e: (-sum(e), tuple(-v for v in e))):
            factors = [f"x{i + 1}" + (f"^{v}" if v > 1 else "") for i, v in enumerate(e) if v]
            c = self.terms[e]
            parts.append(" ".join([f"{c} *", *factors]) if factors else str(c))
        return " + ".join(parts)

    @classmethod
    def parse(cls, text: str, field: PrimeField, n: int) -> "ReducedPolynomial":
        terms: dict[tuple, int] = {}
        text = text.strip()
        if text == "0":
            return cls(field, n)
        for raw in text.split("+"):
            tokens = raw.replace("*", " ").split()
            if not tokens:
                raise ValueError(f"empty term in {text!r}")
            coeff = int(tokens[0])
            e = [0] * n
            for tok in tokens[1:]:
                m = re.fullmatch(r"x(\d+)(?:\^(\d+))?", tok)
                if m is None or not 1 <= int(m.group(1)) <= n:
                    raise ValueError(f"bad factor {tok!r}")
                e[int(m.group(1)) - 1] += int(m.group(2) or 1)
            e = tuple(e)
            terms[e] = terms.get(e, 0) + coeff
        return cls(field, n, terms)


def _power_mod(x: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.ones_like(x)
    base = x % p
    while e:
        if e & 1:
            out = out * base % p
        base = base * base % p
        e >>= 1
    return out


def _univariate_remainders(S: EvalSet, max_exp: int) -> list[np.ndarray]:
    """Coefficient vectors (length s) of x^e mod prod_{sigma in S}(x - sigma)."""
    p, s = S.p, S.s
    vanishing = np.array([1], dtype=np.int64)  # coefficients low -> high
    for sigma in S.points:
        vanishing = (np.concatenate([[0], vanishing]) - sigma * np.concatenate([vanishing, [0]])) % p
    out = []
    cur = np.zeros(s, dtype=np.int64)
    cur[0] = 1
    for e in range(max_exp + 1):
        out.append(cur.copy())
        # multiply by x, then eliminate x^s with the monic vanishing polynomial
        top = cur[-1]
        cur = np.concatenate([[0], cur[:-1]])
        cur = (cur - top * vanishing[:-1]) % p
    return out


def reduce(P: ReducedPolynomial, S: EvalSet) -> ReducedPolynomial:
    """The polynomial with individual degrees <= s-1 agreeing with P on S^n."""
    if S.field != P.field:
        raise ValueError("evaluation set lives in a different field")
    max_exp = max((max(e, default=0) for e in P.terms), default=0)
    rem = _univariate_remainders(S, max_exp)
    out: dict[tuple, int] = {}
    for e, c in P.terms.items():
        factors = [[(j, int(v)) for j, v in enumerate(rem[ei]) if v] for ei in e]
        for combo in itertools.product(*factors):
            exp = tuple(j for j, _ in combo)
            coeff = c
            for _, v in combo:
                coeff = coeff * v % S.p
            out[exp] = (out.get(exp, 0) + coeff) % S.p
    return ReducedPolynomial(S.field, P.n, out, eval_set=S)


def _vandermonde(S: EvalSet) -> np.ndarray:
    return np.array([[pow(x, e, S.p) for e in range(S.s)] for x in S.points], dtype=np.int64)


def interpolation_coefficients(table: np.ndarray, S: EvalSet) -> np.ndarray:
    """Coefficient tensor c[e1,...,en] of the reduced interpolant of a table on S^n."""
    table = np.asarray(table, dtype=np.int64) % S.p
    if any(d != S.s for d in table.shape):
        raise ValueError(f"table shape {table.shape} is not ({S.s},)*n")
    vinv = inverse_mod_p(_vandermonde(S), S.p)
    coeffs = table
    for axis in range(table.ndim):
        coeffs = np.moveaxis(np.tensordot(vinv, coeffs, axes=([1], [axis])) % S.p, 0, axis)
    return coeffs


def interpolate_polynomial(table: np.ndarray, S: EvalSet) -> ReducedPolynomial:
    coeffs = interpolation_coefficients(table, S)
    terms = {tuple(int(v) for v in idx): int(coeffs[tuple(idx)]) for idx in np.argwhere(coeffs)}
    return ReducedPolynomial(S.field, coeffs.ndim, terms, eval_set=S)


def function_degree(table: np.ndarray, S: EvalSet) -> int:
    """Total degree of the unique reduced polynomial agreeing with the table on S^n."""
    coeffs = interpolation_coefficients(table, S)
    nz = np.argwhere(coeffs)
    if nz.size == 0:
        return 0
    return int(nz.sum(axis=1).max())


# -- functions on subsets of S^K -------------------------------------------


def monomials(K: int, d: int, max_individual: int) -> Iterator[tuple]:
    """Exponent vectors in K variables of total degree <= d, graded by degree."""
    for deg in range(d + 1):
        yield from _monomials_of_degree(K, deg, max_individual)


def _monomials_of_degree(K: int, deg: int, cap: int) -> Iterator[tuple]:
    if K == 0:
        if deg == 0:
            yield ()
        return
    for first in range(min(deg, cap), -1, -1):
        for rest in _monomials_of_degree(K - 1, deg - first, cap):
            yield (first,) + rest


def monomial_columns(T: np.ndarray, exps: Sequence[tuple], p: int) -> np.ndarray:
    """Matrix whose columns are the given monomials evaluated at the rows of T."""
    T = np.asarray(T, dtype=np.int64) % p
    cols = np.ones((len(T), len(exps)), dtype=np.int64)
    powers: dict[tuple, np.ndarray] = {}
    for j, e in enumerate(exps):
        col = cols[:, j]
        for i, ei in enumerate(e):
            if ei:
                key = (i, ei)
                if key not in powers:
                    powers[key] = _power_mod(T[:, i], ei, p)
                col = col * powers[key] % p
        cols[:, j] = col
    return cols


def _check_linalg(rows: int, cols: int) -> None:
    if rows * cols > LINALG_BUDGET:
        raise DomainTooLarge(f"{rows}x{cols} system exceeds the linear-algebra budget {LINALG_BUDGET}")


@dataclass(frozen=True)
class GradedBasis:
    """Monomials m_1..m_l whose restrictions to T form a basis of all functions on T."""

    exponents: tuple
    degrees: tuple
    matrix: np.ndarray  # |T| x l, column j is m_j on T
    p: int

    def coordinates(self, values) -> np.ndarray:
        x = solve_mod_p(self.matrix, np.asarray(values, dtype=np.int64), self.p)
        if x is None:  # cannot happen for a basis
            raise ArithmeticError("values outside the span of the basis")
        return x

    def is_degree(self, values, d: int) -> bool:
        c = self.coordinates(values)
        return not any(c[j] for j, deg in enumerate(self.degrees) if deg > d)


def graded_basis(T: np.ndarray, S: EvalSet) -> GradedBasis:
    """Greedy basis of functions on T: monomials in order of degree, each kept
    when it is independent of those kept so far."""
    T = np.asarray(T, dtype=np.int64)
    N, K = T.shape
    _check_linalg(N, N)
    p = S.p
    kept: list[tuple] = []
    cols: list[np.ndarray] = []
    # echelon rows of the kept columns (as vectors of length N), fully reduced
    basis = np.zeros((0, N), dtype=np.int64)
    pivots: list[int] = []
    for deg in range(K * (S.s - 1) + 1):
        for e in _monomials_of_degree(K, deg, S.s - 1):
            v = monomial_columns(T, [e], p)[:, 0]
            r = v.copy()
            if pivots:
                r = (r - r[pivots] @ basis) % p
            nz = np.flatnonzero(r)
            if nz.size == 0:
                continue
            c = int(nz[0])
            r = r * pow(int(r[c]), -1, p) % p
            if basis.size:
                basis = (basis - np.outer(basis[:, c], r)) % p
            basis = np.vstack([basis, r])
            pivots.append(c)
            kept.append(e)
            cols.append(v)
            if len(kept) == N:
                matrix = np.stack(cols, axis=1)
                return GradedBasis(tuple(kept), tuple(sum(e) for e in kept), matrix, p)
    raise ArithmeticError("monomials did not span the functions on T; are the points distinct?")


def is_degree_d_on(values, T: np.ndarray, S: EvalSet, d: int) -> bool:
    """Does some polynomial of degree <= d agree with ``values`` on the points T?"""
    T = np.asarray(T, dtype=np.int64)
    exps = list(monomials(T.shape[1], d, S.s - 1))
    _check_linalg(len(T), len(exps))
    M = monomial_columns(T, exps, S.p)
    return tall_in_column_span_mod_p(M, values, S.p)


# -- balanced sets ---------------------------------------------------------


def balanced_size(s: int, t: int) -> int:
    if s < 1 or t % s:
        raise ValueError(f"block length t={t} is not a multiple of s={s}")
    return math.factorial(t) // math.factorial(t // s) ** s


def balanced_index_points(s: int, t: int) -> Iterator[tuple]:
    """Lexicographic words over {0..s-1} of length t using each symbol t/s times."""
    if s < 1 or t % s:
        raise ValueError(f"block length t={t} is not a multiple of s={s}")
    counts = [t // s] * s
    word: list[int] = []

    def rec():
        if len(word) == t:
            yield tuple(word)
            return
        for a in range(s):
            if counts[a]:
                counts[a] -= 1
                word.append(a)
                yield from rec()
                word.pop()
                counts[a] += 1

    return rec()


def balanced_index_array(s: int, t: int, budget: int = DEFAULT_POINT_BUDGET) -> np.ndarray:
    size = balanced_size(s, t)
    if size * t > budget:
        raise DomainTooLarge(f"B(S,{t}) has {size} points, too many to materialize")
    return np.array(list(balanced_index_points(s, t)), dtype=np.int64).reshape(size, t)


def balanced_points(S: EvalSet, t: int) -> Iterator[tuple]:
    """Points of B(S,t) as tuples of field values."""
    for w in balanced_index_points(S.s, t):
        yield tuple(S.points[a] for a in w)


def default_block_length(s: int) -> int:
    """Smallest multiple t of s with |B(S,t)| > (s-1)^t."""
    t = s
    while balanced_size(s, t) <= (s - 1) ** t:
        t += s
    return t


def construct_dual_functional(a: int, S: EvalSet, t: int) -> np.ndarray:
    """A functional C on B(S,t) with <C, y_t^a> = 1 and <C, g> = 0 for every g of degree < a.

    Returned as the vector (C(y))_y in the lexicographic order of B(S,t).
    """
    T = S.values(balanced_index_array(S.s, t))
    lower = list(monomials(t, a - 1, S.s - 1)) if a >= 1 else []
    _check_linalg(len(T), len(lower) + 1)
    target = _power_mod(T[:, -1], a, S.p)
    A = np.vstack([monomial_columns(T, lower, S.p).T, target[None, :]]) if lower else target[None, :]
    rhs = np.zeros(len(A), dtype=np.int64)
    rhs[-1] = 1
    C = solve_mod_p(A, rhs, S.p)
    if C is None:
        raise ArithmeticError(f"no dual functional for a={a} on B(S,{t}): y^{a} has degree < {a} there")
    return C


def random_reduced_polynomial(field: PrimeField, n: int, d: int, s: int, rng: np.random.Generator) -> ReducedPolynomial:
    """Uniform coefficients on every monomial of degree <= d with individual degree <= s-1."""
    return ReducedPolynomial(field, n, {e: int(rng.integers(field.p)) for e in monomials(n, d, s - 1)})
