"""Fourier analysis on Z_s^n, bernoulli and spherical noise, and the
small-set-expansion inequality for spherical noise."""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .grid import DEFAULT_POINT_BUDGET, DomainTooLarge

TRANSFORM_TOL = 1e-9
SSE_SLACK = 1e-12


@dataclass(frozen=True)
class FourierTable:
    """Coefficients f^(alpha) = E_x f(x) conj(omega^{<alpha, x>}), omega = exp(2 pi i / s)."""

    s: int
    n: int
    coeffs: np.ndarray

    def __getitem__(self, alpha) -> complex:
        return complex(self.coeffs[tuple(alpha)])


def _check_size(s: int, n: int) -> None:
    if s**n > DEFAULT_POINT_BUDGET:
        raise DomainTooLarge(f"{s}^{n} points exceed budget")


def fourier_transform(f: np.ndarray) -> FourierTable:
    f = np.asarray(f, dtype=complex)
    n = f.ndim
    s = f.shape[0] if n else 1
    if any(d != s for d in f.shape):
        raise ValueError(f"table shape {f.shape} is not symmetric")
    _check_size(s, n)
    # numpy's forward transform uses exp(-2 pi i jk/s): exactly the conjugate character
    return FourierTable(s, n, np.fft.fftn(f) / s**n if n else f.copy())


def inverse_transform(ft: FourierTable) -> np.ndarray:
    if ft.n == 0:
        return ft.coeffs.copy()
    return np.fft.ifftn(ft.coeffs) * ft.s**ft.n


def character(beta: Sequence[int], s: int) -> np.ndarray:
    """Table of chi_beta(x) = omega^{<beta, x> mod s}."""
    n = len(beta)
    _check_size(s, n)
    grids = np.indices((s,) * n)
    phase = np.tensordot(np.asarray(beta), grids, axes=1) % s if n else np.zeros(())
    return np.exp(2j * np.pi * phase / s)


# -- noise -------------------------------------------------------------------


@dataclass(frozen=True)
class NoiseSpec:
    """``bernoulli``: each coordinate moves to a uniformly random different value
    with probability rate.  ``spherical``: exactly rate*n coordinates, chosen
    uniformly, move to uniformly random different values."""

    kind: str
    rate: Fraction

    def __post_init__(self):
        if self.kind not in ("bernoulli", "spherical"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        rate = Fraction(self.rate).limit_denominator(10**9) if isinstance(self.rate, float) else Fraction(self.rate)
        if not 0 <= rate <= 1:
            raise ValueError(f"noise rate {rate} outside [0, 1]")
        object.__setattr__(self, "rate", rate)

    def radius(self, n: int) -> int:
        """Number of moved coordinates of a spherical noise on n coordinates."""
        m = self.rate * n
        if m.denominator != 1:
            raise ValueError(f"spherical noise needs rate*n integral, got {self.rate}*{n}")
        return int(m)

    def rho(self, s: int) -> Fraction:
        return 1 - self.rate * s / (s - 1)

    @classmethod
    def snapped_sphere(cls, rate, n: int) -> tuple["NoiseSpec", bool]:
        """Spherical noise at the feasible rate m/n closest to ``rate``; flag says if it moved."""
        rate = Fraction(rate).limit_denominator(10**9) if isinstance(rate, float) else Fraction(rate)
        m = min(n, max(0, round(rate * n)))
        snapped = Fraction(m, n) if n else Fraction(0)
        return cls("spherical", snapped), snapped != rate


def hypergeometric_pmf(n: int, m: int, w: int) -> list[Fraction]:
    """Pr[|J cap I| = j] for fixed |J| = w and I a uniform m-subset of [n]."""
    total = math.comb(n, m)
    return [
        Fraction(math.comb(w, j) * math.comb(n - w, m - j) if 0 <= m - j <= n - w else 0, total)
        for j in range(w + 1)
    ]


def char_expectation(alpha: Sequence[int], noise: NoiseSpec, s: int) -> Fraction:
    """E_z[chi_alpha(z)] for z the noise displacement; always rational.

    Each moved coordinate contributes -1/(s-1) to a character that is
    nontrivial there, and the unmoved ones contribute 1.
    """
    n = len(alpha)
    weight = sum(1 for a in alpha if a % s)
    if noise.kind == "bernoulli":
        return noise.rho(s) ** weight
    m = noise.radius(n)
    step = Fraction(-1, s - 1)
    return sum((pr * step**j for j, pr in enumerate(hypergeometric_pmf(n, m, weight))), Fraction(0))


def cyclotomic(m: int) -> list[int]:
    """Integer coefficients (low -> high) of the m-th cyclotomic polynomial."""
    poly = [-1] + [0] * (m - 1) + [1]  # x^m - 1
    for d in range(1, m):
        if m % d == 0:
            poly = _divide_exact(poly, cyclotomic(d))
    return poly


def _divide_exact(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = num[i + len(den) - 1] // den[-1]
        q[i] = c
        for j, dc in enumerate(den):
            num[i + j] -= c * dc
    if any(num):
        raise ArithmeticError("inexact polynomial division")
    return q


def _reduce_mod_monic(poly: list[int], mod: list[int]) -> list[int]:
    poly = list(poly)
    deg = len(mod) - 1
    for i in range(len(poly) - 1, deg - 1, -1):
        c = poly[i]
        if c:
            for j, mc in enumerate(mod):
                poly[i - deg + j] -= c * mc
    return poly[:deg]


def root_of_unity_sum(counts: Sequence[int], s: int) -> Fraction | None:
    """Exact value of sum_e counts[e] * omega^e if it is rational, else None."""
    rem = _reduce_mod_monic(list(counts), cyclotomic(s))
    if any(rem[1:]):
        return None
    return Fraction(rem[0] if rem else 0)


def _sphere_displacements(n: int, m: int, s: int) -> np.ndarray:
    """Every displacement moving exactly the coordinates of some m-subset."""
    rows = []
    for I in itertools.combinations(range(n), m):
        for shifts in itertools.product(range(1, s), repeat=m):
            z = [0] * n
            for i, c in zip(I, shifts):
                z[i] = c
            rows.append(z)
    return np.array(rows, dtype=np.int64).reshape(-1, n)


def char_expectation_bruteforce(alphas: np.ndarray, noise: NoiseSpec, s: int) -> list[Fraction]:
    """Spherical expectations by enumerating every displacement, in exact arithmetic."""
    alphas = np.asarray(alphas, dtype=np.int64)
    n = alphas.shape[1]
    if noise.kind != "spherical":
        raise ValueError("exact enumeration is for spherical noise")
    Z = _sphere_displacements(n, noise.radius(n), s)
    phases = alphas @ Z.T % s
    out = []
    for row in phases:
        value = root_of_unity_sum(np.bincount(row, minlength=s).tolist(), s)
        if value is None:
            raise ArithmeticError("character sum is not rational")
        out.append(value / len(Z))
    return out


def bernoulli_expectation_bruteforce(alpha: Sequence[int], rate: float, s: int) -> complex:
    """Sum over all displacements z of Pr[z] * omega^{<alpha, z>}, in floating point."""
    n = len(alpha)
    Z = np.indices((s,) * n).reshape(n, -1).T
    moved = (Z != 0).sum(axis=1)
    prob = (rate / (s - 1)) ** moved * (1 - rate) ** (n - moved)
    return complex(np.sum(prob * np.exp(2j * np.pi * (Z @ np.asarray(alpha) % s) / s)))


def sample_noise(x: Sequence[int], noise: NoiseSpec, s: int, rng: np.random.Generator) -> tuple:
    x = np.asarray(x, dtype=np.int64)
    n = len(x)
    if noise.kind == "bernoulli":
        moved = rng.random(n) < float(noise.rate)
    else:
        moved = np.zeros(n, dtype=bool)
        moved[rng.choice(n, size=noise.radius(n), replace=False)] = True
    shift = rng.integers(1, s, size=n)
    return tuple(int(v) for v in np.where(moved, (x + shift) % s, x))


# -- collision probabilities -------------------------------------------------


def _as_table(A, s: int, n: int) -> np.ndarray:
    """Indicator table of A, given as a boolean table or a list of points."""
    A_arr = np.asarray(A)
    if A_arr.dtype == bool and A_arr.shape == (s,) * n:
        return A_arr
    _check_size(s, n)
    table = np.zeros((s,) * n, dtype=bool)
    for x in A:
        table[tuple(x)] = True
    return table


def _pair_distance_histogram(points: np.ndarray, n: int, chunk: int = 512) -> np.ndarray:
    hist = np.zeros(n + 1, dtype=np.int64)
    for start in range(0, len(points), chunk):
        block = points[start : start + chunk]
        d = (block[:, None, :] != points[None, :, :]).sum(axis=2)
        hist += np.bincount(d.ravel(), minlength=n + 1)
    return hist


def transition_weights(noise: NoiseSpec, s: int, n: int) -> list[Fraction]:
    """Pr[y = x'] for a fixed x' at Hamming distance h from x, indexed by h."""
    if noise.kind == "bernoulli":
        nu = noise.rate
        return [(nu / (s - 1)) ** h * (1 - nu) ** (n - h) for h in range(n + 1)]
    m = noise.radius(n)
    sphere = math.comb(n, m) * (s - 1) ** m
    return [Fraction(int(h == m), sphere) for h in range(n + 1)]


def collision_probability(A, noise: NoiseSpec, s: int, n: int) -> Fraction:
    """Exact Pr[x in A and y in A] with x uniform on Z_s^n and y the noised x."""
    table = _as_table(A, s, n)
    points = np.argwhere(table)
    if len(points) == 0:
        return Fraction(0)
    hist = _pair_distance_histogram(points, n)
    weights = transition_weights(noise, s, n)
    total = sum((int(c) * w for c, w in zip(hist, weights)), Fraction(0))
    return total / s**n


def collision_probability_fourier(A, noise: NoiseSpec, s: int, n: int) -> float:
    """The same probability as sum_alpha |f^(alpha)|^2 E[chi_alpha(noise)]."""
    table = _as_table(A, s, n)
    ft = fourier_transform(table.astype(float))
    power = np.abs(ft.coeffs) ** 2
    weight = (np.indices((s,) * n) != 0).sum(axis=0) if n else np.zeros((), dtype=int)
    by_weight = [float(char_expectation([1] * w + [0] * (n - w), noise, s)) for w in range(n + 1)]
    return float(np.sum(power * np.asarray(by_weight)[weight]))


def collision_probability_direct(A, noise: NoiseSpec, s: int, n: int) -> Fraction:
    """Double sum over x in A and every noise outcome; for cross-checking on tiny grids."""
    table = _as_table(A, s, n)
    weights = transition_weights(noise, s, n)
    pts = np.indices((s,) * n).reshape(n, -1).T
    total = Fraction(0)
    for x in np.argwhere(table):
        h = (pts != x).sum(axis=1)
        inside = table.reshape(-1)
        counts = np.bincount(h[inside], minlength=n + 1)
        total += sum((int(c) * w for c, w in zip(counts, weights)), Fraction(0))
    return total / s**n


# -- small-set expansion -----------------------------------------------------


def sse_exponent(s: int) -> float:
    """lambda = 1 / (2^14 * log2 s)."""
    return 1.0 / (2**14 * math.log2(s))


@dataclass(frozen=True)
class SSEResult:
    n: int
    s: int
    nu: Fraction
    delta: Fraction
    lhs: Fraction
    bound: float
    ok: bool
    asserted: bool  # False for s = 2, where the constant 2 is not guaranteed

    def row(self) -> dict:
        return {
            "n": self.n,
            "s": self.s,
            "nu": str(self.nu),
            "delta": repr(float(self.delta)),
            "lhs": repr(float(self.lhs)),
            "bound": repr(self.bound),
        }


def sse_check(A, nu, s: int, n: int) -> SSEResult:
    """Compare the spherical collision probability of A with 2 * delta^(1 + lambda)."""
    noise = NoiseSpec("spherical", nu)
    if not Fraction(1, 32) <= noise.rate <= 1:
        raise ValueError(f"noise rate {noise.rate} outside [1/32, 1]")
    noise.radius(n)
    if s < 2:
        raise ValueError("alphabet must have at least 2 symbols")
    table = _as_table(A, s, n)
    delta = Fraction(int(table.sum()), s**n)
    lhs = collision_probability(table, noise, s, n)
    bound = 2 * float(delta) ** (1 + sse_exponent(s)) if delta else 0.0
    ok = float(lhs) <= bound + SSE_SLACK
    return SSEResult(n, s, noise.rate, delta, lhs, bound, ok, asserted=s >= 3)


def write_sse_csv(results: Iterable[SSEResult], path) -> None:
    fields = ["n", "s", "nu", "delta", "lhs", "bound"]
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for r in results:
            writer.writerow(r.row())


def hypergeometric_lower_tail(n: int, m: int, k: int, nu) -> Fraction:
    """Pr[|J cap I| < nu*k/2] for |J| = k fixed and I a uniform m-subset of [n]."""
    nu = Fraction(nu)
    pmf = hypergeometric_pmf(n, m, k)
    return sum((pr for j, pr in enumerate(pmf) if j < nu * k / 2), Fraction(0))


def tail_bound_holds(n: int, nu, k: int) -> tuple[Fraction, float, bool]:
    """Exact lower tail at sphere radius nu*n against exp(-nu^2 k / 2)."""
    nu = Fraction(nu)
    m = nu * n
    if m.denominator != 1:
        raise ValueError("nu*n must be integral")
    tail = hypergeometric_lower_tail(n, int(m), k, nu)
    bound = math.exp(-float(nu) ** 2 * k / 2)
    return tail, bound, float(tail) <= bound
