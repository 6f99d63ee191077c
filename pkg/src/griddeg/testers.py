"""Randomized testers: Junta-deg (recursive and rephrased), Weak-deg and Deg,
plus lifting from general grids and rejection-rate estimation."""
from __future__ import annotations

import itertools
import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from statistics import NormalDist
from typing import Callable

import numpy as np

from .field_poly import EvalSet, PrimeField, balanced_index_array, balanced_size, default_block_length, is_degree_d_on
from .grid import DomainMismatch, FunctionOracle, GridDomain
from .junta_poly import junta_degree_of_table

THREADS_ENV = "GRIDDEG_THREADS"


class QueryBudgetExceeded(ValueError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"test needs {required} queries, budget is {budget}")
        self.required = required


@dataclass(frozen=True)
class JuntaTesterConfig:
    """Locality k defaults to max(d + 2, 8); ``paper_params`` uses k = psi * s^2 * d
    (psi * s^2 when d = 0)."""

    d: int
    k: int | None = None
    seed: int = 0
    paper_params: bool = False
    psi: int = 16

    def __post_init__(self):
        if self.d < 0:
            raise ValueError("d must be non-negative")
        if self.k is not None and (self.k < 1 or self.k < self.d + 1):
            raise ValueError(f"locality k={self.k} must be >= max(1, d+1)")

    def locality(self, s: int) -> int:
        if self.k is not None:
            return self.k
        if self.paper_params:
            return self.psi * s * s * max(self.d, 1)
        return max(self.d + 2, 8)


@dataclass(frozen=True)
class WeakDegConfig:
    """Block length t defaults to the smallest multiple of s with
    |B(S,t)| > (s-1)^t; ``paper_params`` uses t = s^3."""

    d: int
    t: int | None = None
    seed: int = 0
    paper_params: bool = False
    query_budget: int = 10**6

    def block_length(self, s: int) -> int:
        if self.t is not None:
            t = self.t
        elif self.paper_params:
            t = s**3
        else:
            t = default_block_length(s)
        if t % s:
            raise ValueError(f"block length t={t} is not a multiple of s={s}")
        return t

    def K(self, s: int) -> int:
        return self.block_length(s) * (self.d + 1)

    def queries(self, s: int) -> int:
        return balanced_size(s, self.block_length(s)) ** (self.d + 1)


@dataclass
class TestVerdict:
    __test__ = False  # not a pytest class

    accepted: bool
    queries: int
    transcript: dict = field(default_factory=dict)
    rejected_by: tuple = ()


# -- junta-degree tester ----------------------------------------------------


def _symmetric(f: FunctionOracle) -> FunctionOracle:
    return f if f.domain.is_symmetric else lift_general_grid(f)


def _query_subcube(f: FunctionOracle, s: int, k: int, source: np.ndarray, perms: np.ndarray) -> np.ndarray:
    """Query f at x_v = perms[v][y[source[v]]] for every y in Z_s^k; returns the (s,)*k+(r,) table."""
    ys = np.indices((s,) * k).reshape(k, -1).T if k else np.zeros((1, 0), dtype=np.int64)
    points = perms[np.arange(len(source))[None, :], ys[:, source]]
    return f.evaluate_many(points).reshape((s,) * k + (f.group.arity,))


def _brute_force(f: FunctionOracle, d: int, s: int, n: int) -> TestVerdict:
    ident = np.tile(np.arange(s), (n, 1))
    table = _query_subcube(f, s, n, np.arange(n), ident)
    ok = junta_degree_of_table(table, f.group) <= d
    return TestVerdict(ok, s**n, {"mode": "brute-force", "source": list(range(n))})


def junta_test_recursive(f: FunctionOracle, cfg: JuntaTesterConfig, rng: np.random.Generator) -> TestVerdict:
    """Identify random pairs of live variables (x_j := pi(x_i)) until k remain,
    then read the restricted function on Z_s^k and check its junta-degree."""
    f = _symmetric(f)
    s, n = f.domain.alphabet, f.domain.n
    k = cfg.locality(s)
    if n <= k:
        return _brute_force(f, cfg.d, s, n)
    rep = np.arange(n)  # variable each x_v currently reads
    perms = np.tile(np.arange(s), (n, 1))  # x_v = perms[v][x_rep[v]]
    live = list(range(n))
    steps = []
    while len(live) > k:
        a, b = rng.choice(len(live), size=2, replace=False)
        i, j = live[a], live[b]
        pi = rng.permutation(s)
        moved = rep == j
        perms[moved] = perms[moved][:, pi]
        rep[moved] = i
        live.remove(j)
        steps.append((int(i), int(j), pi.tolist()))
    position = {v: p for p, v in enumerate(live)}
    source = np.array([position[v] for v in rep])
    table = _query_subcube(f, s, k, source, perms)
    ok = junta_degree_of_table(table, f.group) <= cfg.d
    return TestVerdict(ok, s**k, {"mode": "recursive", "steps": steps, "source": source.tolist(),
                                  "perms": perms.tolist()})


def sample_sigma(r: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """sigma: [r] -> [k] (0-indexed): identity on the first k points, then each
    new point copies the image of a uniformly random earlier point, so it
    joins fiber j with probability proportional to the fiber's current size."""
    if r < k:
        raise ValueError(f"need r >= k, got r={r}, k={k}")
    sigma = np.empty(r, dtype=np.int64)
    sigma[:k] = np.arange(k)
    for i in range(k, r):
        sigma[i] = sigma[rng.integers(0, i)]
    return sigma


def junta_test_rephrased(f: FunctionOracle, cfg: JuntaTesterConfig, rng: np.random.Generator) -> TestVerdict:
    """Query f at x_j = pi_j(y_{sigma(mu^-1(j))}) for all y in Z_s^k."""
    f = _symmetric(f)
    s, n = f.domain.alphabet, f.domain.n
    k = cfg.locality(s)
    if n <= k:
        return _brute_force(f, cfg.d, s, n)
    perms = np.array([rng.permutation(s) for _ in range(n)])
    mu = rng.permutation(n)  # mu[i] = j: position i of the sigma order is variable j
    sigma = sample_sigma(n, k, rng)
    source = np.empty(n, dtype=np.int64)
    source[mu] = sigma
    table = _query_subcube(f, s, k, source, perms)
    ok = junta_degree_of_table(table, f.group) <= cfg.d
    return TestVerdict(ok, s**k, {"mode": "rephrased", "mu": mu.tolist(), "sigma": sigma.tolist(),
                                  "source": source.tolist(), "perms": perms.tolist()})


def exact_recursive_rejection(table: np.ndarray, group, d: int, k: int) -> Fraction:
    """Exact rejection probability of the recursive tester on a dense table (tiny n only)."""
    s = table.shape[0]
    perms = [np.array(p) for p in _permutations(s)]
    arity = table.shape[-1]

    @lru_cache(maxsize=None)
    def reject(key: bytes, r: int) -> Fraction:
        t = np.frombuffer(key, dtype=np.int64).reshape((s,) * r + (arity,))
        if r <= k:
            return Fraction(int(junta_degree_of_table(t, group) > d))
        total = Fraction(0)
        grids = np.indices((s,) * (r - 1))
        for i in range(r):
            for j in range(r):
                if i == j:
                    continue
                for pi in perms:
                    # x_j := pi(x_i); the remaining variables keep their order
                    rest = [v for v in range(r) if v != j]
                    coords = [None] * r
                    for pos, v in enumerate(rest):
                        coords[v] = grids[pos]
                    coords[j] = pi[coords[i]]
                    total += reject(np.ascontiguousarray(t[tuple(coords)]).tobytes(), r - 1)
        return total / (r * (r - 1) * len(perms))

    n = table.ndim - 1
    return reject(np.ascontiguousarray(table, dtype=np.int64).tobytes(), n)


def _permutations(s: int):
    return list(itertools.permutations(range(s)))


# -- degree testers ----------------------------------------------------------


def _field_of(f: FunctionOracle) -> PrimeField:
    if not isinstance(f.codomain, PrimeField):
        raise DomainMismatch(f"degree tests need a prime-field codomain, got {f.codomain}")
    return f.codomain


def weak_deg_test(
    f: FunctionOracle, cfg: WeakDegConfig, rng: np.random.Generator, S: EvalSet | None = None
) -> TestVerdict:
    """Read f'(y) = f(y_mu(1), ..., y_mu(n)) on all of B(S,t)^(d+1) for a uniform
    mu: [n] -> [K], and accept iff f' has degree <= d there."""
    field_ = _field_of(f)
    s, n = f.domain.alphabet, f.domain.n
    S = S or EvalSet.standard(field_, s)
    if S.s != s:
        raise DomainMismatch(f"evaluation set of size {S.s} for a grid of alphabet {s}")
    t = cfg.block_length(s)
    required = cfg.queries(s)
    if required > cfg.query_budget:
        raise QueryBudgetExceeded(required, cfg.query_budget)
    K = t * (cfg.d + 1)
    mu = rng.integers(0, K, size=n)
    block = balanced_index_array(s, t)
    idx = np.indices((len(block),) * (cfg.d + 1)).reshape(cfg.d + 1, -1).T
    Y = np.concatenate([block[idx[:, b]] for b in range(cfg.d + 1)], axis=1)  # grid indices, (|T|, K)
    queries, inverse = np.unique(Y[:, mu], axis=0, return_inverse=True)
    values = f.evaluate_many(queries)[:, 0][inverse.reshape(-1)]
    ok = is_degree_d_on(values, S.values(Y), S, cfg.d)
    return TestVerdict(ok, len(queries), {"mode": "weak-deg", "t": t, "K": K, "mu": mu.tolist()})


def deg_test(
    f: FunctionOracle,
    junta_cfg: JuntaTesterConfig,
    weak_cfg: WeakDegConfig,
    rng: np.random.Generator,
    S: EvalSet | None = None,
) -> TestVerdict:
    """Accept iff both the Junta-deg test (on the additive group of the field)
    and the Weak-deg test accept.  Both arms always run so rejections can be
    attributed."""
    junta = junta_test_rephrased(f, junta_cfg, rng)
    weak = weak_deg_test(f, weak_cfg, rng, S)
    rejected_by = tuple(name for name, v in (("junta-deg", junta), ("weak-deg", weak)) if not v.accepted)
    return TestVerdict(
        not rejected_by,
        junta.queries + weak.queries,
        {"junta-deg": junta.transcript, "weak-deg": weak.transcript},
        rejected_by,
    )


# -- lifting -------------------------------------------------------------------


def lift_general_grid(f: FunctionOracle, max_alphabet: int = 720) -> FunctionOracle:
    """f_lambda on Z_L^n, L = lcm(s_i): coordinate z stands for the pair
    (z // (L/s_i), z mod (L/s_i)) in [s_i] x [L/s_i], and f_lambda ignores the
    second component."""
    sizes = f.domain.sizes
    L = reduce(math.lcm, sizes, 1)
    if L > max_alphabet:
        raise ValueError(f"lifted alphabet L={L} exceeds cap {max_alphabet}")
    stride = np.array([L // s for s in sizes], dtype=np.int64)
    return f.map_points(GridDomain.symmetric(L, len(sizes)), lambda pts: pts // stride)


# -- estimation ------------------------------------------------------------------


def wilson_interval(k: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    if n <= 0:
        raise ValueError("need at least one trial")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    phat = k / n
    denom = 1 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def trial_rng(seed: int | tuple, trial: int) -> np.random.Generator:
    """Generator for one trial; ``seed`` may be a tuple naming a sub-experiment."""
    path = list(seed) if isinstance(seed, tuple) else [seed]
    return np.random.default_rng(np.random.SeedSequence([*path, trial]))


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class RejectionEstimate:
    rejections: int
    trials: int
    rate: float
    ci: tuple
    mean_queries: float
    max_queries: int
    by_arm: dict

    def row(self) -> str:
        return f"{self.rate:.6g},{self.ci[0]:.6g},{self.ci[1]:.6g},{self.mean_queries:.6g}"


def run_trials(
    fn: Callable[[np.random.Generator], object], trials: int, seed: int | tuple, threads: int | None = None
) -> list:
    """fn(rng) for each trial, with per-trial seeds; results in trial order."""
    threads = threads or thread_count()
    jobs = lambda t: fn(trial_rng(seed, t))  # noqa: E731
    if threads == 1:
        return [jobs(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(jobs, range(trials)))


def estimate_rejection(
    f: FunctionOracle,
    tester: Callable[[FunctionOracle, np.random.Generator], TestVerdict],
    trials: int,
    seed: int | tuple = 0,
    threads: int | None = None,
) -> RejectionEstimate:
    if trials < 1:
        raise ValueError("need at least one trial")
    verdicts = run_trials(lambda rng: tester(f, rng), trials, seed, threads)
    rejections = sum(not v.accepted for v in verdicts)
    arms = Counter(arm for v in verdicts for arm in v.rejected_by)
    queries = [v.queries for v in verdicts]
    return RejectionEstimate(
        rejections,
        trials,
        rejections / trials,
        wilson_interval(rejections, trials),
        float(np.mean(queries)),
        int(max(queries)),
        dict(arms),
    )
