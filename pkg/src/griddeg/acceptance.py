"""The acceptance suite: thirteen exact or property-based checks, each reporting pass/fail."""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .distance import FamilySpec, exact_distance
from .field_poly import (
    EvalSet,
    PrimeField,
    balanced_index_array,
    balanced_size,
    graded_basis,
    is_degree_d_on,
    monomial_columns,
    monomials,
    random_reduced_polynomial,
)
from .fourier import (
    NoiseSpec,
    char_expectation,
    char_expectation_bruteforce,
    sse_check,
)
from .grid import FunctionOracle, GridDomain
from .groups import AbelianGroup
from .hitting_set import build_hitting_set, random_sign_sums, verify_hitting_set, verify_one_point_separation
from .junta_poly import (
    _pattern_weights,
    evaluate_tensor,
    junta_degree_by_definition,
    junta_degree_of_table,
    random_member_table,
)
from .lower_bound import AsymmetricGrid, bad_fraction, verify_all_certificates
from .testers import (
    JuntaTesterConfig,
    WeakDegConfig,
    deg_test,
    estimate_rejection,
    exact_recursive_rejection,
    junta_test_recursive,
    junta_test_rephrased,
    lift_general_grid,
    run_trials,
)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d}: {self.title} ({self.detail}; {self.seconds:.1f}s)"


def _rng(*path: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(list(path)))


def _field_oracle(domain: GridDomain, field: PrimeField, fn) -> FunctionOracle:
    return FunctionOracle.from_callback(domain, field, fn, vectorized=True)


# -- 1 ---------------------------------------------------------------------------


def junta_completeness(seed: int = 1, members: int = 1000) -> tuple[bool, str]:
    group = AbelianGroup.cyclic(5)
    domain = GridDomain.symmetric(3, 8)
    rejections = over_budget = 0
    for d, k in itertools.product((1, 2), (4, 6)):
        cfg = JuntaTesterConfig(d, k)

        def trial(rng, d=d, cfg=cfg, k=k):
            f = FunctionOracle(domain, group, table=random_member_table(group, 3, 8, d, rng))
            out = []
            for test in (junta_test_rephrased, junta_test_recursive):
                before = f.query_count
                v = test(f, cfg, rng)
                out.append((v.accepted, f.query_count - before <= 3**k))
            return out

        for results in run_trials(trial, members, (seed, d, k)):
            rejections += sum(not a for a, _ in results)
            over_budget += sum(not q for _, q in results)
    ok = rejections == 0 and over_budget == 0
    return ok, f"{rejections} rejections, {over_budget} over the s^k query ceiling in {8 * members} runs"


# -- 2 and 3 ---------------------------------------------------------------------

F7 = PrimeField(7)
S3 = EvalSet.standard(F7, 3)
GRID10 = GridDomain.symmetric(3, 10)


def deg_completeness(seed: int = 2, members: int = 1000) -> tuple[bool, str]:
    jcfg, wcfg = JuntaTesterConfig(1), WeakDegConfig(1, t=6)

    def trial(rng):
        poly = random_reduced_polynomial(F7, 10, 1, 3, rng)
        f = _field_oracle(GRID10, F7, lambda pts: poly.evaluate_many(S3.values(pts)))
        return deg_test(f, jcfg, wcfg, rng, S3)

    verdicts = run_trials(trial, members, seed)
    rejections = sum(not v.accepted for v in verdicts)
    ceiling = 3**8 + balanced_size(3, 6) ** 2
    over = sum(v.queries > ceiling for v in verdicts)
    return rejections == 0 and over == 0, f"{rejections} rejections in {members} degree-1 members"


def _deg_rates(f: FunctionOracle, trials: int, seed: int):
    jcfg, wcfg = JuntaTesterConfig(1), WeakDegConfig(1, t=6)
    return estimate_rejection(f, lambda g, rng: deg_test(g, jcfg, wcfg, rng, S3), trials, seed)


def deg_soundness(seed: int = 3, trials: int = 2000) -> tuple[bool, str]:
    from .testers import wilson_interval

    square = _field_oracle(GRID10, F7, lambda pts: (S3.values(pts[:, 0]) * (S3.values(pts[:, 0]) - 1) % 7))
    est = _deg_rates(square, trials, seed)
    weak = est.by_arm.get("weak-deg", 0)
    junta = est.by_arm.get("junta-deg", 0)
    first = est.rejections > 0 and est.ci[0] > 0 and weak == est.rejections and junta == 0

    product = _field_oracle(GRID10, F7, lambda pts: S3.values(pts[:, 0]) * S3.values(pts[:, 1]) % 7)
    est2 = _deg_rates(product, trials, seed + 1)
    junta2 = est2.by_arm.get("junta-deg", 0)
    second = est2.rejections > 0 and est2.ci[0] > 0 and wilson_interval(junta2, trials)[0] > 0
    detail = (
        f"x1(x1-1): rate {est.rate:.3f}, CI lower {est.ci[0]:.3f}, weak-deg {weak}/{est.rejections}, "
        f"junta-deg {junta}; x1*x2: rate {est2.rate:.3f}, junta-deg rejections {junta2}"
    )
    return first and second, detail


# -- 4 ---------------------------------------------------------------------------


def oracle_equivalence(seed: int = 4, random_functions: int = 1000) -> tuple[bool, str]:
    Z3, Z2 = AbelianGroup.cyclic(3), AbelianGroup.cyclic(2)
    mismatches = 0
    for values in itertools.product(range(3), repeat=4):
        table = np.array(values).reshape(2, 2, 1)
        mismatches += junta_degree_of_table(table, Z3) != junta_degree_by_definition(table, Z3)
    rng = _rng(seed)
    for _ in range(random_functions):
        table = rng.integers(0, 2, size=(3, 3, 3, 1))
        mismatches += junta_degree_of_table(table, Z2) != junta_degree_by_definition(table, Z2)
    return mismatches == 0, f"{mismatches} mismatches over {81 + random_functions} functions"


# -- 5 ---------------------------------------------------------------------------


def nonroot_bound(seed: int = 5, samples: int = 1000) -> tuple[bool, str]:
    group = AbelianGroup.cyclic(6)
    violations = checked = 0
    tightest = None
    for s, n, d in itertools.product((2, 3), (3, 4), (1, 2)):
        rng = _rng(seed, s, n, d)
        shape = (s,) * n
        low = _pattern_weights(shape) <= d
        done = 0
        while done < samples:
            # sparse random supports reach the bound far more often than dense ones
            density = rng.uniform(0.02, 1.0)
            coeffs = rng.integers(0, 6, size=shape + (1,)) * (rng.random(shape + (1,)) < density)
            coeffs[~low] = 0
            if not coeffs.any():
                continue
            nonroots = int(np.any(evaluate_tensor(coeffs, group) != 0, axis=-1).sum())
            violations += nonroots < s ** (n - d)
            slack = Fraction(nonroots, s ** (n - d))
            tightest = slack if tightest is None else min(tightest, slack)
            done += 1
            checked += 1
    return violations == 0, f"{violations} violations in {checked} polynomials, min ratio to s^(n-d) {tightest}"


# -- 6 ---------------------------------------------------------------------------


def square_distance() -> tuple[bool, str]:
    parts, ok = [], True
    for n in (2, 3):
        domain = GridDomain.symmetric(3, n)
        pts = domain.points_array()
        table = (S3.values(pts[:, 0]) * (S3.values(pts[:, 0]) - 1) % 7).reshape(domain.sizes)
        f = FunctionOracle(domain, F7, table=table)
        dist, _ = exact_distance(f, FamilySpec("degree", 1, domain, F7, S3))
        ok &= dist >= Fraction(1, 3)
        parts.append(f"n={n}: {dist}")
    return ok, ", ".join(parts)


# -- 7 ---------------------------------------------------------------------------


def small_set_expansion(seed: int = 7, sets: int = 200) -> tuple[bool, str]:
    s, n = 3, 6
    N = s**n
    lo, hi = math.ceil(0.005 * N), math.floor(0.5 * N)
    rng = _rng(seed)
    failures = checks = 0
    worst = 0.0
    for _ in range(sets):
        table = np.zeros(N, dtype=bool)
        table[rng.choice(N, size=int(rng.integers(lo, hi + 1)), replace=False)] = True
        table = table.reshape((s,) * n)
        for nu in (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1)):
            r = sse_check(table, nu, s, n)
            failures += not r.ok
            checks += 1
            worst = max(worst, float(r.lhs) / r.bound)
    return failures == 0, f"{failures} failures in {checks} checks, max lhs/bound {worst:.3f}"


# -- 8 ---------------------------------------------------------------------------


def character_expectations() -> tuple[bool, str]:
    bern_err = 0.0
    mismatches = cases = 0
    for s in (3, 4):
        for n in range(1, 6):
            alphas = np.indices((s,) * n).reshape(n, -1).T
            for m in range(n + 1):
                noise = NoiseSpec("spherical", Fraction(m, n))
                brute = char_expectation_bruteforce(alphas, noise, s)
                for a, b in zip(alphas, brute):
                    mismatches += char_expectation(a, noise, s) != b
                    cases += 1
            Z = alphas  # displacements range over the same grid
            moved = (Z != 0).sum(axis=1)
            phases = np.exp(2j * np.pi * (alphas @ Z.T % s) / s)
            weight = (alphas % s != 0).sum(axis=1)
            for nu in (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(2, 3), Fraction(1)):
                prob = (float(nu) / (s - 1)) ** moved * (1 - float(nu)) ** (n - moved)
                brute = phases @ prob
                rho = float(NoiseSpec("bernoulli", nu).rho(s))
                closed = np.array([float(char_expectation([1] * w, NoiseSpec("bernoulli", nu), s)) for w in weight])
                bern_err = max(bern_err, float(np.max(np.abs(brute - closed))),
                               float(np.max(np.abs(closed - rho ** weight))))
    ok = mismatches == 0 and bern_err <= 1e-12
    return ok, f"{mismatches} exact spherical mismatches in {cases} cases, bernoulli max error {bern_err:.2e}"


# -- 9 ---------------------------------------------------------------------------


def hitting_sets(seed: int = 9) -> tuple[bool, str]:
    Z5 = AbelianGroup.cyclic(5)
    ok, parts = True, []
    for d, s in itertools.product((1, 2), (2, 3)):
        rng = _rng(seed, d, s)
        hs = build_hitting_set(16, d, s, rng, max_retries=1000)
        U = hs.U
        dist = (U[:, None, :] != U[None, :, :]).sum(axis=2)[~np.eye(len(U), dtype=bool)]
        distances = bool(np.all((4 <= dist) & (dist <= 12)))
        sums = random_sign_sums(U, hs.chi, d, s, Z5, 1000, rng)
        separated = verify_one_point_separation(U, hs.chi, d, s, Z5)
        good = verify_hitting_set(hs) and distances and not sums.any() and separated
        ok &= good
        parts.append(f"d={d},s={s}: w={hs.w}, tries={hs.attempts}, {'ok' if good else 'bad'}")
    return ok, "; ".join(parts)


# -- 10 --------------------------------------------------------------------------


def graded_basis_contract(seed: int = 10, functions: int = 200) -> tuple[bool, str]:
    S = EvalSet.standard(F7, 2)
    block = balanced_index_array(2, 4)
    idx = np.indices((len(block), len(block))).reshape(2, -1).T
    T = S.values(np.concatenate([block[idx[:, 0]], block[idx[:, 1]]], axis=1))
    basis = graded_basis(T, S)
    rng = _rng(seed)
    wrong = members = 0
    linear = monomial_columns(T, list(monomials(8, 1, 1)), 7)
    for i in range(functions):
        if i % 2 == 0:
            values = linear @ rng.integers(0, 7, size=linear.shape[1]) % 7
        else:
            values = rng.integers(0, 7, size=len(T))
        truth = is_degree_d_on(values, T, S, 1)
        members += truth
        wrong += basis.is_degree(values, 1) != truth or (i % 2 == 0 and not truth)
    dims = all(balanced_size(s, s**3) > (s - 1) ** (s**3) for s in (2, 3, 4))
    return wrong == 0 and dims, (
        f"{wrong} misclassified of {functions} ({members} degree-1), |T|={len(T)}, "
        f"dimension inequality {'holds' if dims else 'fails'} for s=2,3,4"
    )


# -- 11 --------------------------------------------------------------------------


def lifting_preserves_distance(seed: int = 11, functions: int = 20) -> tuple[bool, str]:
    Z2 = AbelianGroup.cyclic(2)
    mismatches, parts = 0, []
    # the (2,3,4) lift is 12^3; merging the first lifted axis keeps it enumerable
    for sizes, twins in (((2, 3, 2, 3), False), ((2, 3, 4), (0,))):
        domain = GridDomain(sizes)
        rng = _rng(seed, *sizes)
        for _ in range(functions):
            f = FunctionOracle(domain, Z2, table=rng.integers(0, 2, size=sizes))
            d0, _ = exact_distance(f, FamilySpec("junta-degree", 1, domain, Z2))
            lifted = lift_general_grid(f).to_dense()
            d1, _ = exact_distance(lifted, FamilySpec("junta-degree", 1, lifted.domain, Z2), reduce_twins=twins)
            mismatches += d0 != d1
        parts.append(f"{sizes}->{lifted.domain.sizes}")
    return mismatches == 0, f"{mismatches} mismatches over {2 * functions} functions ({', '.join(parts)})"


# -- 12 --------------------------------------------------------------------------


def impossibility_demo(seed: int = 12, matrices: int = 1000) -> tuple[bool, str]:
    violations = uncertified = collisions = 0
    for n in (27, 81, 243):
        grid = AsymmetricGrid.canonical(n)
        for ell in (1, 2, 3):
            rng = _rng(seed, n, ell)
            for _ in range(matrices):
                M = grid.random_query_matrix(ell, rng)
                violations += bad_fraction(M, grid) > Fraction(3**ell, n)
                c, v = verify_all_certificates(M, grid)
                collisions += c
                uncertified += c - v
    ok = violations == 0 and uncertified == 0
    return ok, f"{violations} bound violations, {uncertified} of {collisions} collisions uncertified"


# -- 13 --------------------------------------------------------------------------


def fixed_nonmembers() -> list[np.ndarray]:
    """Five junta-degree > 1 functions Z_3^5 -> Z_3."""
    x = np.indices((3,) * 5)
    rng = _rng(13)
    tables = [
        (x[0] == 1) & (x[1] == 1),
        ((x[0] == 2) & (x[1] == 1) & (x[2] == 2)) * 2,
        x[0] * x[1] % 3,
        rng.integers(0, 3, size=(3,) * 5),
        (x[0] + x[1] * x[2] + (x[3] == x[4])) % 3,
    ]
    return [np.asarray(t, dtype=np.int64)[..., None] for t in tables]


def tester_forms_agree(seed: int = 0, trials: int = 10_000) -> tuple[bool, str]:
    Z3 = AbelianGroup.cyclic(3)
    domain = GridDomain.symmetric(3, 5)
    cfg = JuntaTesterConfig(1, 3)
    ok, parts = True, []
    for idx, table in enumerate(fixed_nonmembers()):
        f = FunctionOracle(domain, Z3, table=table)
        a = estimate_rejection(f, lambda g, rng: junta_test_recursive(g, cfg, rng), trials, (seed, idx, 0))
        b = estimate_rejection(f, lambda g, rng: junta_test_rephrased(g, cfg, rng), trials, (seed, idx, 1))
        pooled = (a.rejections + b.rejections) / (2 * trials)
        sigma = math.sqrt(pooled * (1 - pooled) * 2 / trials)
        diff = abs(a.rate - b.rate)
        good = diff <= 3 * sigma if sigma > 0 else diff == 0
        ok &= good
        exact = exact_recursive_rejection(table, Z3, cfg.d, cfg.k)
        parts.append(f"{a.rate:.4f}/{b.rate:.4f} (exact {exact})")
    return ok, "recursive/rephrased rates " + ", ".join(parts)


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    run: Callable[[], tuple[bool, str]]
    time_limit: float | None = None  # seconds


CRITERIA = [
    Criterion(1, "junta tester completeness on Z3^8 -> Z5", junta_completeness, 120),
    Criterion(2, "Deg tester completeness on degree-1 polynomials", deg_completeness, 300),
    Criterion(3, "Deg tester soundness positivity with arm attribution", deg_soundness, 600),
    Criterion(4, "interpolation junta-degree equals definition", oracle_equivalence),
    Criterion(5, "non-root lower bound s^(n-d)", nonroot_bound),
    Criterion(6, "x1(x1-1) is at least 1/3 from degree 1", square_distance),
    Criterion(7, "spherical small-set expansion", small_set_expansion, 180),
    Criterion(8, "exact character expectations", character_expectations),
    Criterion(9, "hitting sets for k=16", hitting_sets),
    Criterion(10, "graded basis contract and dimension inequality", graded_basis_contract),
    Criterion(11, "lifting preserves distance", lifting_preserves_distance),
    Criterion(12, "impossibility demo bounds and certificates", impossibility_demo, 120),
    Criterion(13, "recursive and rephrased junta testers agree", tester_forms_agree),
]


def run_criterion(c: Criterion) -> CriterionResult:
    start = time.perf_counter()
    passed, detail = c.run()
    elapsed = time.perf_counter() - start
    if c.time_limit is not None and elapsed >= c.time_limit:
        passed = False
        detail += f"; exceeded {c.time_limit:.0f}s limit"
    return CriterionResult(c.number, c.title, passed, detail, elapsed)


def run_acceptance(only: list[int] | None = None, echo: Callable[[str], None] | None = print) -> list[CriterionResult]:
    results = []
    for c in CRITERIA:
        if only and c.number not in only:
            continue
        r = run_criterion(c)
        if echo:
            echo(r.line())
        results.append(r)
    return results
