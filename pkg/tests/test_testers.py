import math
from fractions import Fraction

import numpy as np
import pytest

from griddeg.distance import FamilySpec, exact_distance
from griddeg.field_poly import EvalSet, PrimeField, random_reduced_polynomial
from griddeg.grid import DomainMismatch, FunctionOracle, GridDomain
from griddeg.groups import AbelianGroup
from griddeg.junta_poly import junta_degree_of_table, random_member_table
from griddeg.testers import (
    JuntaTesterConfig,
    QueryBudgetExceeded,
    WeakDegConfig,
    deg_test,
    estimate_rejection,
    exact_recursive_rejection,
    junta_test_recursive,
    junta_test_rephrased,
    lift_general_grid,
    run_trials,
    sample_sigma,
    trial_rng,
    weak_deg_test,
    wilson_interval,
)

F7 = PrimeField(7)
S3 = EvalSet.standard(F7, 3)
Z2, Z3, Z5 = (AbelianGroup.cyclic(m) for m in (2, 3, 5))
TESTERS = [junta_test_recursive, junta_test_rephrased]


def dense(table, group):
    table = np.asarray(table)
    return FunctionOracle(GridDomain(table.shape[:-1]), group, table=table)


@pytest.mark.parametrize("test", TESTERS)
def test_members_always_accepted(test):
    rng = np.random.default_rng(0)
    for d, k in ((0, 3), (1, 4), (2, 5)):
        cfg = JuntaTesterConfig(d, k)
        for _ in range(40):
            f = dense(random_member_table(Z5, 3, 7, d, rng), Z5)
            v = test(f, cfg, rng)
            assert v.accepted and v.queries == 3**k


@pytest.mark.parametrize("test", TESTERS)
def test_small_n_is_exact(test):
    rng = np.random.default_rng(1)
    for _ in range(20):
        table = rng.integers(0, 3, size=(3, 3, 3, 1))
        v = test(dense(table, Z3), JuntaTesterConfig(1, 4), rng)
        assert v.accepted == (junta_degree_of_table(table, Z3) <= 1)
        assert v.transcript["mode"] == "brute-force"


def pattern_indicator(d, n):
    x = np.indices((2,) * n)
    return np.all(x[: d + 1] == 1, axis=0).astype(np.int64)[..., None]


@pytest.mark.parametrize("d", [1, 2])
def test_recursive_rate_matches_exact(d):
    n, k = 6, d + 2
    table = pattern_indicator(d, n)
    exact = exact_recursive_rejection(table, Z2, d, k)
    assert exact > 0
    est = estimate_rejection(dense(table, Z2), lambda g, rng: junta_test_recursive(g, JuntaTesterConfig(d, k), rng),
                             10_000, seed=d)
    sigma = math.sqrt(float(exact) * (1 - float(exact)) / 10_000)
    assert est.rejections > 0
    assert abs(est.rate - float(exact)) <= 4 * sigma


def test_forms_agree_on_small_function():
    table = pattern_indicator(1, 5)
    cfg = JuntaTesterConfig(1, 3)
    a = estimate_rejection(dense(table, Z2), lambda g, r: junta_test_recursive(g, cfg, r), 5000, seed=(7, 0))
    b = estimate_rejection(dense(table, Z2), lambda g, r: junta_test_rephrased(g, cfg, r), 5000, seed=(7, 1))
    pooled = (a.rejections + b.rejections) / 10_000
    assert abs(a.rate - b.rate) <= 3 * math.sqrt(pooled * (1 - pooled) * 2 / 5000)


def test_rephrased_replays_with_same_seed():
    f = dense(np.random.default_rng(2).integers(0, 3, size=(3,) * 6 + (1,)), Z3)
    cfg = JuntaTesterConfig(1, 3)
    v1 = junta_test_rephrased(f, cfg, trial_rng(5, 0))
    v2 = junta_test_rephrased(f, cfg, trial_rng(5, 0))
    assert v1.transcript == v2.transcript and v1.accepted == v2.accepted


def test_sample_sigma():
    rng = np.random.default_rng(3)
    assert sample_sigma(5, 5, rng).tolist() == list(range(5))
    sig = sample_sigma(40, 6, rng)
    assert np.bincount(sig, minlength=6).sum() == 40 and set(sig) == set(range(6))
    good = sum(np.all(16 * np.bincount(sample_sigma(64, 4, rng), minlength=4) >= 64) for _ in range(2000))
    assert good > 0


def test_weak_deg_members_and_constants():
    rng = np.random.default_rng(4)
    D = GridDomain.symmetric(3, 6)
    for d in (0, 1, 2):
        const = FunctionOracle(D, F7, table=np.full((3,) * 6, 5))
        assert weak_deg_test(const, WeakDegConfig(d, t=3 if d < 2 else 3), rng, S3).accepted
    for _ in range(30):
        P = random_reduced_polynomial(F7, 6, 1, 3, rng)
        f = FunctionOracle.from_callback(D, F7, lambda pts, P=P: P.evaluate_many(S3.values(pts)), vectorized=True)
        assert weak_deg_test(f, WeakDegConfig(1, t=6), rng, S3).accepted


def square_oracle(n):
    D = GridDomain.symmetric(3, n)
    return FunctionOracle.from_callback(
        D, F7, lambda pts: S3.values(pts[:, 0]) * (S3.values(pts[:, 0]) - 1) % 7, vectorized=True
    )


def test_deg_test_arm_attribution():
    jcfg, wcfg = JuntaTesterConfig(1, 4), WeakDegConfig(1, t=6)
    est = estimate_rejection(square_oracle(6), lambda g, r: deg_test(g, jcfg, wcfg, r, S3), 60, seed=1)
    assert est.rejections > 0
    assert est.by_arm.get("weak-deg", 0) == est.rejections and "junta-deg" not in est.by_arm
    x = np.indices((3,) * 6)
    prod = FunctionOracle(GridDomain.symmetric(3, 6), F7, table=S3.values(x[0]) * S3.values(x[1]) % 7)
    est = estimate_rejection(prod, lambda g, r: deg_test(g, jcfg, wcfg, r, S3), 60, seed=2)
    assert est.by_arm.get("junta-deg", 0) > 0


def test_degree_tests_need_a_field():
    f = FunctionOracle(GridDomain.symmetric(3, 2), Z3, table=np.zeros((3, 3), dtype=int))
    with pytest.raises(DomainMismatch):
        weak_deg_test(f, WeakDegConfig(1), np.random.default_rng(0))


def test_query_budget():
    f = square_oracle(4)
    with pytest.raises(QueryBudgetExceeded):
        weak_deg_test(f, WeakDegConfig(1, paper_params=True), np.random.default_rng(0), S3)


def test_config_defaults():
    assert JuntaTesterConfig(1).locality(3) == 8
    assert JuntaTesterConfig(2, paper_params=True).locality(3) == 16 * 9 * 2
    assert WeakDegConfig(1).block_length(3) == 6
    assert WeakDegConfig(1, paper_params=True).block_length(3) == 27
    assert WeakDegConfig(1).K(3) == 12
    with pytest.raises(ValueError):
        JuntaTesterConfig(2, k=2)


def test_lift_sizes_and_degree():
    f = FunctionOracle(GridDomain((2, 3)), Z2, table=np.array([[0, 1, 1], [1, 0, 0]]))
    lifted = lift_general_grid(f)
    assert lifted.domain.sizes == (6, 6)
    rng = np.random.default_rng(5)
    for _ in range(50):
        table = rng.integers(0, 3, size=(2, 3, 1))
        f = FunctionOracle(GridDomain((2, 3)), Z3, table=table)
        assert junta_degree_of_table(lift_general_grid(f).to_dense().table, Z3) == junta_degree_of_table(table, Z3)


def test_lift_preserves_distance_small():
    rng = np.random.default_rng(6)
    D = GridDomain((2, 3, 2))
    for _ in range(5):
        f = FunctionOracle(D, Z2, table=rng.integers(0, 2, size=(2, 3, 2)))
        lifted = lift_general_grid(f).to_dense()
        a = exact_distance(f, FamilySpec("junta-degree", 1, D, Z2))[0]
        b = exact_distance(lifted, FamilySpec("junta-degree", 1, lifted.domain, Z2), reduce_twins=True)[0]
        assert a == b


def test_estimate_statistics():
    f = dense(random_member_table(Z3, 3, 5, 1, np.random.default_rng(7)), Z3)
    cfg = JuntaTesterConfig(1, 3)
    est = estimate_rejection(f, lambda g, r: junta_test_rephrased(g, cfg, r), 200)
    # with no rejections the 95% Wilson upper end is z^2 / (n + z^2), about 3.84/n
    z2 = 1.959963984540054**2
    assert est.rate == 0 and est.ci[0] == 0
    assert est.ci[1] == pytest.approx(z2 / (200 + z2)) and est.ci[1] < 4 / 200
    one = estimate_rejection(f, lambda g, r: junta_test_rephrased(g, cfg, r), 1)
    assert one.rate in (0, 1)
    lo1, hi1 = wilson_interval(300, 1000)
    lo2, hi2 = wilson_interval(600, 2000)
    assert (hi2 - lo2) / (hi1 - lo1) == pytest.approx(1 / math.sqrt(2), rel=0.01)


def test_threads_do_not_change_results():
    f = dense(np.random.default_rng(8).integers(0, 3, size=(3,) * 5 + (1,)), Z3)
    cfg = JuntaTesterConfig(1, 3)
    fn = lambda rng: junta_test_rephrased(f, cfg, rng).accepted  # noqa: E731
    assert run_trials(fn, 50, 3, threads=1) == run_trials(fn, 50, 3, threads=4)
