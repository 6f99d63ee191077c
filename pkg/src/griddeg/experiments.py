"""JSON-configured experiment sweeps with deterministic CSV output."""
from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .distance import FamilySpec, random_function_at_distance
from .field_poly import EvalSet, PrimeField, random_reduced_polynomial
from .fourier import sse_check
from .grid import FunctionOracle, GridDomain
from .groups import AbelianGroup
from .junta_poly import junta_degree_by_definition, junta_degree_of_table, random_member_table
from .lower_bound import AsymmetricGrid, bad_fraction, verify_all_certificates
from .testers import (
    JuntaTesterConfig,
    WeakDegConfig,
    deg_test,
    estimate_rejection,
    junta_test_recursive,
    junta_test_rephrased,
    run_trials,
    sample_sigma,
)

CONFIG_VERSION = 1
TOP_LEVEL_KEYS = {"version", "kind", "seed", "output", "params"}

# allowed parameters and their defaults, per experiment kind
PARAMS: dict[str, dict[str, Any]] = {
    "completeness": {
        "tester": "junta", "form": "rephrased", "s": 3, "n": 8, "d": 1, "k": None, "t": None,
        "codomain": "Z5", "trials": 100,
    },
    "soundness-sweep": {
        "s": 3, "n": 4, "d": 1, "k": 3, "codomain": "Z2", "deltas": [0, 0.05, 0.1, 0.2],
        "functions": 2, "trials": 200, "form": "rephrased",
    },
    "sse-sweep": {"s": 3, "n": 6, "nus": ["1/3", "1/2", "2/3", "1"], "sets": 20, "min_density": 0.005,
                  "max_density": 0.5},
    "sigma-goodness": {"r": [16, 64], "k": [2, 4], "samples": 10000},
    "impossibility": {"n": [27, 81], "l": [1, 2, 3], "trials": 100},
    "oracle-crosscheck": {"s": 3, "n": 3, "codomain": "Z2", "functions": 100},
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seed: int
    params: dict
    output: str | None = None
    version: int = CONFIG_VERSION


def parse_config(text: str) -> ExperimentConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(sorted(unknown))}")
    if raw.get("version") != CONFIG_VERSION:
        raise ConfigError(f"version: expected {CONFIG_VERSION}, got {raw.get('version')!r}")
    kind = raw.get("kind")
    if kind not in PARAMS:
        raise ConfigError(f"kind: expected one of {', '.join(PARAMS)}, got {kind!r}")
    seed = raw.get("seed")
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError("seed: a non-negative integer is required")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params: expected an object")
    unknown = set(params) - set(PARAMS[kind])
    if unknown:
        raise ConfigError(f"params: unknown keys for {kind}: {', '.join(sorted(unknown))}")
    merged = {**PARAMS[kind], **params}
    for key, default in PARAMS[kind].items():
        value = merged[key]
        if default is not None and value is not None and not _same_type(value, default):
            raise ConfigError(f"params.{key}: expected {type(default).__name__}, got {value!r}")
    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output: expected a path string")
    return ExperimentConfig(kind, seed, merged, output)


def _same_type(value, default) -> bool:
    if isinstance(default, bool):
        return isinstance(value, bool)
    if isinstance(default, int):
        return isinstance(value, int) and not isinstance(value, bool)
    if isinstance(default, float):
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    return isinstance(value, type(default))


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read())


@dataclass
class ExperimentResult:
    kind: str
    columns: list
    rows: list
    assertions: dict = field(default_factory=dict)  # name -> (criterion number, passed)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.assertions.values())

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in sorted(self.rows, key=_sort_key):
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    def summary(self) -> str:
        lines = [f"{self.kind}: {len(self.rows)} rows"]
        for name, (criterion, ok) in self.assertions.items():
            lines.append(f"  [{'PASS' if ok else 'FAIL'}] {name} (criterion {criterion})")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _sort_key(row):
    return tuple((0, v) if isinstance(v, (int, float, Fraction)) else (1, str(v)) for v in row)


def _codomain(text: str):
    return PrimeField.parse(text) if text.startswith("F") else AbelianGroup.parse(text)


def _rng(seed: int, *path: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *path]))


# -- kinds -------------------------------------------------------------------


def _completeness(cfg: ExperimentConfig) -> ExperimentResult:
    p = cfg.params
    s, n, d = p["s"], p["n"], p["d"]
    domain = GridDomain.symmetric(s, n)
    if p["tester"] == "junta":
        group = AbelianGroup.parse(p["codomain"])
        jcfg = JuntaTesterConfig(d, p["k"])
        test = junta_test_recursive if p["form"] == "recursive" else junta_test_rephrased

        def trial(rng):
            f = FunctionOracle(domain, group, table=random_member_table(group, s, n, d, rng))
            return test(f, jcfg, rng)
    elif p["tester"] == "deg":
        field_ = PrimeField.parse(p["codomain"])
        S = EvalSet.standard(field_, s)
        jcfg, wcfg = JuntaTesterConfig(d, p["k"]), WeakDegConfig(d, p["t"])

        def trial(rng):
            poly = random_reduced_polynomial(field_, n, d, s, rng)
            f = FunctionOracle.from_callback(domain, field_, lambda pts: poly.evaluate_many(S.values(pts)),
                                             vectorized=True)
            return deg_test(f, jcfg, wcfg, rng, S)
    else:
        raise ConfigError(f"params.tester: expected 'junta' or 'deg', got {p['tester']!r}")
    verdicts = run_trials(trial, p["trials"], cfg.seed)
    rows = [(t, int(v.accepted), v.queries) for t, v in enumerate(verdicts)]
    zero = all(v.accepted for v in verdicts)
    criterion = 1 if p["tester"] == "junta" else 2
    return ExperimentResult("completeness", ["trial", "accepted", "queries"], rows,
                            {"zero rejections on members": (criterion, zero)})


def _soundness(cfg: ExperimentConfig) -> ExperimentResult:
    p = cfg.params
    s, n, d = p["s"], p["n"], p["d"]
    codomain = _codomain(p["codomain"])
    family = FamilySpec("junta-degree", d, GridDomain.symmetric(s, n), codomain)
    jcfg = JuntaTesterConfig(d, p["k"])
    test = junta_test_recursive if p["form"] == "recursive" else junta_test_rephrased
    rows = []
    positive = True
    for di, delta in enumerate(p["deltas"]):
        for fi in range(p["functions"]):
            target = Fraction(delta).limit_denominator(s**n)
            made = random_function_at_distance(family, target, _rng(cfg.seed, di, fi))
            est = estimate_rejection(made.oracle, lambda f, rng: test(f, jcfg, rng), p["trials"],
                                     seed=(cfg.seed, di, fi))
            if made.measured > 0 and est.rejections == 0:
                positive = False
            rows.append((float(delta), fi, str(made.measured), est.rate, est.ci[0], est.ci[1], est.mean_queries))
    cols = ["delta_target", "function", "delta_exact", "rate", "ci_lo", "ci_hi", "mean_queries"]
    return ExperimentResult("soundness-sweep", cols, rows,
                            {"positive rejection rate whenever distance > 0": (3, positive)})


def _sse(cfg: ExperimentConfig) -> ExperimentResult:
    p = cfg.params
    s, n = p["s"], p["n"]
    N = s**n
    lo = max(1, int(np.ceil(p["min_density"] * N)))
    hi = int(np.floor(p["max_density"] * N))
    rows = []
    ok_all = True
    for a in range(p["sets"]):
        rng = _rng(cfg.seed, a)
        size = int(rng.integers(lo, hi + 1))
        table = np.zeros(N, dtype=bool)
        table[rng.choice(N, size=size, replace=False)] = True
        table = table.reshape((s,) * n)
        for nu in p["nus"]:
            r = sse_check(table, Fraction(nu), s, n)
            if r.asserted:
                ok_all &= r.ok
            rows.append((a, str(r.nu), float(r.delta), float(r.lhs), r.bound, str(r.ok).lower()))
    cols = ["set", "nu", "delta", "lhs", "bound", "ok"]
    assertions = {"collision probability <= 2 delta^(1+lambda)": (7, ok_all)} if s >= 3 else {}
    return ExperimentResult("sse-sweep", cols, rows, assertions)


def _sigma(cfg: ExperimentConfig) -> ExperimentResult:
    p = cfg.params
    rows = []
    for r in p["r"]:
        for k in p["k"]:
            if r < k:
                continue
            rng = _rng(cfg.seed, r, k)
            good = 0
            for _ in range(p["samples"]):
                fibers = np.bincount(sample_sigma(r, k, rng), minlength=k)
                good += bool(np.all(4 * k * fibers >= r))
            rows.append((r, k, p["samples"], good / p["samples"]))
    return ExperimentResult("sigma-goodness", ["r", "k", "samples", "good_fraction"], rows)


def _impossibility(cfg: ExperimentConfig) -> ExperimentResult:
    p = cfg.params
    rows = []
    bound_ok = cert_ok = True
    for n in p["n"]:
        grid = AsymmetricGrid.canonical(n)
        for ell in p["l"]:
            rng = _rng(cfg.seed, n, ell)
            for m in range(p["trials"]):
                M = grid.random_query_matrix(ell, rng)
                frac = bad_fraction(M, grid)
                collisions, verified = verify_all_certificates(M, grid)
                bound_ok &= frac <= Fraction(3**ell, n)
                cert_ok &= collisions == verified
                rows.append((n, ell, m, str(frac), float(frac), collisions, verified))
    cols = ["n", "l", "matrix", "bad_fraction", "bad_fraction_float", "collisions", "certified"]
    return ExperimentResult("impossibility", cols, rows, {
        "bad fraction <= 3^l / n": (12, bound_ok),
        "every collision certified": (12, cert_ok),
    })


def _crosscheck(cfg: ExperimentConfig) -> ExperimentResult:
    p = cfg.params
    s, n = p["s"], p["n"]
    group = AbelianGroup.parse(p["codomain"])
    rng = _rng(cfg.seed)
    rows = []
    agree = True
    for i in range(p["functions"]):
        table = np.stack([rng.integers(0, m, size=(s,) * n) for m in group.orders], axis=-1)
        a = junta_degree_of_table(table, group)
        b = junta_degree_by_definition(table, group)
        agree &= a == b
        rows.append((i, a, b))
    return ExperimentResult("oracle-crosscheck", ["function", "interpolation", "definition"], rows,
                            {"interpolation degree equals definition": (4, agree)})


RUNNERS = {
    "completeness": _completeness,
    "soundness-sweep": _soundness,
    "sse-sweep": _sse,
    "sigma-goodness": _sigma,
    "impossibility": _impossibility,
    "oracle-crosscheck": _crosscheck,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    result = RUNNERS[cfg.kind](cfg)
    if cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            fh.write(result.csv_text())
    return result
