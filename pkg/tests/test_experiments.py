import json

import pytest

from griddeg.experiments import ConfigError, parse_config, run_experiment


def config(kind, **params):
    return json.dumps({"version": 1, "kind": kind, "seed": 3, "params": params})


def test_completeness_passes():
    result = run_experiment(parse_config(config("completeness", trials=20, n=6, k=4)))
    assert result.passed and "PASS" in result.summary()
    assert len(result.rows) == 20


def test_csv_is_deterministic(tmp_path, monkeypatch):
    text = config("soundness-sweep", trials=30, functions=1, deltas=[0, 0.1])
    a = run_experiment(parse_config(text)).csv_text()
    monkeypatch.setenv("GRIDDEG_THREADS", "3")
    b = run_experiment(parse_config(text)).csv_text()
    assert a == b
    out = tmp_path / "out.csv"
    cfg = json.loads(text)
    cfg["output"] = str(out)
    run_experiment(parse_config(json.dumps(cfg)))
    assert out.read_text() == a


def test_sse_sweep_rows():
    result = run_experiment(parse_config(config("sse-sweep", sets=3)))
    assert len(result.rows) == 12
    assert all(row[-1] == "true" for row in result.rows) and result.passed


@pytest.mark.parametrize("kind", ["sigma-goodness", "impossibility", "oracle-crosscheck"])
def test_other_kinds_run(kind):
    small = {"sigma-goodness": {"samples": 200}, "impossibility": {"trials": 5}, "oracle-crosscheck": {"functions": 10}}
    result = run_experiment(parse_config(config(kind, **small[kind])))
    assert result.rows and result.passed


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("{", "line 1"),
        ('{"version": 2, "kind": "sse-sweep", "seed": 0}', "version"),
        ('{"version": 1, "kind": "nope", "seed": 0}', "kind"),
        ('{"version": 1, "kind": "sse-sweep", "seed": 0, "extra": 1}', "unknown keys"),
        ('{"version": 1, "kind": "sse-sweep", "seed": 0, "params": {"sets": "x"}}', "params.sets"),
        ('{"version": 1, "kind": "sse-sweep", "seed": 0, "params": {"bogus": 1}}', "bogus"),
    ],
)
def test_config_errors(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config(text)
