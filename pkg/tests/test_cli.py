import csv
import io
import json

import numpy as np
import pytest
from click.testing import CliRunner

from bethegeom import errors as err
from bethegeom.cli import ParseError, main, render, run, validate_config
from bethegeom.conventions import kahler_from_twist, twist_squared_from_kahler
from bethegeom.sampling import evaluation_parameters, random_chain


def test_minimal_config_defaults():
    cfg = validate_config('{"chain": {"n": 2}}')
    assert cfg.D == 6 and cfg.precision == "std" and cfg.n == 2
    assert cfg.command == "verify-all"


def test_parse_error():
    with pytest.raises(ParseError):
        validate_config("{not json")


def test_root_of_unity_guard():
    with pytest.raises(err.InvariantViolation, match="root-of-unity"):
        validate_config('{"chain": {"a": [1.0, 2.0], "hbar": 1.0}}')


def test_duplicate_evaluation_parameters():
    with pytest.raises(err.InvariantViolation, match="pairwise distinct"):
        validate_config('{"chain": {"a": [[1.0, 0.5], [1.0, 0.5]]}}')


def test_unknown_fields():
    with pytest.raises(err.InvariantViolation, match="unknown"):
        validate_config('{"chian": {}}')
    with pytest.raises(err.InvariantViolation, match="solver"):
        validate_config('{"solver": {"step": 1}}')


def test_complex_formats():
    cfg = validate_config('{"chain": {"a": [1, "0.5+0.2j", [0.1, -1.0]]}}')
    assert cfg.a == [1, 0.5 + 0.2j, 0.1 - 1j]


def test_bethe_report_two_sites():
    cfg = validate_config('{"command": "bethe", "chain": {"n": 2, "k": 1}, "seed": 4}')
    rep = run(cfg)
    names = [c.name for c in rep.checks]
    assert "bethe_quadratic_oracle" in names
    comp = next(c for c in rep.checks if c.name == "bethe_completeness")
    assert len(comp.inputs["solutions"]) == 2
    assert rep.failed == 0


def test_trs_report_two_sites():
    rep = run(validate_config('{"command": "trs", "chain": {"n": 2}}'))
    lag = [c for c in rep.checks if c.name == "trs_lagrangian"]
    assert [c.inputs["k"] for c in lag] == [1, 2]
    assert all({"H_k", "e_k"} <= set(c.inputs) for c in lag)


def test_empty_suite_selection(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text('{"suites": []}')
    out = tmp_path / "r.json"
    result = CliRunner().invoke(main, ["verify-all", "--config", str(path), "--out", str(out)])
    assert result.exit_code == 0
    assert json.loads(out.read_text())["summary"]["total"] == 0


def test_byte_stable_json(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text('{"chain": {"n": 3}}')
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        CliRunner().invoke(main, ["bethe", "--config", str(path), "--seed", "7", "--out", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] and len(outs[0]) > 0


def test_csv_rows_match_checks():
    cfg = validate_config('{"command": "spectrum", "chain": {"n": 2}}')
    rep = run(cfg)
    rows = list(csv.reader(io.StringIO(render(rep, "csv"))))
    assert rows[0] == ["name", "residual", "tolerance", "pass", "seconds"]
    assert len(rows) - 1 == len(rep.checks)


def test_failed_check_exit_status(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text('{"chain": {"n": 2}}')
    out = tmp_path / "r.csv"
    result = CliRunner().invoke(main, ["trs", "--config", str(path), "--format", "csv", "--out", str(out)])
    # The k = 2 tRS check fails on section data.
    assert result.exit_code == 1 and out.exists()


def test_infrastructure_exit_status(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text('{"chain": {"a": [1.0, 1.0]}}')
    result = CliRunner().invoke(main, ["bethe", "--config", str(path)])
    assert result.exit_code == 2
    result = CliRunner().invoke(main, ["bethe", "--config", str(tmp_path / "missing.json")])
    assert result.exit_code == 2


def test_config_echo_contains_resolved_chain():
    rep = run(validate_config('{"command": "spectrum", "chain": {"n": 2}, "seed": 3}'))
    chain = rep.config["chain"]
    assert len(chain["a"]) == 2 and chain["hbar"] is not None and rep.config["seed"] == 3


def test_sampling_policy():
    rng = np.random.default_rng(0)
    for _ in range(20):
        spec = random_chain(rng, 4)
        assert all(0.5 <= abs(a) <= 2 for a in spec.a)
        assert 0.3 <= abs(spec.hbar) <= 0.7
    assert len(evaluation_parameters(rng, 5)) == 5


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_kahler_dictionary(n):
    h, zeta = 0.5 * np.exp(0.4j), 0.7 * np.exp(1.1j)
    hs, z = kahler_from_twist(h, zeta, n)
    assert abs(hs * h - 1) < 1e-15 and abs(z - (-1) ** n * zeta**2) < 1e-15
    assert abs(twist_squared_from_kahler(z, n) - zeta**2) < 1e-15
