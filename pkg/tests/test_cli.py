import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from circle_isometries.circle import Rotation, SineShear, rotation_number
from circle_isometries.cli import (
    SpecError,
    main,
    parse_diffeo_spec,
    parse_range,
    parse_space,
    parse_times,
)

X = np.linspace(0, 1, 23)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_parse_rotation():
    assert parse_diffeo_spec("rot:0.25") == Rotation(0.25)
    assert parse_diffeo_spec("shear:0.5:2") == SineShear(0.5, 2)


def test_parse_power_matches_rotation():
    f = parse_diffeo_spec("pow(rot:0.1,3)")
    assert np.allclose(f(X), Rotation(0.3)(X))


def test_parse_nested_expression():
    f = parse_diffeo_spec(" conj( shear:0.5:1 , rot:0.618 ) ")
    assert abs(rotation_number(f) - 0.618) < 1e-4
    g = parse_diffeo_spec("comp(inv(shear:0.3:1), pow(shear:-0.2:2, -1))")
    assert np.all(np.diff(g(X)) > 0)


@pytest.mark.parametrize(
    "text,pos",
    [
        ("rot:", 4),
        ("conj(shear:0.5:1 rot:0.6)", 17),
        ("spin:1", 0),
        ("rot:0.1 extra", 8),
        ("shear:1.5:1", 0),
        ("pow(rot:0.1,x)", 12),
    ],
)
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(SpecError) as err:
        parse_diffeo_spec(text)
    assert err.value.pos == pos
    assert f"position {pos}" in str(err.value)


def test_parse_helpers():
    assert parse_range("2..5") == [2, 3, 4, 5]
    assert parse_range("1,4,9") == [1, 4, 9]
    assert parse_times("fib:5") == [1, 2, 3, 5, 8]
    assert parse_times("cf:6", parse_diffeo_spec("conj(shear:0.5:1, rot:0.6180339887)")) == [1, 2, 3, 5, 8, 13]
    assert str(parse_space("lp:3")) == "Lppair(3)"
    with pytest.raises(ValueError):
        parse_space("h1")
    with pytest.raises(ValueError):
        parse_range("5..2")


def test_recur_example(capsys):
    code, out, _ = run(
        capsys, "recur", "--diffeo", "conj(shear:0.5:1, rot:0.6180339887)", "--space", "c0", "--times", "fib:10"
    )
    assert code == 0
    table = rows(out)
    assert table[0] == ["time", "residual"]
    res = [float(r[1]) for r in table[1:]]
    assert [int(r[0]) for r in table[1:]] == [1, 2, 3, 5, 8, 13, 21, 34, 55, 89]
    assert all(b < a for a, b in zip(res[2:], res[3:]))


def test_blowup_demo_example(capsys):
    code, out, _ = run(capsys, "blowup-demo", "--p", "1", "--q", "3", "--eps", "0.1", "--nmax", "300")
    assert code == 0
    table = rows(out)
    assert table[0] == ["n", "crossratio", "resolved", "implied_chi_lower_bound"]
    assert float(table[-1][1]) > 1e3
    assert float(table[-1][3]) > 0.85


def test_edelstein_example(capsys):
    code, out, _ = run(capsys, "edelstein", "--dim", "50", "--scan", "2..10")
    assert code == 0
    res = [float(r[2]) for r in rows(out)[1:]]
    assert len(res) == 9 and all(b < a for a, b in zip(res, res[1:]))
    assert rows(out)[-1][1] == "3628800"


def test_json_output_and_file(tmp_path, capsys):
    path = tmp_path / "cf.json"
    code, out, _ = run(capsys, "cf", "--rho", "0.4142135623730951", "--depth", "5", "--format", "json", "--out", str(path))
    assert code == 0 and out == ""
    payload = json.loads(path.read_text())
    assert payload["config"]["depth"] == 5
    assert [r["a"] for r in payload["rows"]] == [2, 2, 2, 2, 2]


def test_validation_errors_exit_two(capsys):
    code, _, err = run(capsys, "rotnum", "--diffeo", "shear:2:1")
    assert code == 2 and "eps" in err
    code, _, err = run(capsys, "recur", "--diffeo", "rot:0.1", "--n", "100")
    assert code == 2 and "power of two" in err
    with pytest.raises(SystemExit) as exc:
        main(["recur"])
    assert exc.value.code == 2


def test_numerical_failure_exits_three(capsys, monkeypatch):
    import circle_isometries.circle as circle_mod

    def stalled(*args, **kwargs):
        raise circle_mod.ConvergenceError("inverse did not converge")

    monkeypatch.setattr(circle_mod, "rotation_number", stalled)
    code, _, err = run(capsys, "rotnum", "--diffeo", "inv(shear:0.9:1)")
    assert code == 3 and "did not converge" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["rotnum", "--diffeo", "conj(shear:0.5:1, rot:0.618)", "--iter", "2000"],
        ["cf", "--diffeo", "conj(shear:0.5:1, rot:0.618)"],
        ["cocycle-check", "--kind", "projective", "--p", "3", "--g1", "shear:0.3:2", "--g2", "rot:0.2"],
        ["drift", "--diffeo", "conj(shear:0.5:1, rot:0.618)", "--vector", "zero", "--space", "l2", "--times", "5,50"],
        ["fixedpoint", "--h", "shear:0.5:1", "--space", "l1", "--n", "512"],
        ["conjugacy", "--h", "shear:0.5:1", "--space", "c0", "--n", "512", "--points", "5"],
        ["euclid", "--dim", "6", "--nmax", "20", "--zero-drift"],
        ["crossratio-scan", "--diffeo", "rot:0.3", "--nmax", "20"],
        ["commute", "--h", "shear:0.5:1", "--space", "l1", "--n", "256"],
    ],
    ids=lambda a: a[0],
)
def test_subcommands_are_deterministic(capsys, argv):
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2 and out1.count("\n") >= 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "circle_isometries", "cf", "--rho", "0.25"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines() == ["n,a,p,q", "1,4,1,4"]
