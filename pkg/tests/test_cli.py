import csv
import io
import json
import math

import pytest

from markovflight.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_eval_csv(capsys):
    code, out = run(capsys, "eval", "--m", "3", "--lambda", "1", "--c", "1", "--a", "0.5", "1", "--t", "1", "2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# markovflight eval csv v1"
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    assert len(rows) == 4
    for row in rows:
        assert abs(float(row["value_bessel"]) - float(row["value_time"])) <= 1e-8


def test_eval_json_is_finite(capsys):
    code, out = run(capsys, "eval", "--m", "4", "--a", "1", "--t", "0.5", "--format", "json")
    assert code == 0
    obj = json.loads(out)
    text = json.dumps(obj)
    assert "NaN" not in text and "Infinity" not in text


def test_output_is_reproducible(capsys):
    args = ("eval", "--m", "5", "--lambda", "2", "--a", "0.3", "2", "--t", "0.7")
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_coeffs_json(capsys):
    code, out = run(capsys, "coeffs", "--kind", "time", "--m", "3", "--n", "8")
    assert code == 0
    obj = json.loads(out)
    assert obj["text"] == "l^7 - 2*l^5*v + 22/15*l^3*v^2 - 44/105*l*v^3"
    assert set(obj) == {"kind", "m", "n", "poly", "text"}
    for method in ("determinant", "split"):
        assert json.loads(run(capsys, "coeffs", "--kind", "time", "--m", "3", "--n", "8", "--method", method)[1]) == obj


def test_moments(capsys):
    code, out = run(capsys, "moments", "--m", "3", "--lambda", "5", "--c", "3", "--t", "0.3")
    assert code == 0
    obj = json.loads(out)
    assert abs(obj["value_at_t"] - 0.00183921) <= 5e-9
    assert obj["extension"] is False


@pytest.mark.parametrize(
    "argv",
    [
        ("eval", "--m", "2", "--a", "1", "--t", "1"),
        ("eval", "--m", "3", "--a", "1", "--t", "0"),
        ("eval", "--m", "3", "--a", "-1", "--t", "1"),
        ("simulate", "--m", "3", "--t", "1", "--samples", "0"),
    ],
)
def test_bad_input_exit_two(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(list(argv))
        raise SystemExit(code)
    assert exc.value.code == 2


def test_laplace_check(capsys, tmp_path):
    target = tmp_path / "out.json"
    code = main(["laplace-check", "--m", "3", "--a", "1", "--s", "2", "-o", str(target)])
    assert code == 0
    obj = json.loads(target.read_text())
    assert obj["ok"] and obj["abs_diff"] <= 1e-6
    code, _ = run(capsys, "laplace-check", "--m", "3", "--a", "1", "--s", "2", "--tol", "1e-14")
    assert code == 1


def test_simulate_json(capsys):
    code, out = run(capsys, "simulate", "--m", "3", "--t", "1", "--samples", "2000", "--workers", "2", "--seed", "3")
    assert code == 0
    obj = json.loads(out)
    assert obj["workers"] == 2 and obj["samples"] == 2000
    assert all(math.isfinite(x) for x in obj["mean"] + obj["stderr"])
    assert run(capsys, "simulate", "--m", "3", "--t", "1", "--samples", "2000", "--workers", "2", "--seed", "3")[1] == out


def test_compare_quick_and_fault(capsys):
    code, out = run(capsys, "compare", "--samples", "10000")
    assert code == 0
    assert json.loads(out)["ok"] is True
    code, out = run(capsys, "compare", "--samples", "10000", "--inject-fault")
    assert code == 1
    checks = json.loads(out)["checks"]
    assert not checks["series_vs_series"]["ok"]
    assert not checks["laplace_roundtrip"]["ok"]
