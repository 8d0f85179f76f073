import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mehler.cli import ConfigError, RunConfig, main
from mehler.hamiltonics import BoundaryData, energy
from mehler.spectral import OperatorSpec

MEHLER_ORIGIN_HALF = 0.36800519870756081206


def write_config(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def op(n=1, A=None, B=None, **kw):
    d = {"n": n, "A": A if A is not None else np.eye(n).ravel().tolist(), "B": B if B is not None else [0.0] * n * n}
    d.update(kw)
    return d


def read_csv(text):
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
    return rows[0], [[float(v) for v in r] for r in rows[1:]]


def test_kernel_gaussian_grid(tmp_path, capsys):
    cfg = write_config(tmp_path, {"operator": op(), "task": {"points": [[-1.0], [0.0], [1.0]], "times": [0.25]}})
    assert main(["kernel", "--config", cfg]) == 0
    header, rows = read_csv(capsys.readouterr().out)
    assert header == ["x_1", "t", "re", "im"]
    assert len(rows) == 3 and all(r[3] == 0.0 for r in rows)


def test_kernel_hermite_origin(tmp_path, capsys):
    doc = {"operator": op(B=[1.0]), "task": {"grid": {"lo": [-1.0], "hi": [1.0], "points": 3}, "times": [0.5]}}
    assert main(["kernel", "--config", write_config(tmp_path, doc)]) == 0
    _, rows = read_csv(capsys.readouterr().out)
    origin = [r for r in rows if r[0] == 0.0][0]
    assert origin[2] == pytest.approx(MEHLER_ORIGIN_HALF, rel=1e-15)


def test_kernel_singular_time_exit(tmp_path, capsys):
    doc = {"operator": op(B=[-1.0]), "task": {"points": [[0.0]], "times": [math.pi / 2]}}
    assert main(["kernel", "--config", write_config(tmp_path, doc)]) == 3
    assert "1.5707963267948966" in capsys.readouterr().err


def test_kernel_output_file_and_threads(tmp_path, monkeypatch):
    doc = {
        "operator": op(2, B=[1.0, 0.0, 0.0, -0.5], g=[0.3, 0.1], h=0.2),
        "task": {"grid": {"lo": [-1, -1], "hi": [1, 1], "points": [3, 4]}, "times": [0.2, 0.4, 0.6], "x0": [0.1, 0.0]},
    }
    cfg = write_config(tmp_path, doc)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["kernel", "--config", cfg, "--out", str(out1)]) == 0
    monkeypatch.setenv("MEHLER_THREADS", "3")
    assert main(["kernel", "--config", cfg, "--out", str(out2)]) == 0
    assert out1.read_text() == out2.read_text()
    _, rows = read_csv(out1.read_text())
    assert len(rows) == 36
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".tmp-")]


def test_kernel_json_format(tmp_path, capsys):
    cfg = write_config(tmp_path, {"operator": op(), "task": {"points": [[0.0]], "times": [1.0]}})
    assert main(["kernel", "--config", cfg, "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["columns"] == ["x_1", "t", "re", "im"]
    assert doc["rows"][0][2] == pytest.approx((4 * math.pi) ** -0.5)


def test_geodesic_straight_line(tmp_path, capsys):
    doc = {"operator": op(2), "task": {"x0": [0.0, 1.0], "x1": [2.0, -1.0], "t": 1.0, "samples": 5}}
    assert main(["geodesic", "--config", write_config(tmp_path, doc)]) == 0
    _, rows = read_csv(capsys.readouterr().out)
    arr = np.array(rows)
    np.testing.assert_allclose(arr[:, 1], 2 * arr[:, 0], atol=1e-15)
    np.testing.assert_allclose(arr[:, 2], 1 - 2 * arr[:, 0], atol=1e-15)


def test_geodesic_hyperbolic_and_footer(tmp_path, capsys):
    doc = {"operator": op(B=[1.0]), "task": {"x0": [0.0], "x1": [1.0], "t": 1.0, "samples": 11}}
    assert main(["geodesic", "--config", write_config(tmp_path, doc)]) == 0
    text = capsys.readouterr().out
    _, rows = read_csv(text)
    s = np.array(rows)[:, 0]
    np.testing.assert_allclose(np.array(rows)[:, 1], np.sinh(2 * s) / np.sinh(2), atol=1e-14)
    footer = dict(line[2:].split("=") for line in text.splitlines() if line.startswith("#"))
    spec = OperatorSpec(np.eye(1), np.eye(1))
    assert float(footer["E"]) == energy(spec, BoundaryData([0.0], [1.0], 1.0))


def test_riccati_outputs(tmp_path, capsys):
    doc = {"operator": op(), "task": {"times": [0.5]}}
    assert main(["riccati", "--config", write_config(tmp_path, doc), "--format", "json"]) == 0
    c = json.loads(capsys.readouterr().out)["coefficients"][0]
    assert c["alpha"][0] == pytest.approx(-0.5) and c["beta"][0] == pytest.approx(1.0)
    doc = {"operator": op(B=[1.0]), "task": {"times": [0.25]}}
    assert main(["riccati", "--config", write_config(tmp_path, doc), "--format", "json"]) == 0
    c = json.loads(capsys.readouterr().out)["coefficients"][0]
    assert c["alpha"][0] == pytest.approx(-1 / (2 * math.tanh(0.5)), rel=1e-14)


def test_riccati_csv(tmp_path, capsys):
    doc = {"operator": op(2, B=[1.0, 0.0, 0.0, 2.0]), "task": {"times": [0.3, 0.6]}}
    assert main(["riccati", "--config", write_config(tmp_path, doc), "--format", "csv"]) == 0
    header, rows = read_csv(capsys.readouterr().out)
    assert header[0] == "t" and "alpha_3" in header and header[-2:] == ["W", "W_imag"]
    assert len(rows) == 2


def test_riccati_singular_d_exit(tmp_path):
    doc = {"operator": op(2, B=[1.0, 0.0, 0.0, 0.0], g=[1.0, 1.0]), "task": {"times": [0.3]}}
    assert main(["riccati", "--config", write_config(tmp_path, doc)]) == 4


@pytest.mark.parametrize(
    "doc",
    [
        {"task": {}},
        {"operator": {"n": 2, "A": [1.0, 0.0, 0.0], "B": [0.0] * 4}},
        {"operator": {"n": 1, "A": [-1.0], "B": [0.0]}, "task": {"points": [[0.0]], "times": [1.0]}},
        {"operator": {"n": 2, "A": [1.0, 0.0, 0.0, 2.0], "B": [0.0, 1.0, 1.0, 0.0]}, "task": {"points": [[0.0, 0.0]], "times": [1.0]}},
        {"operator": {"n": 1, "A": [1.0], "B": [0.0]}, "task": {"times": [1.0]}},
        {"operator": {"n": 1, "A": [1.0], "B": [0.0]}, "task": {"points": [[0.0]], "times": [-1.0]}},
        {"operator": {"n": 1, "A": [1.0], "B": [0.0]}, "output": {"format": "xml"}},
    ],
)
def test_config_errors_exit_2(tmp_path, doc):
    assert main(["kernel", "--config", write_config(tmp_path, doc)]) == 2


def test_missing_and_invalid_config(tmp_path):
    assert main(["kernel"]) == 2
    assert main(["kernel", "--config", str(tmp_path / "absent.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["kernel", "--config", str(bad)]) == 2


def test_verify_single_suite_and_bad_name(tmp_path, capsys):
    assert main(["verify", "--suite", "ansatz", "--seed", "42"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [s["suite"] for s in doc["suites"]] == ["ansatz"]
    assert main(["verify", "--suite", "bogus"]) == 2
    cfg = write_config(tmp_path, {"task": {"suites": ["lemma", "delta"], "seed": 1}})
    out = tmp_path / "report.json"
    assert main(["verify", "--config", cfg, "--out", str(out)]) == 0
    assert [s["suite"] for s in json.loads(out.read_text())["suites"]] == ["lemma", "delta"]


def test_verify_failing_suite_exit_1(capsys):
    # the closed-form trend value at t = 0.05 sits above the 0.15 threshold
    assert main(["verify", "--suite", "fourier", "--seed", "42"]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["suites"][0]["checks"]["fourier_final"] is False


def test_examples(capsys):
    assert main(["examples"]) == 0
    header, *rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert [r[0] for r in rows] == ["gaussian", "mehler", "ornstein_uhlenbeck"]
    assert float(rows[1][2]) == pytest.approx(MEHLER_ORIGIN_HALF, rel=1e-15)


finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@given(
    n=st.integers(1, 3),
    data=st.data(),
    fmt=st.sampled_from(["csv", "json"]),
    path=st.one_of(st.none(), st.text("abc/._", min_size=1, max_size=10)),
)
def test_config_round_trip(n, data, fmt, path):
    A = data.draw(st.lists(finite, min_size=n * n, max_size=n * n))
    B = data.draw(st.lists(finite, min_size=n * n, max_size=n * n))
    f = data.draw(st.lists(finite, min_size=n, max_size=n))
    h = data.draw(finite)
    cfg = RunConfig(n=n, A=A, B=B, f=f, g=[0.0] * n, h=h, task={"times": [0.5]}, format=fmt, path=path)
    again = RunConfig.parse(cfg.emit())
    assert again == cfg
    assert again.emit() == cfg.emit()


def test_config_accepts_nested_matrices():
    cfg = RunConfig.from_dict({"operator": {"n": 2, "A": [[1, 0], [0, 2]], "B": [[0, 0], [0, 0]]}})
    assert cfg.A == [1.0, 0.0, 0.0, 2.0]
    with pytest.raises(ConfigError):
        RunConfig.parse("[]")
