import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rupert_kit import cli
from rupert_kit.verify import SuiteResult

QUICK = ["--sphere-samples", "60", "--angle-samples", "60", "--refine-iters", "10", "--local-rounds", "3"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out) if out else None


json_values = st.recursive(
    st.none()
    | st.booleans()
    | st.integers(-(2**53), 2**53)
    | st.floats(allow_nan=False, allow_infinity=False)
    | st.text(max_size=8),
    lambda kids: st.lists(kids, max_size=4) | st.dictionaries(st.text(max_size=6), kids, max_size=4),
    max_leaves=20,
)


@given(json_values)
@settings(max_examples=300, deadline=None)
def test_dumps_round_trips(value):
    assert json.loads(cli.dumps(value)) == value


def test_dumps_float_format():
    assert cli.dumps(0.1) == "0.10000000000000001"
    assert cli.dumps(1.0) == "1.0"
    assert cli.dumps(float("nan")) == "null"
    assert json.loads(cli.dumps(np.array([1.5, 2.0]))) == [1.5, 2.0]


class TestShadow:
    def test_cube_diagonal(self, capsys):
        code, rep = run_json(capsys, "shadow", "--dims", "1,1,1", "--dir", "1,1,1")
        assert code == 0
        assert list(rep) == ["command", "inputs", "outputs", "checks", "elapsed"]
        assert rep["outputs"]["kind"] == "hexagon"
        assert rep["outputs"]["area"] == pytest.approx(math.sqrt(3), abs=1e-12)
        assert rep["elapsed"] is None

    def test_face_parallel_is_rectangle(self, capsys):
        code, rep = run_json(capsys, "shadow", "--dims", "1,1,1", "--dir", "0,0,1")
        assert code == 0
        assert rep["outputs"]["kind"] == "rectangle"

    def test_box(self, capsys, tmp_path):
        path = tmp_path / "s.json"
        code, out, _ = run(capsys, "shadow", "--dims", "1,2,3", "--dir", "0.3,0.5,0.9", "--json", str(path))
        assert code == 0
        rep = json.loads(path.read_text())
        assert rep["outputs"]["kind"] == "hexagon"
        assert sum(x * x for x in rep["outputs"]["pqr"]) == pytest.approx(1.0, abs=1e-12)
        assert len(rep["outputs"]["polygon"]) == 6

    def test_ambiguous(self, capsys):
        code, _ = run_json(capsys, "shadow", "--dims", "1,2,3", "--dir", "1e-8,1e-8,1")
        assert code == 3

    @pytest.mark.parametrize(
        "dims,direction",
        [("1,1", "1,1,1"), ("1,-1,1", "1,1,1"), ("a,b,c", "1,1,1"), ("1,1,1", "0,0,0"), ("1,1,1", "1,nan,1")],
    )
    def test_invalid_input(self, capsys, dims, direction):
        code, _, err = run(capsys, "shadow", "--dims", dims, "--dir", direction)
        assert code == 2
        assert "error" in err

    def test_svg(self, capsys, tmp_path):
        path = tmp_path / "s.svg"
        code, rep = run_json(capsys, "shadow", "--dims", "1,1,1", "--dir", "1,1,1", "--svg", str(path))
        assert code == 0
        root = ET.fromstring(path.read_text())
        assert root.get("version") == "1.1"


class TestPassage:
    def test_unit_square(self, capsys, tmp_path):
        svg_path = tmp_path / "p.svg"
        code, rep = run_json(capsys, "passage", "--dims", "1,1,1", "--dir", "1,1,1", "--lambda", "1", "--svg", str(svg_path))
        assert code == 0
        cs = rep["outputs"]["cross_section"]
        assert (cs["width"], cs["height"]) == (1.0, 1.0)
        assert all(c["passed"] for c in rep["checks"])
        # svg geometry matches the report
        ns = {"s": "http://www.w3.org/2000/svg"}
        polys = ET.fromstring(svg_path.read_text()).findall(".//s:polygon", ns)
        rect = [[float(v) for v in p.split(",")] for p in polys[-1].get("points").split()]
        assert np.allclose(rect, cs["corners"], atol=1e-9)

    def test_face_parallel(self, capsys):
        code, _ = run_json(capsys, "passage", "--dims", "1,1,1", "--dir", "0,0,1", "--lambda", "1")
        assert code == 4

    def test_near_ceiling(self, capsys):
        code, rep = run_json(capsys, "passage", "--dims", "1,1,1", "--dir", "2,2,1", "--lambda", "1.05")
        assert code == 0
        assert rep["outputs"]["cross_section"]["width"] == pytest.approx(1.05)

    def test_too_large(self, capsys):
        code, _ = run_json(capsys, "passage", "--dims", "1,1,1", "--dir", "2,2,1", "--lambda", "1.2")
        assert code == 4

    def test_bad_lambda(self, capsys):
        code, _, _ = run(capsys, "passage", "--dims", "1,1,1", "--dir", "1,1,1", "--lambda", "-1")
        assert code == 2


class TestNieuwland:
    def test_quick_run(self, capsys):
        code, rep = run_json(capsys, "nieuwland", "--dims", "1,1,2", *QUICK)
        assert code == 0
        assert rep["outputs"]["lambda_star"] > 1
        assert rep["checks"][0]["passed"]
        assert rep["outputs"]["history"]

    def test_deterministic_bytes(self, capsys):
        _, first, _ = run(capsys, "nieuwland", "--dims", "1,2,3", "--seed", "7", *QUICK)
        _, second, _ = run(capsys, "nieuwland", "--dims", "1,2,3", "--seed", "7", *QUICK)
        assert first == second

    def test_timing_flag(self, capsys):
        _, rep = run_json(capsys, "nieuwland", "--dims", "1,1,1", "--timing", *QUICK)
        assert rep["elapsed"] > 0

    def test_invalid_config(self, capsys):
        code, _, _ = run(capsys, "nieuwland", "--dims", "1,1,1", "--sphere-samples", "0")
        assert code == 2


class TestVerify:
    def test_lemma1(self, capsys):
        code, rep = run_json(capsys, "verify", "--suite", "lemma1", "--trials", "1000", "--seed", "1")
        assert code == 0
        pqr = next(c for c in rep["checks"] if c["name"] == "lemma1.pqr_unit_sum")
        assert pqr["measured"] < 1e-12

    def test_lemma4_branches(self, capsys):
        code, rep = run_json(capsys, "verify", "--suite", "lemma4", "--trials", "500")
        assert code == 0
        counters = rep["outputs"]["lemma4"]["counters"]
        assert counters["case1"] > 0 and counters["case2"] > 0

    def test_smoke_all(self, capsys):
        code, rep = run_json(capsys, "verify", "--suite", "all", "--trials", "10")
        assert code == 0
        assert rep["checks"]

    def test_failure_prints_reproducer(self, capsys, monkeypatch):
        def failing(name, trials, seed):
            res = SuiteResult(name, trials, seed)
            res.add("always_fails", False, 1.0, 0.0)
            return [res]

        monkeypatch.setattr(cli, "run_suite", failing)
        code, out, err = run(capsys, "verify", "--suite", "lemma1", "--trials", "5", "--seed", "42")
        assert code == 1
        assert "--seed 42" in err

    def test_unknown_suite(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["verify", "--suite", "nope"])
        assert exc.value.code == 2
