import io
import json
import math
import os
import re

import pytest

from weakprob import validate_basis
from weakprob.cli import main
from weakprob.formats import roundtrip, write_basis

from conftest import FIXTURES, GOLDEN

UPDATE = os.environ.get("WEAKPROB_UPDATE_GOLDEN") == "1"
VERSION_LINE = re.compile(r'^  "tool_version": ".*",$', re.M)


def run(argv, cwd=FIXTURES):
    out, err = io.StringIO(), io.StringIO()
    old = os.getcwd()
    os.chdir(cwd)
    try:
        code = main(argv, stdout=out, stderr=err)
    finally:
        os.chdir(old)
    return code, out.getvalue(), err.getvalue()


def payload(text):
    return json.loads(text)["payload"]


def error_kind(err):
    lines = [json.loads(line) for line in err.splitlines()]
    return [x["error"] for x in lines if "error" in x]


def strip_version(text):
    return VERSION_LINE.sub('  "tool_version": "*",', text)


GOLDEN_CASES = {
    "kd_zero_z_x.json": ["kd", "zero.json", "z.json", "x.json"],
    "kd_zero_z_x.csv": ["kd", "zero.json", "z.json", "x.json", "--out", "csv"],
    "kd_mixed_z_y.json": ["kd", "mixed.json", "z.json", "y.json"],
    "reconstruct_zero_z_x.json": ["reconstruct", "kd_zero_z_x.json", "z.json", "x.json"],
    "scenario_three-box.json": ["scenario", "three-box"],
    "scenario_hardy.json": ["scenario", "hardy"],
    "scenario_mub-qubit.json": ["scenario", "mub-qubit"],
}


@pytest.mark.parametrize("name", list(GOLDEN_CASES))
def test_golden(name):
    code, out, _ = run(GOLDEN_CASES[name])
    assert code == 0
    path = GOLDEN / name
    if UPDATE:
        path.write_text(out)
    assert strip_version(out) == strip_version(path.read_text())


@pytest.mark.parametrize("name", [n for n in GOLDEN_CASES if n.endswith(".json")])
def test_envelope_roundtrip(name):
    text = (GOLDEN / name).read_text()
    assert roundtrip(text) == text


class TestKd:
    def test_payload(self):
        code, out, _ = run(["kd", "zero.json", "z.json", "x.json"])
        kd = payload(out)["kd"]
        expected = [[[0.5, 0], [0.5, 0]], [[0, 0], [0, 0]]]
        for row, erow in zip(kd, expected):
            for z, ez in zip(row, erow):
                assert z == pytest.approx(ez, abs=1e-15)
        assert payload(out)["marginal_b"] == pytest.approx([0.5, 0.5])

    def test_csv_rows(self):
        code, out, _ = run(["kd", "zero.json", "z.json", "x.json", "--out", "csv"])
        lines = out.splitlines()
        assert lines[0] == "a_label,b_label,re,im"
        assert [line.split(",")[:2] for line in lines[1:]] == [["0", "+"], ["0", "-"], ["1", "+"], ["1", "-"]]

    def test_bad_norm(self):
        code, out, err = run(["kd", "bad_norm.json", "z.json", "x.json"])
        assert code == 2 and out == ""
        assert "norm" in err and "bad_norm.json" in err

    def test_dimension_mismatch(self):
        code, out, err = run(["kd", "zero.json", "z.json", "boxes.json"])
        assert code == 3 and error_kind(err) == ["DimensionMismatch"]

    def test_missing_file(self):
        code, _, err = run(["kd", "nope.json", "z.json", "x.json"])
        assert code == 2 and "nope.json" in err

    def test_unknown_flag(self):
        code, _, err = run(["kd", "zero.json", "z.json", "x.json", "--bogus"])
        assert code == 2 and error_kind(err) == ["UsageError"]


class TestReconstruct:
    def test_roundtrip_through_files(self, tmp_path):
        code, out, _ = run(["kd", "mixed.json", "z.json", "y.json"])
        (tmp_path / "kd.json").write_text(out)
        code, out, err = run(["reconstruct", str(tmp_path / "kd.json"), "z.json", "y.json"])
        assert code == 0
        rho = payload(out)["rho"]
        expected = [[[0.7, 0.0], [0.2, -0.1]], [[0.2, 0.1], [0.3, 0.0]]]
        for row, erow in zip(rho, expected):
            for z, ez in zip(row, erow):
                assert z == pytest.approx(ez, abs=1e-9)
        assert any("hermiticity" in w for w in json.loads(out)["warnings"])

    def test_orthogonal_pair(self, tmp_path):
        code, out, _ = run(["kd", "zero.json", "z.json", "z.json"])
        (tmp_path / "kd.json").write_text(out)
        code, out, err = run(["reconstruct", str(tmp_path / "kd.json"), "z.json", "z.json"])
        assert code == 4 and out == ""
        assert error_kind(err) == ["OverlapTooSmall"]
        assert "('0', '1')" in err or "('1', '0')" in err

    def test_conditioning_warning(self, tmp_path):
        t = 5e-4
        write_basis(tmp_path / "tilt.json", validate_basis([[math.cos(t), math.sin(t)], [-math.sin(t), math.cos(t)]]))
        z, plus = str(FIXTURES / "z.json"), str(FIXTURES / "plus.json")
        code, out, _ = run(["kd", plus, z, "tilt.json"], cwd=tmp_path)
        (tmp_path / "kd.json").write_text(out)
        code, out, err = run(["reconstruct", "kd.json", z, "tilt.json"], cwd=tmp_path)
        assert code == 0
        env = json.loads(out)
        assert env["payload"]["min_overlap"] == pytest.approx(5e-4, rel=1e-6)
        assert any("minimum basis overlap" in w for w in env["warnings"])

    def test_tag_mismatch(self):
        code, _, err = run(["reconstruct", "kd_zero_z_x.json", "x.json", "z.json"])
        assert code == 2 and error_kind(err) == ["BasisMismatch"]


class TestPredict:
    def test_m_equals_a(self):
        code, out, _ = run(["predict", "mixed.json", "z.json", "x.json", "z.json"])
        assert code == 0
        p = payload(out)
        assert p["predicted"] == pytest.approx([0.7, 0.3], abs=1e-12)
        assert p["max_deviation"] < 1e-9

    def test_selftest(self):
        code, out, _ = run(["predict", "--selftest", "--seed", "3"])
        assert code == 0
        assert payload(out)["max_deviation"] < 1e-9
        assert json.loads(out)["seed"] == 3

    def test_undefined_cells(self):
        code, _, err = run(["predict", "mixed.json", "z.json", "z.json", "x.json"])
        assert code == 4 and error_kind(err) == ["UndefinedCells"]

    def test_missing_arguments(self):
        code, _, err = run(["predict", "mixed.json"])
        assert code == 2

    def test_selftest_only_for_predict(self):
        code, _, _ = run(["kd", "zero.json", "z.json", "x.json", "--selftest"])
        assert code == 2


class TestWeakValue:
    def test_three_box(self):
        code, out, _ = run(["weakvalue", "box_pre.json", "box_post.json", "box3.json", "--hbar", "1.5"])
        p = payload(out)
        assert code == 0
        assert p["weak_value"] == pytest.approx([-1, 0], abs=1e-12)
        assert p["action"] == pytest.approx(math.pi * 1.5, abs=1e-12)

    @pytest.mark.parametrize("hbar, action", [(1.0, math.pi / 4), (2.0, math.pi / 2)])
    def test_mub_qubit(self, hbar, action):
        code, out, _ = run(["weakvalue", "zero.json", "plus.json", "y_plus.json", "--hbar", str(hbar)])
        p = payload(out)
        assert p["weak_value"] == pytest.approx([0.5, 0.5], abs=1e-12)
        assert p["action"] == pytest.approx(action, abs=1e-12)

    def test_zero_weak_value(self, tmp_path):
        (tmp_path / "minus.json").write_text(json.dumps(
            {"schema_version": "1", "dim": 2, "kind": "pure",
             "amplitudes": [[0.7071067811865476, 0], [-0.7071067811865476, 0]]}))
        code, out, err = run(["weakvalue", str(FIXTURES / "zero.json"), str(FIXTURES / "plus.json"), "minus.json"],
                             cwd=tmp_path)
        assert code == 4
        assert payload(out)["action"] is None
        assert error_kind(err) == ["ZeroWeakValue"]

    def test_orthogonal_pre_post(self, tmp_path):
        (tmp_path / "one.json").write_text(json.dumps(
            {"schema_version": "1", "dim": 2, "kind": "pure", "amplitudes": [[0, 0], [1, 0]]}))
        zero = str(FIXTURES / "zero.json")
        code, out, err = run(["weakvalue", zero, "one.json", zero], cwd=tmp_path)
        assert code == 4 and out == "" and error_kind(err) == ["OverlapTooSmall"]

    def test_mixed_state_rejected(self):
        code, _, _ = run(["weakvalue", "mixed.json", "plus.json", "zero.json"])
        assert code == 2


class TestSimulate:
    def test_exact(self):
        code, out, _ = run(["simulate", "mixed.json", "z.json", "x.json", "--coupling", "0.01"])
        assert code == 0
        p = payload(out)
        assert p["max_deviation"] <= 10 * 0.01
        assert p["mode"] == "exact"

    def test_sampled_deterministic(self):
        argv = ["simulate", "mixed.json", "z.json", "y.json", "--mode", "sampled", "--shots", "4000", "--seed", "11"]
        first, second = run(argv), run(argv)
        assert first[0] == 0 and first[1] == second[1]
        assert json.loads(first[1])["seed"] == 11

    @pytest.mark.parametrize("extra", [["--mode", "sampled", "--shots", "0"], ["--coupling", "0"], ["--coupling", "2"]])
    def test_input_errors(self, extra):
        code, _, err = run(["simulate", "mixed.json", "z.json", "x.json", *extra])
        assert code == 2

    def test_null_cells(self):
        code, out, err = run(["simulate", "zero.json", "x.json", "z.json"])
        env = json.loads(out)
        assert code == 0
        assert env["payload"]["estimate"][0][1] is None and env["payload"]["deviation"][1][1] is None
        assert sum("PostselectionImpossible" in w for w in env["warnings"]) == 2

    def test_csv(self):
        code, out, _ = run(["simulate", "mixed.json", "z.json", "x.json", "--out", "csv"])
        assert out.splitlines()[0] == "a_label,b_label,re,im,std_re,std_im,exact_re,exact_im"


class TestScenario:
    @pytest.mark.parametrize("name, values", [("three-box", [1, 1, -1]), ("hardy", [-1, 1, 1, 0])])
    def test_pass(self, name, values):
        code, out, _ = run(["scenario", name])
        p = payload(out)
        assert code == 0 and p["passed"]
        assert [z[0] for z in p["expected_weak_values"]] == values

    def test_unknown(self):
        code, _, err = run(["scenario", "nosuch"])
        assert code == 2 and "three-box" in err

    def test_csv_not_supported(self):
        code, _, _ = run(["scenario", "hardy", "--out", "csv"])
        assert code == 2

    def test_hbar_scales_action(self):
        _, out, _ = run(["scenario", "mub-qubit", "--hbar", "2"])
        assert [e["action"] for e in payload(out)["entries"]] == pytest.approx([math.pi / 2, -math.pi / 2])
