import json
import os

import numpy as np
import pytest

from jointeig import io as jio
from jointeig.cli import cli_main
from jointeig.mep import MepProblem
from jointeig.polyroots import grid_multiplication_matrices
from jointeig.synth import example1_spec, make_family


def run(capsys, argv):
    code = cli_main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def read_tree(root):
    out = {}
    for name in sorted(os.listdir(root)):
        with open(os.path.join(root, name), "rb") as fh:
            out[name] = fh.read()
    return out


@pytest.fixture
def family_file(tmp_path):
    family, _, _ = make_family(example1_spec())
    path = tmp_path / "family.json"
    jio.write_family(family, str(path))
    return str(path)


class TestSolveJoint:
    def test_byte_identical_reruns(self, capsys, tmp_path, family_file):
        out_a, out_b = str(tmp_path / "a"), str(tmp_path / "b")
        code1, stdout1, _ = run(capsys, ["solve-joint", "--mode", "rq2", "--seed", "7", "--out", out_a, family_file])
        code2, stdout2, _ = run(capsys, ["solve-joint", "--mode", "rq2", "--seed", "7", "--out", out_b, family_file])
        assert code1 == code2 == 0
        assert stdout1 == stdout2
        assert read_tree(out_a) == read_tree(out_b)

    def test_output_is_valid_result_doc(self, capsys, family_file):
        code, stdout, _ = run(capsys, ["solve-joint", family_file])
        assert code == 0
        doc = json.loads(stdout)
        assert doc["kind"] == "joint-result"
        assert len(doc["tuples"]) == 7
        assert doc["mode"] == "RQ2"


class TestSolveMep:
    def test_solves_file(self, capsys, tmp_path):
        rng = np.random.default_rng(3)
        prob = MepProblem([[rng.standard_normal((2, 2)) for _ in range(3)] for _ in range(2)])
        path = tmp_path / "mep.json"
        jio.write_mep(prob, str(path))
        code, stdout, _ = run(capsys, ["solve-mep", str(path), "--seed", "2"])
        assert code == 0
        doc = json.loads(stdout)
        assert doc["kind"] == "mep-solution"
        assert len(doc["eigenvalues"]) == 4

    def test_singular_problem_exit_code_and_diagnostic(self, capsys, tmp_path):
        e = np.eye(2)
        prob = MepProblem([[e, e, e], [e, e, e]])
        path = tmp_path / "singular.json"
        jio.write_mep(prob, str(path))
        code, _, stderr = run(capsys, ["solve-mep", str(path)])
        assert code == 2
        assert "condition estimate" in stderr

    def test_missing_file_is_io_error(self, capsys):
        code, _, stderr = run(capsys, ["solve-mep", "/nonexistent/problem.json"])
        assert code == 3


class TestSolveRoots:
    def test_roots_with_residuals(self, capsys, tmp_path):
        fam = grid_multiplication_matrices([[1.0, -3.0, 2.0], [1.0, 2.5, -1.5]])
        mult_path = tmp_path / "mult.json"
        jio.write_mult(fam, str(mult_path))
        sys_doc = {
            "kind": "polysystem",
            "s": 2,
            "polynomials": [
                [[[1, 0], [2, 0]], [[-3, 0], [1, 0]], [[2, 0], [0, 0]]],
                [[[1, 0], [0, 2]], [[2.5, 0], [0, 1]], [[-1.5, 0], [0, 0]]],
            ],
        }
        sys_path = tmp_path / "system.json"
        sys_path.write_text(json.dumps(sys_doc))
        code, stdout, _ = run(
            capsys, ["solve-roots", str(mult_path), "--system", str(sys_path), "--seed", "5"]
        )
        assert code == 0
        doc = json.loads(stdout)
        assert doc["kind"] == "roots-result"
        assert max(doc["system_residuals"]) <= 1e-8


class TestSynth:
    @pytest.mark.parametrize("preset", ["ex1", "ex2", "ex3", "ex5"])
    def test_presets_write_loadable_families(self, capsys, tmp_path, preset):
        out = str(tmp_path / preset)
        code, _, _ = run(capsys, ["synth", preset, "--out", out, "--seed", "1"])
        assert code == 0
        fam = jio.read_family(os.path.join(out, f"{preset}_family.json"))
        assert fam.n in (6, 7)

    def test_three_param_preset(self, capsys, tmp_path):
        out = str(tmp_path / "tp")
        code, _, _ = run(capsys, ["synth", "three-param", "--size", "3", "--out", out])
        assert code == 0
        prob = jio.read_mep(os.path.join(out, "three_param_mep.json"))
        assert prob.sizes == (3, 3, 3)


class TestExperiment:
    def test_table1_layout(self, capsys, tmp_path):
        out = str(tmp_path / "t1")
        code, _, _ = run(capsys, ["experiment", "table1", "--trials", "25", "--seed", "1", "--out", out])
        assert code == 0
        with open(os.path.join(out, "table1.csv")) as fh:
            header = fh.readline().strip()
        assert header == "epsilon,median_a,bound13,median_b,bound12,p_b_lt_a,p_b_lt_5a"
        report = json.load(open(os.path.join(out, "table1_report.json")))
        assert len(report["levels"]) == 4
        # CDF companions exist and are sorted
        cdfs = [n for n in os.listdir(out) if "cdf" in n]
        assert len(cdfs) == 8

    def test_usage_error_exit_code(self, capsys):
        assert run(capsys, ["experiment", "bogus"])[0] == 1
        assert run(capsys, ["experiment", "table1", "--trials", "0"])[0] == 1

    def test_experiment_rerun_byte_identical(self, capsys, tmp_path):
        out_a, out_b = str(tmp_path / "a"), str(tmp_path / "b")
        args = ["experiment", "dmu", "--trials", "2000", "--seed", "3"]
        code1, stdout1, _ = run(capsys, args + ["--out", out_a])
        code2, stdout2, _ = run(capsys, args + ["--out", out_b])
        assert code1 == code2 == 0
        assert stdout1 == stdout2
        assert read_tree(out_a) == read_tree(out_b)
