import json

import numpy as np
import pytest

import crossproj.oracle as oracle_mod
from crossproj import CaseTag, classify, project
from crossproj.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestProjectCommand:
    def test_scalar_generic_json(self, capsys):
        code, out, _ = run(capsys, "project", "--x0", "2", "--y0", "1")
        assert code == 0
        doc = json.loads(out)
        assert doc["case"] == "generic"
        assert doc["set_valued"] is False
        assert doc["lambda"] == 0.5
        assert doc["dist_sq"] == 1.0
        assert doc["points"][0]["x"] == [2.0]
        assert doc["points"][0]["y"] == [0.0]
        assert doc["tolerances"]["orth"] == 1e-12

    def test_orthogonal_input(self, capsys):
        code, out, _ = run(capsys, "project", "--x0", "1,0", "--y0", "0,1")
        assert code == 0
        doc = json.loads(out)
        assert doc["case"] == "orthogonal"
        assert doc["dist"] == 0.0

    def test_degenerate_lists_canonical(self, capsys):
        code, out, _ = run(capsys, "project", "--x0", "1,1", "--y0", "1,1")
        assert code == 0
        doc = json.loads(out)
        assert doc["case"] == "degenerate_plus"
        assert doc["set_valued"] is True
        assert doc["lambda"] is None
        assert doc["dist_sq"] == 2.0
        assert [p["selection"] for p in doc["points"]] == ["base", "alternate"]

    def test_seventeen_digit_roundtrip(self, capsys):
        code, out, _ = run(capsys, "project", "--x0", "1,2", "--y0", "3,1")
        doc = json.loads(out)
        res = project(np.array([1.0, 2.0]), np.array([3.0, 1.0]))
        assert doc["lambda"] == res.lam  # lossless float rendering
        assert doc["points"][0]["x"] == list(res.point.x)

    def test_reprojection_of_output_is_orthogonal(self, capsys):
        code, out, _ = run(capsys, "project", "--x0", "1,2", "--y0", "3,1")
        doc = json.loads(out)
        p = doc["points"][0]
        x = np.array(p["x"])
        y = np.array(p["y"])
        assert classify(x, y) is CaseTag.ORTHOGONAL
        assert 2.0 * project(x, y).half_dist_sq <= 1e-9

    def test_csv_and_plain_formats(self, capsys):
        code, out, _ = run(capsys, "project", "--x0", "2", "--y0", "1", "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "case,selection,lambda,half_dist_sq,dist,x_0,y_0"
        assert lines[1].startswith("generic,unique,0.5,")
        code, out, _ = run(capsys, "project", "--x0", "2", "--y0", "1", "--format", "plain")
        assert code == 0
        assert "case: generic" in out

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "result.json"
        code, out, _ = run(
            capsys, "project", "--x0", "2", "--y0", "1", "--output", str(target)
        )
        assert code == 0
        assert out == ""
        assert json.loads(target.read_text())["case"] == "generic"

    def test_input_file(self, capsys, tmp_path):
        doc = {"dim": 2, "x0": [1.0, 2.0], "y0": [3.0, 1.0]}
        path = tmp_path / "point.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run(capsys, "project", "--input", str(path))
        assert code == 0
        assert json.loads(out)["case"] == "generic"

    def test_missing_input_is_parse_error(self, capsys):
        code, _, err = run(capsys, "project")
        assert code == 2
        assert "provide" in err

    def test_file_length_mismatch_is_parse_error(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"dim": 3, "x0": [1.0, 2.0], "y0": [1.0, 2.0, 3.0]}))
        code, _, err = run(capsys, "project", "--input", str(path))
        assert code == 2
        assert "'x0'" in err and "length 2" in err

    def test_file_non_finite_is_parse_error(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"dim": 1, "x0": [NaN], "y0": [1.0]}')
        code, _, err = run(capsys, "project", "--input", str(path))
        assert code == 2
        assert "x0[0]" in err

    def test_file_bad_json_reports_location(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"dim": 1,\n  "x0": [1.0,]\n}')
        code, _, err = run(capsys, "project", "--input", str(path))
        assert code == 2
        assert f"{path}:2:" in err

    def test_inline_non_finite_is_domain_error(self, capsys):
        code, _, err = run(capsys, "project", "--x0", "inf", "--y0", "1")
        assert code == 3
        assert "non-finite" in err

    def test_inline_dim_mismatch_is_domain_error(self, capsys):
        code, _, err = run(capsys, "project", "--x0", "1,2", "--y0", "1")
        assert code == 3

    def test_unknown_flag_is_parse_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["project", "--x0", "1", "--y0", "1", "--frobnicate"])
        assert exc.value.code == 2


class TestFamilyCommand:
    def test_scalar_injective_two_rows(self, capsys):
        code, out, _ = run(
            capsys, "family", "--x0", "1", "--y0", "1", "--count", "3",
            "--mode", "injective",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "u_0,x_0,y_0,objective"
        assert len(lines) == 3  # header + base + one surviving direction

    def test_plane_grid_constant_objective(self, capsys):
        code, out, _ = run(capsys, "family", "--x0", "1,1", "--y0", "1,1", "--count", "5")
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 6
        for line in lines[1:]:
            assert float(line.split(",")[-1]) == pytest.approx(1.0, rel=1e-10)

    def test_count_one_base_row(self, capsys):
        code, out, _ = run(capsys, "family", "--x0", "1", "--y0", "1", "--count", "1")
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 2
        assert lines[1] == "0,0,1,0.5"

    def test_non_degenerate_exits_4(self, capsys):
        code, _, err = run(capsys, "family", "--x0", "1,2", "--y0", "3,1")
        assert code == 4
        assert "generic" in err


class TestCheckCommand:
    def test_small_clean_run(self, capsys):
        code, out, _ = run(
            capsys, "check", "--dims", "1,2", "--trials", "3", "--seed", "0",
            "--resolution", "32",
        )
        assert code == 0
        assert "pass" in out
        assert "FAIL" not in out

    def test_env_seed_used_as_default(self, capsys, monkeypatch):
        monkeypatch.setenv("CROSSPROJ_SEED", "7")
        code, out, _ = run(capsys, "check", "--dims", "1", "--trials", "1")
        assert code == 0
        assert "(seed 7)" in out

    def test_corrupted_build_detected(self, capsys, monkeypatch):
        from crossproj.projection import SingletonProjection, candidate, solve_lambda

        real_project = oracle_mod.project

        def corrupted(x0, y0, tols=None):
            res = real_project(x0, y0)
            if res.tag is CaseTag.GENERIC:
                lams = solve_lambda(x0, y0)
                bad = candidate(lams.lambda_plus, x0, y0)
                q = float(np.dot(x0, y0))
                return SingletonProjection(
                    res.tag, bad, lams.lambda_plus, 0.5 * lams.lambda_plus * q
                )
            return res

        monkeypatch.setattr(oracle_mod, "project", corrupted)
        code, out, _ = run(capsys, "check", "--dims", "2", "--trials", "3", "--seed", "0")
        assert code == 1
        assert "FAIL" in out
        assert "x0 = [" in out  # failing input echoed


class TestSolveCommand:
    def test_generated_orthant_converges_quickly(self, capsys, tmp_path):
        trace = tmp_path / "trace.csv"
        code, out, _ = run(
            capsys, "solve", "--generate", "orthant,1,0", "--method", "ap",
            "--trace", str(trace),
        )
        assert code == 0
        summary = json.loads(out)
        assert summary["converged"] is True
        assert summary["iterations"] <= 5
        lines = trace.read_text().strip().splitlines()
        assert lines[0] == "iteration,residual_C,residual_B,case_tag"
        assert len(lines) == summary["iterations"] + 1

    def test_reruns_byte_identical(self, capsys, tmp_path):
        t1, t2 = tmp_path / "a.csv", tmp_path / "b.csv"
        for t in (t1, t2):
            code, _, _ = run(
                capsys, "solve", "--generate", "orthant,3,4", "--method", "dr",
                "--trace", str(t),
            )
            assert code == 0
        assert t1.read_bytes() == t2.read_bytes()

    def test_instance_file_roundtrip(self, capsys, tmp_path):
        from crossproj import generate_instance, instance_to_dict

        problem, witness = generate_instance("affine", 2, seed=11)
        path = tmp_path / "inst.json"
        path.write_text(json.dumps(instance_to_dict(problem, witness, seed=11)))
        code, out, _ = run(capsys, "solve", "--instance", str(path), "--method", "ap")
        assert code == 0
        assert json.loads(out)["instance"]["kind"] == "affine"

    def test_infeasible_instance_exits_5(self, capsys, tmp_path):
        # boxes pin x = y = 1, so <x, y> = 1 and the cross is unreachable
        doc = {
            "schema": "crossproj/instance/v1",
            "kind": "box",
            "dim": 1,
            "seed": 0,
            "witness": {"x": [1.0], "y": [0.0]},
            "constraint": {
                "lo_x": [1.0], "hi_x": [1.0],
                "lo_y": [1.0], "hi_y": [1.0],
            },
        }
        path = tmp_path / "infeasible.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run(
            capsys, "solve", "--instance", str(path), "--max-iter", "50",
        )
        assert code == 5
        summary = json.loads(out)
        assert summary["converged"] is False
        assert summary["final_residual"] > 0.0

    def test_requires_exactly_one_source(self, capsys):
        code, _, err = run(capsys, "solve")
        assert code == 2
        code, _, err = run(
            capsys, "solve", "--generate", "orthant,1,0", "--instance", "x.json"
        )
        assert code == 2


class TestBenchCommand:
    def test_shape_and_gap_bound(self, capsys):
        code, out, _ = run(capsys, "bench", "--dims", "1,2", "--trials", "40", "--seed", "0")
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 3
        head = lines[0].split(",")
        gap_min_idx = head.index("gap_min")
        for line in lines[1:]:
            assert float(line.split(",")[gap_min_idx]) >= -1e-9

    def test_gap_columns_deterministic(self, capsys):
        outs = []
        for _ in range(2):
            code, out, _ = run(
                capsys, "bench", "--dims", "2", "--trials", "25", "--seed", "3"
            )
            assert code == 0
            row = out.strip().splitlines()[1].split(",")
            outs.append(row[4:])  # gap columns; timing columns excluded
        assert outs[0] == outs[1]
