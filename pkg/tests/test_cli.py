import json
import subprocess
import sys

import pytest

from prismsen.cli import DEFAULT_SEED, main, run, verdicts, verify_report


def call(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestCommands:
    def test_construct_b(self, capsys):
        code, rep = call(capsys, "construct-b", "--p", "3", "--n", "3", "--L", "3", "--N", "12")
        assert code == 0
        assert all(c["pass"] for c in rep["ghost_checks"])
        assert rep["params"] == {"p": 3, "n": 3, "L": 3, "N": 12}
        assert rep["precision_used"]["N"] == 12

    def test_construct_b_boundary(self, capsys):
        code, rep = call(capsys, "construct-b", "--p", "3", "--n", "4")
        assert code == 1
        assert rep["first_failure"]["context"] == {"p": 3, "n": 4, "m": 1, "i": 3}

    def test_solve_vf(self, capsys):
        code, rep = call(capsys, "solve-vf", "--p", "3", "--L", "4", "--N", "20")
        assert code == 0
        assert [v["computed"] for v in rep["valuations"]] == [1, 2, 5]
        assert all(v["claimed"] == v["computed"] for v in rep["valuations"])
        x0 = rep["components"][0]
        assert (int(x0["residue"]) + 1) % 3**20 == 0 and x0["N"] >= 20

    @pytest.mark.parametrize("cmd", ["construct-b-general", "construct-c"])
    def test_general(self, capsys, cmd):
        code, rep = call(capsys, cmd, "--p", "3", "--E=-3,0,1", "--n", "2")
        assert code == 0 and rep["params"]["E"] == [-3, 0, 1]

    def test_sen_check_failing_example(self, capsys):
        code, rep = call(capsys, "sen-check")
        assert code == 1
        assert rep["first_failure"]["kind"] == "nilpotence"
        assert rep["nilpotence"]["certificate"] == [1, 0]
        assert rep["leibniz"]["pass"] is True
        assert rep["params"]["seed"] == DEFAULT_SEED

    def test_sen_check_twist(self, capsys):
        code, rep = call(capsys, "sen-check", "--p", "5", "--twist", "2", "--n", "3")
        assert code == 0 and rep["weights"]["weights"] == [2]

    def test_sen_cohomology(self, capsys):
        code, rep = call(capsys, "sen-cohomology", "--p", "3", "--twist", "0", "--n", "3", "--N", "6")
        assert code == 0
        assert rep["cohomology"]["H0"] == ["p^6"] and rep["cohomology"]["H1"] == ["p^6"]

    def test_sen_module_file(self, capsys, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"ring": {"p": 3, "E": ["-3", "1"], "n": 2, "N": 6}, "rank": 1, "theta": [[["1", "0"]]]}))
        code, rep = call(capsys, "sen-check", "--module", str(path))
        assert code == 0

    def test_sen_lattice(self, capsys):
        code, rep = call(capsys, "sen-lattice", "--p", "3", "--n", "2", "--rank", "2")
        assert code == 0 and rep["lattice"]["stable"]

    def test_delta_verify(self, capsys):
        code, rep = call(capsys, "delta-verify", "--p", "3", "--i-max", "3")
        assert code == 0
        assert [c["pass"] for c in rep["eta"]["checks"]] == [True] * 3

    def test_witt_selftest(self, capsys):
        code, rep = call(capsys, "witt-selftest", "--p", "3", "--L", "3", "--trials", "10")
        assert code == 0 and len(rep["results"]) == 5

    def test_out_file(self, capsys, tmp_path):
        out = tmp_path / "r.json"
        code, rep = call(capsys, "solve-vf", "--out", str(out))
        assert json.loads(out.read_text()) == rep


class TestSchema:
    def test_bad_E(self, capsys):
        code, rep = call(capsys, "construct-c", "--p", "3", "--E=1,2")
        assert code == 2 and rep["error"] == "SchemaError"

    def test_not_prime(self, capsys):
        code, _ = call(capsys, "construct-b", "--p", "4")
        assert code == 2

    def test_nonpositive(self, capsys):
        code, _ = call(capsys, "construct-b", "--n", "0")
        assert code == 2

    def test_relations(self, capsys, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"ring": {"p": 3, "E": ["-3", "1"], "n": 1, "N": 4}, "rank": 1, "theta": [["1"]], "relations": [[1]]}))
        code, rep = call(capsys, "sen-check", "--module", str(path))
        assert code == 2 and rep["error"] == "NonFreeModule"

    def test_missing_file(self, capsys, tmp_path):
        code, _ = call(capsys, "sen-lattice", "--module", str(tmp_path / "nope.json"))
        assert code == 2

    def test_argparse_error(self):
        with pytest.raises(SystemExit) as info:
            main(["construct-b", "--p", "x"])
        assert info.value.code == 2

    def test_no_command(self, capsys):
        assert main([]) == 2


class TestReproducibility:
    @pytest.mark.parametrize(
        "command,params",
        [
            ("construct-b", {"p": 3, "n": 3, "L": 3, "N": 12}),
            ("construct-c", {"p": 3, "E": [-3, 0, 1], "n": 2, "L": 3, "N": 10}),
            ("solve-vf", {"p": 5, "L": 3, "N": 15}),
            ("sen-check", {"N": 8, "seed": 3}),
            ("sen-lattice", {"p": 3, "n": 2, "rank": 2, "seed": 11}),
            ("delta-verify", {"p": 3, "i_max": 2}),
            ("witt-selftest", {"p": 3, "L": 2, "N": 20, "trials": 5, "seed": 1}),
        ],
    )
    def test_roundtrip(self, command, params):
        report = json.loads(json.dumps(run(command, params)))
        check = verify_report(report)
        assert check["reproduced"]
        assert check["pass"] == report["pass"]

    def test_deterministic_output(self, capsys):
        _, a = call(capsys, "sen-lattice", "--seed", "5")
        _, b = call(capsys, "sen-lattice", "--seed", "5")
        assert a == b

    def test_seed_matters(self, capsys):
        _, a = call(capsys, "sen-lattice", "--seed", "5")
        _, b = call(capsys, "sen-lattice", "--seed", "6")
        assert a["module"] != b["module"]

    def test_tampered_report(self, tmp_path, capsys):
        report = run("construct-b", {"p": 3, "n": 2, "L": 2, "N": 8})
        report["components"][1]["eps"]["coeffs"][0] = "1"
        path = tmp_path / "r.json"
        path.write_text(json.dumps(report))
        code, rep = call(capsys, "--verify-report", str(path))
        assert code == 1 and not rep["reproduced"] and rep["components_match"] is False

    def test_flipped_verdict(self, tmp_path, capsys):
        report = run("solve-vf", {"p": 3, "L": 3, "N": 10})
        report["ghost_checks"][2]["pass"] = False
        path = tmp_path / "r.json"
        path.write_text(json.dumps(report))
        code, rep = call(capsys, "verify-report", str(path))
        assert code == 1 and "/ghost_checks/2/pass" in rep["mismatched_verdicts"]

    def test_verdicts_walk(self):
        assert verdicts({"pass": True, "a": [{"pass": False}]}) == {"/pass": True, "/a/0/pass": False}


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "prismsen.cli", "solve-vf", "--p", "3", "--L", "3", "--N", "10"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["pass"] is True
