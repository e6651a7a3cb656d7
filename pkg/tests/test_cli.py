import json
import math

import pytest

from resonator_lab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestScalarCommands:
    def test_psi(self, capsys):
        code, out, _ = run(capsys, "psi", "--x", "10", "--y", "3")
        assert code == 0 and out == "7\n"

    def test_psiq(self, capsys):
        code, out, _ = run(capsys, "psiq", "--x", "10", "--y", "3", "--q", "2")
        assert code == 0 and out == "3\n"

    def test_enumerate(self, capsys):
        code, out, _ = run(capsys, "enumerate", "--x", "10", "--y", "3")
        assert code == 0
        assert out.split() == ["1", "2", "3", "4", "6", "8", "9"]

    def test_enumerate_json(self, capsys):
        code, out, _ = run(capsys, "enumerate", "--x", "10", "--y", "3", "--format", "json")
        assert json.loads(out)["values"] == [1, 2, 3, 4, 6, 8, 9]

    def test_delta_text(self, capsys):
        code, out, _ = run(capsys, "delta", "--q", "5", "--x", "2")
        value, witness = out.split()
        assert float(value) == pytest.approx(math.sqrt(2), abs=1e-11)
        assert witness == "witness_index=1"
        assert value == "1.41421356237"  # 12 significant digits

    def test_alpha(self, capsys):
        code, out, _ = run(capsys, "alpha", "--x", "4", "--y", "2")
        assert float(out.split()[0]) == pytest.approx(math.log2(1.5))


class TestRecordCommands:
    def test_charsum_csv(self, capsys):
        code, out, _ = run(capsys, "charsum", "--q", "5", "--x", "4", "--format", "csv")
        lines = out.strip().splitlines()
        assert lines[0] == "char_index,re,im,abs"
        assert len(lines) == 5

    def test_resonate_json(self, capsys):
        code, out, _ = run(capsys, "resonate", "--q", "99991", "--x", "1000", "--c", "0.24")
        obj = json.loads(out)
        assert obj["q"] == 99991
        assert obj["friable_minorant"] > 0
        assert obj["bound_all"] >= obj["friable_minorant"] - 1e-9

    def test_resonate_check_trunc(self, capsys):
        code, out, _ = run(
            capsys, "resonate", "--q", "997", "--x", "20", "--c", "0.2",
            "--check-trunc", "2000",
        )
        obj = json.loads(out)
        assert obj["orthogonality_residual"] <= 1e-8
        assert obj["convolution_residual"] <= 1e-8
        assert obj["convolution_min_inner"] >= 0.0

    def test_verify_chain_ok(self, capsys):
        code, out, _ = run(
            capsys, "verify", "--q", "99991", "--x", "1000", "--c", "0.24", "--eps", "0.1"
        )
        assert code == 0
        obj = json.loads(out)
        (record,) = obj["records"]
        assert record["chain_ok"] is True
        assert "timings" not in record

    def test_verify_timings_flag(self, capsys):
        _, out, _ = run(
            capsys, "verify", "--q", "1009", "--x", "31", "--c", "0.24", "--timings"
        )
        assert "timings" in json.loads(out)["records"][0]

    def test_sweep_csv(self, capsys):
        code, out, _ = run(
            capsys,
            "sweep", "--q-list", "1009,2003", "--x-list", "31", "--c", "0.24",
            "--format", "csv",
        )
        lines = out.strip().splitlines()
        assert len(lines) == 3
        assert lines[0].startswith("q,x,")

    def test_conjecture(self, capsys):
        code, out, _ = run(capsys, "conjecture", "--q", "997", "--x", "300", "--top", "2")
        obj = json.loads(out)
        assert len(obj["rows"]) == 2

    def test_levels(self, capsys):
        code, out, _ = run(capsys, "levels", "--q", "1000003", "--x", "1000")
        obj = json.loads(out)
        assert obj["largest"] == "transition_level"


class TestContract:
    def test_usage_error_exit_2(self):
        with pytest.raises(SystemExit) as err:
            main(["psi", "--x", "10"])  # missing --y
        assert err.value.code == 2

    def test_unknown_command_exit_2(self):
        with pytest.raises(SystemExit) as err:
            main(["frobnicate"])
        assert err.value.code == 2

    def test_runtime_error_exit_1_with_code(self, capsys):
        code, _, err = run(capsys, "psi", "--x", "10", "--y", "1")
        assert code == 1
        assert err.startswith("error:DOMAIN ")

    def test_budget_error_code(self, capsys):
        code, _, err = run(capsys, "enumerate", "--x", "100000", "--y", "3", "--budget", "10")
        assert code == 1
        assert err.startswith("error:BUDGET ")

    def test_env_budget_override(self, capsys, monkeypatch):
        monkeypatch.setenv("RESONATOR_LAB_BUDGET", "10")
        code, _, err = run(capsys, "enumerate", "--x", "100000", "--y", "3")
        assert code == 1 and err.startswith("error:BUDGET ")

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "out.json"
        code, out, _ = run(capsys, "delta", "--q", "5", "--x", "2", "--format", "json",
                           "--output", str(target))
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["witness_index"] == 1

    def test_identical_argv_identical_bytes(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        argv = ["verify", "--q", "1009", "--x", "31", "--c", "0.24"]
        assert main(argv + ["--output", str(a)]) == 0
        assert main(argv + ["--output", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_sweep_workers_identical_bytes(self, tmp_path, capsys):
        serial, parallel = tmp_path / "s.json", tmp_path / "p.json"
        base = ["sweep", "--q-list", "1009,2003", "--x-list", "31", "--c", "0.24"]
        assert main(base + ["--workers", "1", "--output", str(serial)]) == 0
        assert main(base + ["--workers", "2", "--output", str(parallel)]) == 0
        capsys.readouterr()
        assert serial.read_bytes() == parallel.read_bytes()

    def test_json_roundtrip(self, capsys):
        for argv in (
            ["verify", "--q", "1009", "--x", "31", "--c", "0.24"],
            ["levels", "--q", "1000003", "--x", "100"],
            ["alpha", "--x", "100", "--y", "5", "--format", "json"],
        ):
            code, out, _ = run(capsys, *argv)
            assert code == 0
            json.loads(out)
