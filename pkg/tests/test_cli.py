import json
import socket
import subprocess
import sys
import time

import httpx
import pytest

from exphardy.cli import main
from exphardy.radial import random_admissible, write_profile_csv


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestConstantsCommand:
    def test_json_report(self, capsys):
        code, out = run_cli(capsys, "constants", "--n", "2")
        assert code == 0
        body = json.loads(out)
        assert body["sharp_coefficient"] == 0.5
        assert body["c_n"] == 1.0

    def test_invalid_input_exit_code(self, capsys):
        code, out = run_cli(capsys, "constants", "--n", "0.5")
        assert code == 2
        assert json.loads(out)["error"]["type"] == "ValidationError"


class TestDeficitCommand:
    def test_generated(self, capsys):
        code, out = run_cli(capsys, "deficit", "--n", "2", "--seed", "7", "--pieces", "8")
        assert code == 0
        assert json.loads(out)["report"]["deficit"] > 0

    def test_supplied_profile(self, capsys, tmp_path):
        u = random_admissible(4, 6, 9.0, 2.0)
        path = tmp_path / "u.csv"
        write_profile_csv(u, str(path))
        code, out = run_cli(capsys, "deficit", "--n", "2", "--input", str(path))
        assert code == 0
        assert json.loads(out)["source"] == "supplied"

    def test_missing_input_file(self, capsys):
        code, out = run_cli(capsys, "deficit", "--input", "/no/such/file.csv")
        assert code == 2


class TestExtremalCommand:
    def test_profile_to_stdout(self, capsys):
        code, out = run_cli(
            capsys, "extremal", "--n", "2", "--a", "1", "--emit-profile"
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "r,u"
        assert len(lines) == 3001  # header + default node count
        first = lines[1].split(",")
        assert float(first[0]) == 0.0 and float(first[1]) == 0.0

    def test_json_report_includes_mass(self, capsys):
        code, out = run_cli(capsys, "extremal", "--n", "2", "--a", "1")
        assert code == 0
        body = json.loads(out)
        assert body["mass"] == pytest.approx(1.0, abs=1e-6)

    def test_profile_to_file(self, capsys, tmp_path):
        path = tmp_path / "v.csv"
        code, out = run_cli(
            capsys, "extremal", "--n", "2", "--a", "1", "--emit-profile", str(path)
        )
        assert code == 0
        assert json.loads(out)["passed"] is True  # JSON still on stdout
        assert path.read_text().startswith("r,u\n")


class TestReproducibility:
    def test_byte_identical_stdout(self, capsys):
        _, out1 = run_cli(capsys, "deficit", "--n", "2.5", "--seed", "11")
        _, out2 = run_cli(capsys, "deficit", "--n", "2.5", "--seed", "11")
        assert out1 == out2

    def test_byte_identical_files(self, capsys, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        run_cli(capsys, "onofri", "--seeds", "0:5", "--output", str(p1))
        run_cli(capsys, "onofri", "--seeds", "0:5", "--output", str(p2))
        assert p1.read_bytes() == p2.read_bytes()


class TestConfigFile:
    def test_file_supplies_defaults_and_flags_win(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# config\nn=2.5\nseed=11\n")
        code, out = run_cli(capsys, "deficit", "--config", str(cfg))
        assert code == 0
        assert json.loads(out)["report"]["n"] == 2.5
        code, out = run_cli(capsys, "deficit", "--config", str(cfg), "--n", "3")
        assert json.loads(out)["report"]["n"] == 3.0

    def test_unknown_key_rejected(self, capsys, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("n=2\nwhatever=5\n")
        code, out = run_cli(capsys, "deficit", "--config", str(cfg))
        assert code == 2
        assert "whatever" in json.loads(out)["error"]["message"]

    def test_malformed_line(self, capsys, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("n 2\n")
        code, _ = run_cli(capsys, "deficit", "--config", str(cfg))
        assert code == 2


class TestSweepCommand:
    def test_deficit_sweep_csv(self, capsys):
        code, out = run_cli(
            capsys,
            "sweep", "--quantity", "extremal_deficit", "--n", "2",
            "--start", "0.6", "--stop", "10000", "--points", "10",
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "a,lambda0,deficit,closed_energy"
        deficits = [float(line.split(",")[2]) for line in lines[1:]]
        assert all(b < a for a, b in zip(deficits, deficits[1:]))
        assert deficits[-1] < 1e-3

    def test_json_format_option(self, capsys):
        code, out = run_cli(
            capsys,
            "sweep", "--quantity", "rough_constants", "--n", "2",
            "--start", "0.72", "--stop", "2.0", "--points", "5", "--format", "json",
        )
        assert code == 0
        assert len(json.loads(out)["rows"]) == 5

    def test_empty_range_exit_2(self, capsys):
        code, _ = run_cli(
            capsys,
            "sweep", "--quantity", "extremal_deficit",
            "--start", "5", "--stop", "1", "--points", "3",
        )
        assert code == 2

    def test_csv_rejected_elsewhere(self, capsys):
        code, _ = run_cli(capsys, "constants", "--n", "2", "--format", "csv")
        assert code == 2


class TestVerifyCommand:
    def test_named_checks(self, capsys):
        code, out = run_cli(
            capsys, "verify", "--check", "quadrature", "--check", "constants"
        )
        assert code == 0
        body = json.loads(out)
        assert body["passed"] is True
        assert all(c["passed"] for c in body["checks"])

    def test_unknown_check(self, capsys):
        code, _ = run_cli(capsys, "verify", "--check", "nope")
        assert code == 2


@pytest.fixture(scope="class")
def live_server():
    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()
    proc = subprocess.Popen(
        [
            sys.executable, "-m", "uvicorn", "exphardy.service.app:app",
            "--host", "127.0.0.1", "--port", str(port), "--log-level", "error",
        ],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    url = f"http://127.0.0.1:{port}"
    try:
        for _ in range(100):
            try:
                if httpx.get(f"{url}/health", timeout=1.0).status_code == 200:
                    break
            except httpx.TransportError:
                time.sleep(0.1)
        else:
            pytest.fail("service process never became healthy")
        yield url
    finally:
        proc.terminate()
        proc.wait(timeout=10)


class TestRemoteClient:
    def test_remote_matches_local(self, capsys, live_server):
        code, remote = run_cli(
            capsys, "constants", "--n", "2.5", "--server", live_server
        )
        assert code == 0
        _, local = run_cli(capsys, "constants", "--n", "2.5")
        assert remote == local  # thin client: byte-identical either way

    def test_remote_error_is_exit_2(self, capsys, live_server):
        code, out = run_cli(
            capsys, "constants", "--n", "0.5", "--server", live_server
        )
        assert code == 2
        assert json.loads(out)["error"]["type"] == "InvalidParam"

    def test_remote_deficit(self, capsys, live_server):
        code, out = run_cli(
            capsys, "deficit", "--n", "2", "--seed", "7", "--server", live_server
        )
        assert code == 0
        assert json.loads(out)["report"]["deficit"] > 0


class TestOtherCommands:
    def test_shoot(self, capsys):
        code, out = run_cli(
            capsys, "shoot", "--n", "2", "--lambda0", "1", "--nodes", "501"
        )
        assert code == 0
        assert json.loads(out)["sup_error_vs_closed_form"] <= 1e-6

    def test_moser(self, capsys):
        code, out = run_cli(
            capsys, "moser", "--n", "2", "--a", "1", "--beta", "1", "--samples", "5"
        )
        assert code == 0
        body = json.loads(out)
        assert body["max_functional"] <= body["bound"] + 1e-8

    def test_bliss(self, capsys):
        code, out = run_cli(capsys, "bliss", "--k", "2", "--l", "4", "--samples", "3")
        assert code == 0
        assert json.loads(out)["c_b"] == pytest.approx(1.5, rel=1e-12)

    def test_onofri_lambdas(self, capsys):
        code, out = run_cli(capsys, "onofri", "--lambdas", "0.5,2.0")
        assert code == 0
        body = json.loads(out)
        assert all(abs(r["deficit"]) <= 1e-6 for r in body["results"])

    def test_minimize_quick(self, capsys):
        code, out = run_cli(
            capsys,
            "minimize", "--n", "2", "--a", "1", "--r-max", "12", "--nodes", "500",
        )
        assert code == 0
        assert json.loads(out)["converged"] is True
