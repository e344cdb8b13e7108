"""End-to-end command line coverage via subprocesses."""

import json
import os
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "aee.cli"]


def invoke(args, cwd, env_extra=None, stdin=None):
    env = dict(os.environ)
    env["AEE_TEST_MODE"] = "1"
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        CLI + args,
        cwd=str(cwd),
        env=env,
        input=stdin,
        capture_output=True,
        text=True,
        timeout=600,
    )


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """A fully enrolled deployment with one signed message on disk."""
    ws = tmp_path_factory.mktemp("cliws")
    steps = [
        ["setup", "--gpk", "gpk", "--mik", "mik", "--mok", "mok", "--test-seed", "1"],
        ["ukg", "--gpk", "gpk", "--out", "usk1", "--upk-out", "upk1", "--test-seed", "2"],
        ["join-start", "--gpk", "gpk", "--usk", "usk1", "--request", "req1", "--test-seed", "3"],
        [
            "issue", "--gpk", "gpk", "--mik", "mik", "--reg", "reg", "--member-id", "alice",
            "--request", "req1", "--response", "resp1", "--test-seed", "4",
        ],
        ["join-finish", "--gpk", "gpk", "--usk", "usk1", "--response", "resp1", "--gsk", "gsk1"],
        ["ukg", "--gpk", "gpk", "--out", "usk2", "--upk-out", "upk2", "--test-seed", "5"],
        ["join-start", "--gpk", "gpk", "--usk", "usk2", "--request", "req2", "--test-seed", "6"],
        [
            "issue", "--gpk", "gpk", "--mik", "mik", "--reg", "reg", "--member-id", "bob",
            "--request", "req2", "--response", "resp2", "--test-seed", "7",
        ],
        ["join-finish", "--gpk", "gpk", "--usk", "usk2", "--response", "resp2", "--gsk", "gsk2"],
    ]
    for step in steps:
        proc = invoke(step, ws)
        assert proc.returncode == 0, (step, proc.stderr)
    (ws / "msg.txt").write_text("open the barrier")
    sign = invoke(
        ["gsign", "--gpk", "gpk", "--gsk", "gsk1", "--et", "gate-1||201703011000",
         "--msg", "msg.txt", "--sig", "sig1", "--test-seed", "8"],
        ws,
    )
    assert sign.returncode == 0, sign.stderr
    return ws


def test_lifecycle_verify_accepts(workspace):
    proc = invoke(
        ["gver", "--gpk", "gpk", "--et", "gate-1||201703011000", "--msg", "msg.txt", "--sig", "sig1"],
        workspace,
    )
    assert proc.returncode == 0
    assert "accept" in proc.stdout


def test_gsign_prints_token(workspace):
    proc = invoke(
        ["gsign", "--gpk", "gpk", "--gsk", "gsk1", "--et", "gate-1||201703011000",
         "--msg", "msg.txt", "--sig", "sig_tmp", "--test-seed", "9"],
        workspace,
    )
    assert proc.returncode == 0
    assert "token " in proc.stdout


def test_verify_rejects_wrong_message(workspace):
    (workspace / "other.txt").write_text("different payload")
    proc = invoke(
        ["gver", "--gpk", "gpk", "--et", "gate-1||201703011000", "--msg", "other.txt", "--sig", "sig1"],
        workspace,
    )
    assert proc.returncode == 1
    assert "reject" in proc.stdout


def test_verify_rejects_tampered_signature(workspace):
    blob = (workspace / "sig1").read_text().strip()
    flipped = hex(int(blob, 16) ^ (1 << 13))[2:].rjust(len(blob), "0")
    (workspace / "sig_bad").write_text(flipped)
    proc = invoke(
        ["gver", "--gpk", "gpk", "--et", "gate-1||201703011000", "--msg", "msg.txt", "--sig", "sig_bad"],
        workspace,
    )
    assert proc.returncode == 1
    assert proc.stderr == "" or "Traceback" not in proc.stderr


def test_message_from_stdin(workspace):
    proc = invoke(
        ["gver", "--gpk", "gpk", "--et", "gate-1||201703011000", "--msg", "-", "--sig", "sig1"],
        workspace,
        stdin="open the barrier",
    )
    assert proc.returncode == 0


def test_event_signature_lifecycle(workspace):
    (workspace / "cam.txt").write_text("position update")
    sign = invoke(
        ["esign", "--gpk", "gpk", "--usk", "usk1", "--et", "gate-1||201703011000",
         "--sig", "sig1", "--msg", "cam.txt", "--out", "esig1", "--test-seed", "10"],
        workspace,
    )
    assert sign.returncode == 0
    check = invoke(
        ["ever", "--gpk", "gpk", "--et", "gate-1||201703011000", "--sig", "sig1",
         "--esig", "esig1", "--msg", "cam.txt"],
        workspace,
    )
    assert check.returncode == 0
    bad = invoke(
        ["ever", "--gpk", "gpk", "--et", "gate-1||201703011000", "--sig", "sig1",
         "--esig", "esig1", "--msg", "msg.txt"],
        workspace,
    )
    assert bad.returncode == 1


def test_link_same_and_different_signers(workspace):
    same = invoke(
        ["gsign", "--gpk", "gpk", "--gsk", "gsk1", "--et", "gate-1||201703011000",
         "--msg", "msg.txt", "--sig", "sig1b", "--test-seed", "11"],
        workspace,
    )
    assert same.returncode == 0
    other = invoke(
        ["gsign", "--gpk", "gpk", "--gsk", "gsk2", "--et", "gate-1||201703011000",
         "--msg", "msg.txt", "--sig", "sig2", "--test-seed", "12"],
        workspace,
    )
    assert other.returncode == 0
    linked = invoke(
        ["link", "--et", "gate-1||201703011000", "--sig", "sig1", "--msg", "msg.txt",
         "--sig2", "sig1b", "--msg2", "msg.txt"],
        workspace,
    )
    assert linked.returncode == 0
    assert "linked" in linked.stdout
    unlinked = invoke(
        ["link", "--et", "gate-1||201703011000", "--sig", "sig1", "--msg", "msg.txt",
         "--sig2", "sig2", "--msg2", "msg.txt"],
        workspace,
    )
    assert unlinked.returncode == 1


def test_open_and_judge_roundtrip(workspace):
    opened = invoke(
        ["open", "--gpk", "gpk", "--mok", "mok", "--reg", "reg",
         "--et", "gate-1||201703011000", "--msg", "msg.txt", "--sig", "sig1",
         "--proof", "proof1", "--audit", "audit.jsonl", "--test-seed", "13"],
        workspace,
    )
    assert opened.returncode == 0
    assert "alice" in opened.stdout
    lines = (workspace / "audit.jsonl").read_text().strip().splitlines()
    assert json.loads(lines[-1])["outcome"] == "traced"
    good = invoke(
        ["judge", "--gpk", "gpk", "--member-id", "alice", "--upk", "upk1",
         "--sig", "sig1", "--proof", "proof1"],
        workspace,
    )
    assert good.returncode == 0
    framed = invoke(
        ["judge", "--gpk", "gpk", "--member-id", "bob", "--upk", "upk2",
         "--sig", "sig1", "--proof", "proof1"],
        workspace,
    )
    assert framed.returncode == 1


def test_open_refuses_invalid_signature(workspace):
    proc = invoke(
        ["open", "--gpk", "gpk", "--mok", "mok", "--reg", "reg",
         "--et", "gate-1||201703011000", "--msg", "other.txt", "--sig", "sig1",
         "--proof", "proof_x", "--test-seed", "14"],
        workspace,
    )
    assert proc.returncode == 1
    assert not (workspace / "proof_x").exists()


def test_production_mode_rejects_test_seed(workspace, tmp_path):
    proc = invoke(
        ["setup", "--gpk", "g", "--mik", "i", "--mok", "o", "--test-seed", "1"],
        tmp_path,
        env_extra={"AEE_TEST_MODE": "0"},
    )
    assert proc.returncode == 2
    assert "Traceback" not in proc.stderr


def test_missing_file_is_clean_error(workspace):
    proc = invoke(
        ["gver", "--gpk", "nonexistent", "--et", "e", "--msg", "msg.txt", "--sig", "sig1"],
        workspace,
    )
    assert proc.returncode == 2
    assert "error:" in proc.stderr
    assert "Traceback" not in proc.stderr


def test_corrupt_hex_is_clean_error(workspace, tmp_path):
    (tmp_path / "junk").write_text("zz-not-hex")
    (tmp_path / "m").write_text("x")
    proc = invoke(
        ["gver", "--gpk", "junk", "--et", "e", "--msg", "m", "--sig", "junk"],
        tmp_path,
    )
    assert proc.returncode == 2
    assert "Traceback" not in proc.stderr


def test_binary_mode_roundtrip(tmp_path):
    steps = [
        ["setup", "--mode", "bin", "--gpk", "gpk", "--mik", "mik", "--mok", "mok", "--test-seed", "20"],
        ["ukg", "--mode", "bin", "--gpk", "gpk", "--out", "usk", "--upk-out", "upk", "--test-seed", "21"],
        ["join-start", "--mode", "bin", "--gpk", "gpk", "--usk", "usk", "--request", "req", "--test-seed", "22"],
        ["issue", "--mode", "bin", "--gpk", "gpk", "--mik", "mik", "--reg", "reg",
         "--member-id", "carol", "--request", "req", "--response", "resp", "--test-seed", "23"],
        ["join-finish", "--mode", "bin", "--gpk", "gpk", "--usk", "usk", "--response", "resp", "--gsk", "gsk"],
    ]
    for step in steps:
        proc = invoke(step, tmp_path)
        assert proc.returncode == 0, (step, proc.stderr)
    (tmp_path / "m").write_text("payload")
    sig = invoke(
        ["gsign", "--mode", "bin", "--gpk", "gpk", "--gsk", "gsk", "--et", "e1",
         "--msg", "m", "--sig", "sig", "--test-seed", "24"],
        tmp_path,
    )
    assert sig.returncode == 0
    raw = (tmp_path / "gpk").read_bytes()
    assert raw.startswith(b"AEE1")
    check = invoke(
        ["gver", "--mode", "bin", "--gpk", "gpk", "--et", "e1", "--msg", "m", "--sig", "sig"],
        tmp_path,
    )
    assert check.returncode == 0


def test_hex_reader_suggests_bin_mode(tmp_path):
    (tmp_path / "gpk").write_bytes(b"AEE1\x01binarydata")
    (tmp_path / "m").write_text("x")
    proc = invoke(["gver", "--gpk", "gpk", "--et", "e", "--msg", "m", "--sig", "gpk"], tmp_path)
    assert proc.returncode == 2
    assert "bin" in proc.stderr


def test_secret_files_written_restrictively(tmp_path):
    proc = invoke(
        ["setup", "--gpk", "gpk", "--mik", "mik", "--mok", "mok", "--test-seed", "30"],
        tmp_path,
    )
    assert proc.returncode == 0
    assert (os.stat(tmp_path / "mik").st_mode & 0o777) == 0o600
    assert (os.stat(tmp_path / "mok").st_mode & 0o777) == 0o600
    assert (os.stat(tmp_path / "gpk").st_mode & 0o777) != 0o600


def test_issue_rejects_duplicate_member(workspace):
    proc = invoke(
        ["issue", "--gpk", "gpk", "--mik", "mik", "--reg", "reg", "--member-id", "alice",
         "--request", "req1", "--response", "resp_dup", "--test-seed", "31"],
        workspace,
    )
    assert proc.returncode == 2
    assert "alice" in proc.stderr


def test_precompute_schedule_from_events_file(workspace):
    (workspace / "events.txt").write_text("slot-a\nslot-b\nslot-c\n")
    proc = invoke(
        ["precompute", "--gpk", "gpk", "--gsk", "gsk1", "--events", "events.txt",
         "--out", "sched", "--test-seed", "40"],
        workspace,
    )
    assert proc.returncode == 0
    assert "3" in proc.stdout
    assert (workspace / "sched").exists()


def test_precompute_daily_slots(workspace):
    proc = invoke(
        ["precompute", "--gpk", "gpk", "--gsk", "gsk1", "--slots", "4",
         "--out", "sched4", "--test-seed", "41"],
        workspace,
    )
    assert proc.returncode == 0


def test_precompute_timing_report():
    proc = invoke(["precompute", "--timing-report", "--slots", "2", "--test-seed", "42"], ".")
    assert proc.returncode == 0
    assert "per-signature" in proc.stdout or "per_signature" in proc.stdout


def test_sim_cross_process_determinism(tmp_path):
    args = ["sim", "--scenario", "intersection", "--vehicles", "2", "--duration", "6",
            "--slot", "2", "--seed", "17", "--attacker-identities", "3",
            "--canonical", "canon"]
    a = invoke(args, tmp_path, env_extra={"PYTHONHASHSEED": "1"})
    assert a.returncode == 0, a.stderr
    first = (tmp_path / "canon").read_bytes()
    b = invoke(args, tmp_path, env_extra={"PYTHONHASHSEED": "99"})
    assert b.returncode == 0
    assert (tmp_path / "canon").read_bytes() == first
    assert a.stdout == b.stdout


def test_sim_report_json(tmp_path):
    proc = invoke(
        ["sim", "--scenario", "cam", "--vehicles", "1", "--duration", "60",
         "--slot", "30", "--seed", "5", "--report", "rep.json"],
        tmp_path,
    )
    assert proc.returncode == 0
    data = json.loads((tmp_path / "rep.json").read_text())
    assert data["summary"]["scenario"] == "cam"
    assert "timing" in data


def test_sim_config_file_with_overrides(tmp_path):
    (tmp_path / "sim.cfg").write_text(
        "scenario = intersection\n"
        "# comment line\n"
        "vehicle_count = 2\n"
        "duration_s = 4\n"
        "event_slot_s = 2\n"
        "seed = 9\n"
    )
    base = invoke(["sim", "--config", "sim.cfg", "--canonical", "c1"], tmp_path)
    assert base.returncode == 0, base.stderr
    overridden = invoke(
        ["sim", "--config", "sim.cfg", "--seed", "10", "--canonical", "c2"], tmp_path
    )
    assert overridden.returncode == 0
    assert (tmp_path / "c1").read_bytes() != (tmp_path / "c2").read_bytes()


def test_sim_invalid_config_clean_error(tmp_path):
    (tmp_path / "bad.cfg").write_text("vehicle_count = many\n")
    proc = invoke(["sim", "--config", "bad.cfg"], tmp_path)
    assert proc.returncode == 2
    assert "Traceback" not in proc.stderr
    proc2 = invoke(["sim", "--vehicles", "0"], tmp_path)
    assert proc2.returncode == 2


def test_bench_small_run_reports_op_tables(tmp_path):
    proc = invoke(
        ["bench", "--iters", "100", "--registry-size", "20", "--json", "bench.json"],
        tmp_path,
    )
    # The signing operation profile deliberately differs from the published
    # reference row, so bench exits nonzero while still reporting.
    assert proc.returncode == 1
    assert "MISMATCH" in proc.stdout
    assert "MATCH" in proc.stdout
    data = json.loads((tmp_path / "bench.json").read_text())
    assert data["rows"]["gver"]["ops"]["pairing"] == 2
    assert data["op_count_matches"] == {
        "gsign": False,
        "gver": True,
        "esign": True,
        "ever": True,
    }
    assert data["d224_reference"]["group_full"] == 308
    assert data["sizes"]["group_full"] == 352
    assert data["rows"]["gver"]["median_ms"] > 0
    assert data["rows"]["open_attribution"]["median_ms"] < data["rows"]["open_full"]["median_ms"]
