import json
import os
import subprocess
import sys

import pytest

from commfact.cli import run
from commfact.jsonio import matrix_from_json
from commfact.matrixcore import det


def cli(*args, env=None):
    """Run the command line tool in a fresh interpreter."""
    full_env = {**os.environ, **(env or {})}
    full_env.pop("COMMFACT_SEED", None) if env is None else None
    proc = subprocess.run(
        [sys.executable, "-m", "commfact.cli", *map(str, args)], capture_output=True, text=True, env=full_env
    )
    return proc.returncode, proc.stdout


def generate(tmp_path, kind, n, name, *extra):
    out = tmp_path / name
    assert run(["generate", "--kind", kind, "--n", str(n), "--output", str(out), *extra]) == 0
    return out


@pytest.mark.parametrize("kind,mode,extra", [
    ("band", "inv", ["--m", "2"]),
    ("band", "order-k", []),
    ("sl", "skewinv", []),
    ("vk", "skew-2k", ["--N", "4"]),
])
def test_round_trip_in_separate_processes(tmp_path, kind, mode, extra):
    inp = generate(tmp_path, kind, 5 if kind != "vk" else 2, "in.json", *extra)
    cert = tmp_path / "cert.json"
    k = ["--k", "2"] if mode == "skew-2k" else []
    code, out = cli("factorize", "--mode", mode, *k, "--input", inp, "--output", cert)
    assert code == 0, out
    assert json.loads(out)["verified"] is True
    code, out = cli("verify", "--input", inp, "--cert", cert)
    assert code == 0, out


def test_corrupted_certificate_fails(tmp_path):
    inp = generate(tmp_path, "band", 4, "in.json")
    cert = tmp_path / "cert.json"
    assert run(["factorize", "--mode", "inv", "--input", str(inp), "--output", str(cert)]) == 0
    doc = json.loads(cert.read_text())
    rows = doc["pairs"][0]["P"]["rows"]
    rows[0][0] = {"re": 7.0, "im": 0.0} if "re" in json.dumps(rows[0][0]) else 7
    cert.write_text(json.dumps(doc))
    code, out = cli("verify", "--input", inp, "--cert", cert)
    assert code == 2
    assert json.loads(out)["verified"] is False


def test_unparseable_certificate_fails_verification(tmp_path):
    inp = generate(tmp_path, "band", 3, "in.json")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"mode": "involution"}))
    assert run(["verify", "--input", str(inp), "--cert", str(bad)]) == 2


def test_digest_mismatch_fails(tmp_path):
    a = generate(tmp_path, "band", 4, "a.json", "--seed", "1")
    b = generate(tmp_path, "band", 4, "b.json", "--seed", "2")
    cert = tmp_path / "cert.json"
    assert run(["factorize", "--mode", "inv", "--input", str(a), "--output", str(cert)]) == 0
    assert run(["verify", "--input", str(b), "--cert", str(cert)]) == 2


def test_invalid_parameters_exit_three(tmp_path):
    inp = generate(tmp_path, "band", 3, "in.json")
    out = tmp_path / "c.json"
    assert run(["factorize", "--mode", "order-k", "--k", "2", "--input", str(inp), "--output", str(out)]) == 3
    assert run(["factorize", "--mode", "bogus", "--input", str(inp), "--output", str(out)]) == 3
    assert run(["factorize", "--mode", "inv", "--input", str(tmp_path / "missing.json"), "--output", str(out)]) == 3
    (tmp_path / "junk.json").write_text("{not json")
    assert run(["factorize", "--mode", "inv", "--input", str(tmp_path / "junk.json"), "--output", str(out)]) == 3


def test_precondition_violation_exits_four(tmp_path):
    inp = tmp_path / "in.json"
    inp.write_text(json.dumps({"kind": "dense", "n": 2, "rows": [[2, 0], [0, 1]]}))
    assert run(["factorize", "--mode", "inv", "--input", str(inp), "--output", str(tmp_path / "c.json")]) == 4


def test_generate_is_deterministic_and_sl_has_unit_determinant(tmp_path):
    a = generate(tmp_path, "sl", 4, "a.json", "--seed", "3")
    b = generate(tmp_path, "sl", 4, "b.json", "--seed", "3")
    assert a.read_text() == b.read_text()
    assert det(matrix_from_json(json.loads(a.read_text()))) == 1


def test_seed_environment_override(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    cli("generate", "--kind", "band", "--n", "4", "--seed", "1", "--output", a, env={"COMMFACT_SEED": "9"})
    cli("generate", "--kind", "band", "--n", "4", "--seed", "9", "--output", b)
    assert a.read_text() == b.read_text()


def test_float_flag_gives_float_certificate(tmp_path):
    inp = generate(tmp_path, "sl", 3, "in.json")
    cert = tmp_path / "cert.json"
    assert run(["factorize", "--mode", "inv", "--float", "--input", str(inp), "--output", str(cert)]) == 0
    assert json.loads(cert.read_text())["eps"] == 1e-9
    assert run(["verify", "--input", str(inp), "--cert", str(cert)]) == 0


def test_selftest_quick():
    code, out = cli("selftest", "--quick")
    assert code == 0
    assert json.loads(out)["passed"] is True
