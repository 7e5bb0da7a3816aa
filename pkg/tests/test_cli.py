"""CLI behaviour: exit codes, file round-trips, config handling."""

import json

import pytest

from vckit import cli


def run(argv):
    return cli.main(argv)


@pytest.fixture
def circuit_file(tmp_path):
    path = tmp_path / "circ.json"
    path.write_text(json.dumps(
        {"inputs": 2, "gates": [["mul", 0, 1], ["addc", 2, 7]]}))
    return str(path)


def test_hauth_end_to_end(tmp_path, circuit_file, capsys):
    key = str(tmp_path / "key.json")
    t1, t2, out = (str(tmp_path / n) for n in ("t1.bin", "t2.bin", "out.bin"))
    assert run(["hauth", "keygen", "--seed", "00ff", "-o", key]) == 0
    assert run(["hauth", "auth", "--key", key, "-m", "3",
                "--label", "a", "-o", t1]) == 0
    assert run(["hauth", "auth", "--key", key, "-m", "5",
                "--label", "b", "-o", t2]) == 0
    assert run(["hauth", "eval", "--key", key, "--circuit", circuit_file,
                "--tags", t1, t2, "-o", out]) == 0
    assert run(["hauth", "verify", "--key", key, "--circuit", circuit_file,
                "--labels", "a", "b", "--tag", out, "--claim", "22"]) == 0
    assert run(["hauth", "verify", "--key", key, "--circuit", circuit_file,
                "--labels", "a", "b", "--tag", out, "--claim", "23"]) == 1
    captured = capsys.readouterr()
    assert "reject" in captured.out


def test_vdf_end_to_end(tmp_path):
    params = str(tmp_path / "params.json")
    proof = str(tmp_path / "proof.bin")
    assert run(["vdf", "setup", "--bits", "16", "--seed", "aa",
                "-T", "64", "-o", params]) == 0
    assert run(["vdf", "eval", "--params", params,
                "--input", "deadbeef"]) == 0
    assert run(["vdf", "beacon", "--params", params,
                "--input", "deadbeef", "-o", proof]) == 0
    assert run(["vdf", "verify", proof]) == 0
    blob = bytearray(open(proof, "rb").read())
    blob[-1] ^= 1
    open(proof, "wb").write(bytes(blob))
    assert run(["vdf", "verify", proof]) in (1, 2)


def test_vdf_trapdoor_agrees(tmp_path, capsys):
    params = str(tmp_path / "params.json")
    run(["vdf", "setup", "--bits", "16", "--seed", "bb", "-T", "100",
         "-o", params])
    run(["vdf", "eval", "--params", params, "--input", "0102"])
    slow = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    run(["vdf", "eval", "--params", params, "--input", "0102", "--trapdoor"])
    fast = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert slow == fast


def test_fri_prove_verify(tmp_path):
    proof = str(tmp_path / "fri.bin")
    assert run(["fri", "prove", "--domain", "64", "--degree", "8",
                "--queries", "10", "-o", proof]) == 0
    assert run(["fri", "verify", proof]) == 0
    blob = bytearray(open(proof, "rb").read())
    blob[-3] ^= 1
    open(proof, "wb").write(bytes(blob))
    assert run(["fri", "verify", proof]) in (1, 2)


def test_fri_demo():
    assert run(["fri", "demo", "--domain", "32", "--degree", "4"]) == 0


def test_stark_prove_verify(tmp_path):
    proof = str(tmp_path / "stark.bin")
    assert run(["stark", "prove", "--length", "8", "-o", proof]) == 0
    assert run(["stark", "verify", proof]) == 0


def test_stark_zk_and_custom_boundary(tmp_path):
    proof = str(tmp_path / "stark.bin")
    bad_boundary = str(tmp_path / "b.json")
    # an extra boundary consistent with the fib trace: row 2 holds 2
    good = str(tmp_path / "g.json")
    open(good, "w").write(json.dumps([{"column": 0, "row": 2, "value": 2}]))
    assert run(["stark", "prove", "--length", "8", "--zk",
                "--boundary-json", good, "-o", proof]) == 0
    assert run(["stark", "verify", proof]) == 0
    open(bad_boundary, "w").write(
        json.dumps([{"column": 0, "row": 2, "value": 3}]))
    assert run(["stark", "prove", "--length", "8",
                "--boundary-json", bad_boundary, "-o", proof]) == 3


def test_usage_errors(tmp_path):
    assert run(["nope"]) == 2
    assert run(["vdf"]) == 2
    assert run(["vdf", "verify", str(tmp_path / "missing.bin")]) == 2
    assert run(["--modulus", "15", "fri", "demo"]) == 2


def test_bench_smoke(capsys):
    assert run(["bench", "2poly", "--trials", "2000"]) == 0
    rec = json.loads(capsys.readouterr().out.splitlines()[0])
    assert rec["bench"] == "2poly"
    assert run(["bench", "vdf-asymmetry", "--T", "2048"]) == 0
    assert run(["bench", "fri-soundness", "--trials", "20"]) == 0
    assert run(["bench", "stark-mutation", "--trials", "5"]) == 0


def test_config_file(tmp_path):
    cfg = str(tmp_path / "vckit.cfg")
    open(cfg, "w").write("# comment\nqueries = 6\nblowup = 4\n")
    proof = str(tmp_path / "s.bin")
    assert run(["--config", cfg, "stark", "prove", "--length", "8",
                "-o", proof]) == 0
    assert run(["stark", "verify", proof]) == 0
