import csv
import io
import json

import pytest

from csdjwt import cli
from csdjwt.errors import RejectReason


@pytest.fixture()
def parties(tmp_path, capsys):
    reg = str(tmp_path / "reg.jsonl")
    dids = {}
    for role in ("issuer", "holder", "verifier"):
        assert cli.main(["keygen", "--role", role, "--out", str(tmp_path / f"{role}.json"), "--registry", reg, "--seed", "t"]) == 0
        dids[role] = capsys.readouterr().out.strip()
    claims = tmp_path / "claims.json"
    claims.write_text(json.dumps({"name": "Alice", "age": 30, "member": True}))
    return tmp_path, reg, dids


@pytest.mark.parametrize("mech", ["csd", "sd", "mt"])
def test_issue_present_verify(parties, capsys, mech):
    d, reg, dids = parties
    cred, vp = str(d / "cred"), str(d / "vp")
    assert cli.main(["issue", "--mechanism", mech, "--key", str(d / "issuer.json"), "--holder", dids["holder"],
                     "--claims", str(d / "claims.json"), "--registry", reg, "--out", cred]) == 0
    assert cli.main(["present", "--credential", cred, "--key", str(d / "holder.json"), "--disclose", "age",
                     "--nonce", "n" * 22, "--audience", dids["verifier"], "--out", vp]) == 0
    args = ["verify", "--presentation", vp, "--nonce", "n" * 22, "--audience", dids["verifier"], "--registry", reg,
            "--replay-store", str(d / "used")]
    capsys.readouterr()
    assert cli.main(args) == 0
    assert capsys.readouterr().out.strip() == "accept"
    assert cli.main(args) == cli.REJECT_EXIT[RejectReason.NONCE_REUSED]
    args[4] = "m" * 22
    assert cli.main(args) == cli.REJECT_EXIT[RejectReason.NONCE_MISMATCH]


def test_exit_codes_are_distinct():
    codes = list(cli.REJECT_EXIT.values())
    assert len(set(codes)) == len(codes) and min(codes) == 10


def test_decode_and_usage_errors(parties, capsys):
    d, reg, dids = parties
    bad = d / "bad"
    bad.write_text("not a token")
    assert cli.main(["verify", "--presentation", str(bad), "--nonce", "x", "--audience", "y", "--registry", reg]) == cli.EXIT_DECODE
    assert cli.main(["verify", "--presentation", str(d / "missing"), "--nonce", "x", "--audience", "y"]) == cli.EXIT_ERROR


def test_present_unknown_key(parties):
    d, reg, dids = parties
    cred = str(d / "cred")
    cli.main(["issue", "--key", str(d / "issuer.json"), "--holder", dids["holder"], "--claims", str(d / "claims.json"),
              "--registry", reg, "--out", cred])
    code = cli.main(["present", "--credential", cred, "--key", str(d / "holder.json"), "--disclose", "ghost",
                     "--nonce", "n" * 22, "--audience", dids["verifier"], "--out", str(d / "vp")])
    assert code == cli.EXIT_PRESENT


def test_bench_commands(tmp_path, capsys):
    out = tmp_path / "vp.csv"
    assert cli.main(["bench-vp", "--claims", "4", "--disclose", "0%,90%", "--out", str(out)]) == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert {(r["mechanism"], r["k"]) for r in rows} == {(m, k) for m in ("csd", "sd", "mt") for k in ("1", "4")}
    assert cli.main(["bench-storage", "--mechanism", "csd", "--claims", "2:4:2"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "mechanism,N,credential_bytes,credential_raw_bytes"
    assert cli.main(["bench-latency", "--mechanism", "sd", "--claims", "2", "--disclose", "0", "--reps", "2"]) == 0


def test_help_mentions_disclosure_rule(capsys):
    with pytest.raises(SystemExit):
        cli.main(["bench-vp", "--help"])
    assert "floor(f*N)+1" in capsys.readouterr().out
