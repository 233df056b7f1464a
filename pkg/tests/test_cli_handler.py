"""Testes do handler da CLI: comandos, cache em disco e códigos de saída"""
import json

import pytest

from config.settings import Formula, OutputFormat
from core.errors import ExitCode
from core.models import RunConfig
from handlers.cli_handler import CLIHandler, render, resolve_curve_path
from main import main


def run(tmp_path, **kwargs):
    return CLIHandler().run(RunConfig(cache_dir=str(tmp_path), **kwargs))


class TestTrCommand:

    def test_writes_one_file_per_entry(self, tmp_path):
        payload, code = run(tmp_path, command="tr", curve="airy", chi=1)
        assert code == ExitCode.OK
        assert [(r["g"], r["m"]) for r in payload["results"]] == [(1, 1), (0, 3)]
        assert payload["cache"] == {"hits": 0, "computed": 2, "rejected": 0}
        for path in payload["files"]:
            assert path.endswith(f".{Formula.CLASSICAL_TR.value}.json")
            envelope = json.loads(open(path, encoding="utf-8").read())
            assert envelope["curve_name"] == "airy"

    @pytest.mark.slow
    def test_rerun_reads_the_cache(self, tmp_path):
        first, _ = run(tmp_path, command="tr", curve="airy", chi=1)
        second, code = run(tmp_path, command="tr", curve="airy", chi=1)
        assert code == ExitCode.OK
        assert second["cache"] == {"hits": 2, "computed": 0, "rejected": 0}
        assert second["results"] == first["results"]

    @pytest.mark.slow
    def test_corrupted_file_is_recomputed(self, tmp_path):
        first, _ = run(tmp_path, command="tr", curve="airy", chi=1)
        with open(first["files"][1], "w", encoding="utf-8") as handle:
            handle.write("{not json")
        second, code = run(tmp_path, command="tr", curve="airy", chi=1)
        assert code == ExitCode.OK
        assert second["cache"] == {"hits": 1, "computed": 1, "rejected": 1}
        assert second["results"] == first["results"]

    @pytest.mark.slow
    def test_tampered_body_is_rejected(self, tmp_path):
        first, _ = run(tmp_path, command="tr", curve="airy", chi=1)
        path = first["files"][0]
        envelope = json.loads(open(path, encoding="utf-8").read())
        envelope["body_digest"] = "0" * len(envelope["body_digest"])
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(json.dumps(envelope))
        second, _ = run(tmp_path, command="tr", curve="airy", chi=1)
        assert second["cache"]["rejected"] == 1

    @pytest.mark.slow
    def test_curve_hash_is_stable(self, tmp_path):
        first, _ = run(tmp_path, command="tr", curve="airy", chi=1)
        second, _ = run(tmp_path / "other", command="tr", curve="airy", chi=1)
        assert first["curve_hash"] == second["curve_hash"]


class TestOtherCommands:

    @pytest.mark.slow
    def test_psi(self, tmp_path):
        payload, code = run(tmp_path, command="psi", g=2)
        assert code == ExitCode.OK
        assert payload["psi"]["entries"] == [{"k": [4], "value": "1/1152"}]
        assert payload["files"][0].endswith("psi_g2_m1.json")
        assert "<tau_4>_2 = 1/1152" in render(payload, OutputFormat.PRETTY)

    def test_closed_yz(self, tmp_path):
        payload, code = run(tmp_path, command="closed-yz", g=1, m=1)
        assert code == ExitCode.OK
        assert payload["results"][0]["formula"] == Formula.CLOSED_YZ.value

    @pytest.mark.slow
    def test_mixed_both_attests(self, tmp_path):
        payload, code = run(tmp_path, command="mixed", curve="acceptance", g=0, m=1, n=2, method="both")
        assert code == ExitCode.OK
        assert payload["attestation"]["passed"] is True
        assert payload["results"][0]["body"] == payload["results"][1]["body"]

    @pytest.mark.slow
    def test_swap(self, tmp_path):
        payload, code = run(tmp_path, command="swap", curve="acceptance", g=0, n=3)
        assert code == ExitCode.OK
        assert payload["files"][0].endswith(f"omega_g0_m0_n3.{Formula.GRAPH_SUM.value}.json")

    @pytest.mark.slow
    def test_family_curve(self, tmp_path):
        payload, code = run(tmp_path, command="tr", family="witten", r=3, epsilon="1", chi=1)
        assert code == ExitCode.OK
        assert payload["curve"] == "witten-3"

    @pytest.mark.slow
    def test_verify_airy(self, tmp_path):
        payload, code = run(tmp_path, command="verify", curve="airy", chi=1)
        assert code == ExitCode.OK, payload.get("failing")
        assert payload["passed"] is True
        assert payload["files"][0].endswith("verify_chi1.json")


class TestFailures:

    def test_missing_curve(self, tmp_path):
        payload, code = run(tmp_path, command="tr", curve=str(tmp_path / "nope.json"))
        assert code == ExitCode.VALIDATION
        assert payload["error_type"] == "PreconditionError"

    def test_coincident_zeros(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({
            "name": "bad",
            "x": {"num": ["0", "0", "1/2"], "den": ["1"]},
            "y": {"num": ["0", "0", "1"], "den": ["1"]},
        }))
        payload, code = run(tmp_path, command="tr", curve=str(path))
        assert code == ExitCode.VALIDATION
        assert payload["error_type"] == "CoincidentZerosError"

    def test_invalid_curve_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text(json.dumps({"name": "broken", "x": {"num": []}}))
        _, code = run(tmp_path, command="tr", curve=str(path))
        assert code == ExitCode.VALIDATION

    def test_missing_label(self, tmp_path):
        _, code = run(tmp_path, command="mixed", curve="airy", g=1)
        assert code == ExitCode.VALIDATION

    def test_curve_and_family_exclusive(self, tmp_path):
        _, code = run(tmp_path, command="tr", curve="airy", family="airy")
        assert code == ExitCode.VALIDATION

    def test_bundled_curve_lookup(self):
        assert resolve_curve_path("acceptance").name == "acceptance.json"


class TestMain:

    def test_json_output(self, tmp_path, capsys):
        code = main(["psi", "--g", "1", "--cache", str(tmp_path), "--format", "json"])
        assert code == ExitCode.OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["psi"]["entries"] == [{"k": [1], "value": "1/24"}]

    def test_argument_validation(self, capsys):
        assert main(["tr", "--curve", "airy", "--chi", "0"]) == ExitCode.VALIDATION
        assert "--chi" in capsys.readouterr().err
