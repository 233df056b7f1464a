"""Testes da suíte de verificação"""
import pytest

from config.settings import EngineConfig
from core.classical_tr import corrupt_table
from core.errors import PreconditionError
from core.exact_algebra import SYMBOLS, const
from handlers.verification_suite import CheckRecord, VerificationReport, VerificationSuite
from tests.conftest import acceptance_spec, airy_spec

z1 = SYMBOLS.gen(1)


class TestReport:

    def test_failing_names(self):
        report = VerificationReport("c", 1, 0, [
            CheckRecord("a", True),
            CheckRecord("b", False, (1, 1, 0)),
            CheckRecord("b", False, (0, 3, 0)),
        ])
        assert not report.passed
        assert report.failing() == ["b"]
        assert report.to_dict()["checks"][1] == {"check": "b", "passed": False, "label": [1, 1, 0]}


class TestSuite:

    def test_record_residual(self):
        suite = VerificationSuite(airy_spec(), 1, EngineConfig.PROBE_SEED)
        suite._record("zero", None, lambda: const(0))
        suite._record("nonzero", None, lambda: z1)
        assert [r.passed for r in suite.report.records] == [True, False]
        assert suite.report.records[1].details == {"residual": "z1"}

    def test_record_engine_error(self):
        suite = VerificationSuite(airy_spec(), 1, EngineConfig.PROBE_SEED)

        def boom():
            raise PreconditionError("nope", where="test")

        suite._record("raises", None, boom)
        record = suite.report.records[0]
        assert not record.passed
        assert record.details["error_type"] == "PreconditionError"

    def test_corrupted_base_is_reported(self, airy_table):
        bad = corrupt_table(airy_table, (1, 1, 0), 1 / z1**3)
        report = VerificationSuite(airy_spec(), 1, EngineConfig.PROBE_SEED, base=bad).run()
        assert not report.passed
        assert "loop_equations" in report.failing()

    @pytest.mark.slow
    def test_acceptance_curve_passes(self):
        report = VerificationSuite(acceptance_spec(), 1, EngineConfig.PROBE_SEED).run()
        assert report.passed, report.failing()

    def test_wk_genus_follows_chi(self, monkeypatch):
        seen = []

        def fake_identities(g_max, table=None, executor=None):
            seen.append(g_max)
            return True

        monkeypatch.setattr("handlers.verification_suite.wk_identities", fake_identities)
        suite = VerificationSuite(airy_spec(), 5, EngineConfig.PROBE_SEED)
        suite._wk_identities()
        assert seen == [3]
        assert suite.report.records[0].to_dict() == {"check": "wk_identities", "passed": True,
                                                     "details": {"g_max": 3}}
