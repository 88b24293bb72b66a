import json
import logging

import pytest
from pydantic import ValidationError

from singkit.core import exceptions as exc
from singkit.core.cache import CacheManager, cached_artifact
from singkit.core.config import ArithmeticSettings, settings
from singkit.core.logging import run_id_var, setup_logging
from singkit.core.metrics import MetricsManager
from singkit.core.schemas import CheckResult, Report


def test_exit_codes_follow_the_error_classes():
    assert exc.InvalidInputError("x").exit_code == exc.EXIT_BAD_INPUT
    assert exc.DomainMismatchError().exit_code == exc.EXIT_BAD_INPUT
    assert exc.FeatureGateError("x").exit_code == exc.EXIT_BAD_INPUT
    assert exc.NotSingularError().exit_code == exc.EXIT_BAD_INPUT
    assert exc.VerificationError("x").exit_code == exc.EXIT_MISMATCH
    assert exc.DegeneracyError("x").exit_code == exc.EXIT_MISMATCH
    assert exc.InsufficientTermsError("x").exit_code == exc.EXIT_LIMIT
    assert exc.LiftFailureError().exit_code == exc.EXIT_LIMIT
    assert exc.DegreeCapError(200, 128).details == {"degree": 200, "cap": 128}
    assert exc.UnluckyPrimeError(7).prime == 7


def test_settings_defaults_under_test_env():
    assert settings.threads >= 1
    assert settings.arithmetic.prime_offset == 0
    assert settings.enable_caching is False
    assert settings.phik_prefactor in ("direct", "printed")


def test_prime_offset_must_index_the_pool():
    with pytest.raises(ValidationError):
        ArithmeticSettings(prime_offset=50)


def test_check_result_only_fail_counts_as_failure():
    assert CheckResult(check="a", status="pass").passed
    assert CheckResult(check="a", status="reported").passed
    assert not CheckResult(check="a", status="fail").passed


def test_report_from_checks_lists_failures():
    checks = [CheckResult(check="ok", status="pass"), CheckResult(check="bad", status="fail")]
    report = Report.from_checks(checks, metadata={"config": {"n": 3}})
    payload = report.to_dict()
    assert payload["success"] is False
    assert payload["error"]["details"] == {"failed": ["bad"]}
    assert payload["metadata"]["config"] == {"n": 3}
    assert "timestamp" not in payload


def test_report_ok_is_deterministic():
    a = Report.ok({"x": 1}).to_dict()
    b = Report.ok({"x": 1}).to_dict()
    assert a == b
    assert "timestamp" in Report.ok({"x": 1}).to_dict(include_timestamp=True)


def test_logging_writes_json_lines_with_run_id(capsys):
    setup_logging("INFO")
    token = run_id_var.set("run-123")
    try:
        logging.getLogger("singkit.test").warning("hello", extra={"n": 5})
    finally:
        run_id_var.reset(token)
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["message"] == "hello"
    assert record["level"] == "WARNING"
    assert record["run_id"] == "run-123"
    assert record["n"] == 5
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_singkit", False):
            root.removeHandler(handler)


def test_cached_artifact_reparses_hits(cache_dir):
    calls = []

    @cached_artifact("test", dump=lambda v: {"value": v}, load=lambda d: d["value"] * 10)
    def compute(n):
        calls.append(n)
        return n + 1

    assert compute(4) == 5
    # a hit goes through load()
    assert compute(4) == 50
    assert calls == [4]


def test_cache_disabled_always_recomputes():
    calls = []

    @cached_artifact("test", dump=lambda v: v, load=lambda v: v)
    def compute(n):
        calls.append(n)
        return n

    compute(1)
    compute(1)
    assert calls == [1, 1]


def test_cache_keys_depend_on_payload():
    a = CacheManager.generate_key("series", "phiH", {"n": 3})
    b = CacheManager.generate_key("series", "phiH", {"n": 4})
    assert a != b
    assert a.startswith("series:phiH:")


def test_metrics_export_writes_textfile(tmp_path):
    MetricsManager.record_prime("test")
    MetricsManager.record_fit("found")
    with MetricsManager.timed("test_stage"):
        pass
    path = tmp_path / "metrics.prom"
    MetricsManager.export(str(path))
    text = path.read_text()
    assert "singkit_primes_used_total" in text
    assert "singkit_stage_duration_seconds" in text
