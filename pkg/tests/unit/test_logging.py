import json
import logging

import numpy as np

from src.common.logging import JsonFormatter, get_logger, log_decision, log_error, log_event


def _record(message, **extra):
    record = logging.LogRecord("clampfold.test", logging.INFO, __file__, 1, message, None, None)
    for key, value in extra.items():
        setattr(record, key, value)
    return record


def test_json_formatter_includes_extra_fields():
    payload = json.loads(JsonFormatter().format(_record("decision", action="step", lam=1.5)))

    assert payload["message"] == "decision"
    assert payload["level"] == "INFO"
    assert payload["logger"] == "clampfold.test"
    assert payload["action"] == "step"
    assert payload["lam"] == 1.5
    assert "timestamp" in payload
    assert "pathname" not in payload


def test_json_formatter_converts_numpy_values():
    record = _record("step", sup=np.float64(0.25), iterations=np.int64(7), profile=np.array([1.0, 0.5]))
    payload = json.loads(JsonFormatter().format(record))

    assert payload["sup"] == 0.25
    assert payload["iterations"] == 7
    assert payload["profile"] == [1.0, 0.5]


def test_log_decision_carries_run_and_outcome(caplog):
    logger = get_logger("clampfold.test.decision")
    with caplog.at_level(logging.INFO):
        log_decision(logger, run_id="branch_1", action="step", outcome="accepted", lam=2.0)

    record = caplog.records[-1]
    assert record.event == "decision"
    assert record.run_id == "branch_1"
    assert record.action == "step"
    assert record.outcome == "accepted"
    assert record.lam == 2.0


def test_log_event_and_error(caplog):
    logger = get_logger("clampfold.test.events")
    with caplog.at_level(logging.INFO):
        log_event(logger, "continuation_started", n=3)
        log_error(logger, "command_failed", error=RuntimeError("boom"), command="eigen")

    started, failed = caplog.records[-2:]
    assert started.event == "continuation_started"
    assert started.n == 3
    assert failed.levelno == logging.ERROR
    assert failed.command == "eigen"
    assert failed.exc_info is not None
