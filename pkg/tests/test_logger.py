"""
Tests for structured logging.
"""

import json
import logging

from furstenberg_lab.logger import ColoredFormatter, JSONFormatter, LabLogger, get_logger, setup_logging


def _record(level=logging.WARNING, **fields):
    record = logging.LogRecord("furstenberg_lab.test", level, __file__, 10, "pair_count: FAILED", None, None)
    if fields:
        record.extra = fields
    return record


def test_json_formatter_merges_fields():
    """Test that structured fields become top-level keys."""
    line = JSONFormatter().format(_record(check="pair_count", passed=False, lhs=12))
    data = json.loads(line)
    assert data["check"] == "pair_count"
    assert data["passed"] is False
    assert data["lhs"] == 12
    assert data["level"] == "WARNING"
    assert data["message"] == "pair_count: FAILED"


def test_colored_formatter_leaves_record_untouched():
    """Test that coloring works on a copy of the record."""
    record = _record()
    text = ColoredFormatter("%(levelname)s %(message)s").format(record)
    assert "\033[33m" in text
    assert record.levelname == "WARNING"


def test_lab_logger_is_a_singleton():
    """Test the shared package logger."""
    assert LabLogger() is LabLogger()
    assert get_logger().name == "furstenberg_lab"


def test_setup_replaces_console_handler(capsys):
    """Test that repeated setup keeps one console handler on stderr."""
    setup_logging(console_level=logging.INFO, use_colors=False)
    setup_logging(console_level=logging.INFO, use_colors=False)
    stream_handlers = [
        h for h in get_logger().handlers if type(h) is logging.StreamHandler
    ]
    assert len(stream_handlers) == 1

    LabLogger().log_check("ratio_sumsets", False, {"t": 2})
    captured = capsys.readouterr()
    assert captured.out == ""
    assert captured.err.count("ratio_sumsets: FAILED") == 1
    setup_logging()


def test_file_logging_writes_json_lines(tmp_path):
    """Test check records in a JSON log file."""
    path = tmp_path / "nested" / "lab.log"
    setup_logging(log_file=str(path), use_json=True)
    LabLogger().log_check("lw_certificate", True, {"n": 3, "m": 1})
    record = json.loads(path.read_text().splitlines()[-1])
    assert record["check"] == "lw_certificate"
    assert record["passed"] is True
    assert record["level"] == "DEBUG"
