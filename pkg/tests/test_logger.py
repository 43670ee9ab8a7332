"""Tests for logger module."""

import logging

from groupspike.logger import get_default_log_file, setup_logger


def test_file_handler_records_debug(tmp_path):
    """The log file gets DEBUG records even when the console level is higher."""
    log_file = tmp_path / "logs" / "run.log"
    logger = setup_logger("groupspike.test.file", level="WARNING", log_file=log_file)
    logger.debug("em round 1: lambda=0.5")
    for handler in logger.handlers:
        handler.flush()
    assert "em round 1: lambda=0.5" in log_file.read_text(encoding="utf-8")
    assert logger.handlers[0].level == logging.WARNING


def test_unwritable_log_file_falls_back_to_console(tmp_path):
    """A log path that cannot be created leaves a console-only logger."""
    blocker = tmp_path / "not-a-dir"
    blocker.write_text("x", encoding="utf-8")
    logger = setup_logger("groupspike.test.fallback", log_file=blocker / "run.log")
    assert len(logger.handlers) == 1


def test_plain_console_handler():
    """enable_rich=False installs a plain stream handler."""
    logger = setup_logger("groupspike.test.plain", level="ERROR", enable_rich=False)
    assert type(logger.handlers[0]) is logging.StreamHandler
    assert logger.level == logging.ERROR


def test_default_log_file(tmp_path, monkeypatch):
    """The default log file lives under the home config directory."""
    monkeypatch.setattr("pathlib.Path.home", lambda: tmp_path)
    assert get_default_log_file() == tmp_path / ".groupspike" / "logs" / "groupspike.log"
