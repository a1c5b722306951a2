import sys
import os
import logging
import pytest
from pydantic import ValidationError

# Ensure app is importable
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
from app.config import Settings, settings
from app.schemas.proof import CheckOptions, FragmentMode, SearchBudget
from app.utils.logging import configure_logging


def test_defaults(monkeypatch):
    for key in ("ECUMENE_SEED", "ECUMENE_BUDGET_DEPTH", "ECUMENE_MAX_WORLDS"):
        monkeypatch.delenv(key, raising=False)
    s = Settings()
    assert s.seed == 0
    assert s.budget_depth == 200
    assert s.max_worlds == 3
    assert s.lce_macro_expand is True


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("ECUMENE_SEED", "42")
    monkeypatch.setenv("ECUMENE_BUDGET_TERMS", "4")
    monkeypatch.setenv("ECUMENE_LCE_MACRO_EXPAND", "false")
    s = Settings()
    assert s.seed == 42
    assert s.budget_terms == 4
    assert s.lce_macro_expand is False


def test_max_worlds_is_bounded(monkeypatch):
    monkeypatch.setenv("ECUMENE_MAX_WORLDS", "9")
    with pytest.raises(ValidationError):
        Settings()


def test_budget_defaults_follow_settings(monkeypatch):
    monkeypatch.setattr(settings, "budget_depth", 17)
    assert SearchBudget().max_depth == 17
    assert SearchBudget(max_depth=5).max_depth == 5


def test_budget_rejects_non_positive_limits():
    with pytest.raises(ValidationError):
        SearchBudget(max_depth=0)


def test_check_options_parse_extensions():
    assert CheckOptions(extensions="t, 4").extensions == frozenset({"t", "4"})
    assert CheckOptions().fragment is FragmentMode.FULL
    with pytest.raises(ValidationError):
        CheckOptions(extensions="k")


def test_logging_goes_to_stderr(capsys):
    configure_logging("info")
    logging.getLogger("app.test").info("hello")
    out = capsys.readouterr()
    assert out.out == ""
    configure_logging("warning")
