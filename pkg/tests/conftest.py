import pytest

_ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def record_criterion():
    """Register the outcome of one acceptance criterion for the end-of-run table."""

    def _record(key: str, passed: bool, detail: str):
        _ACCEPTANCE[key] = (bool(passed), detail)
        return passed

    return _record


def _order(key: str):
    num = "".join(ch for ch in key if ch.isdigit())
    return (int(num) if num else 0, key)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=_order):
        ok, detail = _ACCEPTANCE[key]
        tr.write_line(f"criterion {key:>3}: {'PASS' if ok else 'FAIL'}  {detail}")
