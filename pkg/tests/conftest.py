import contextlib

import pytest

_LOG = pytest.StashKey[dict]()


def _log(config) -> dict:
    if _LOG not in config.stash:
        config.stash[_LOG] = {}
    return config.stash[_LOG]


@pytest.fixture
def record(request):
    """Context manager factory: ``with record(3, "title"):`` logs pass/fail for criterion 3."""
    log = _log(request.config)

    @contextlib.contextmanager
    def _record(number: int, title: str):
        log[number] = (title, False)
        yield
        log[number] = (title, True)

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = _log(config)
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(log):
        title, ok = log[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
