import time
from contextlib import contextmanager

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("selfsnn", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("selfsnn")

_LINES = pytest.StashKey[list]()


@pytest.fixture
def criterion(request, capsys):
    """Context manager that times a block and reports ``PASS/FAIL criterion N`` for it."""
    lines = request.config.stash.setdefault(_LINES, [])

    @contextmanager
    def run(number: int, title: str, budget_s: float):
        start = time.perf_counter()
        ok = False
        try:
            yield
            elapsed = time.perf_counter() - start
            assert elapsed < budget_s, f"took {elapsed:.1f} s, budget {budget_s} s"
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {title} ({elapsed:.1f} s)"
            lines.append(line)
            with capsys.disabled():
                print(f"\n{line}")

    return run


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
