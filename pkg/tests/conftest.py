import sys
import time

from hypothesis import settings

settings.register_profile("seeded", derandomize=True, max_examples=40, deadline=None)
settings.load_profile("seeded")

SUITE_LIMIT_S = 180.0
_start = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = list(getattr(mod, "RESULTS", []))
    if not lines:
        return
    wall = time.perf_counter() - _start
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
    verdict = "PASS" if wall < SUITE_LIMIT_S else "FAIL"
    terminalreporter.write_line(f"suite wall time: {verdict} ({wall:.1f}s, limit {SUITE_LIMIT_S:.0f}s)")
